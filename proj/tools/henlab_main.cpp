#include <string>
#include <vector>

#include "henlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return henlab::run_command(args);
}
