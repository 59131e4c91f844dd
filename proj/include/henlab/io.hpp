#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace henlab {

// Round-trip formatting for CSV fields: "%.17g" in the C locale, enough
// digits to reproduce the exact double.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Plain comma-separated table. Comment lines are written first, prefixed
// "# ". Fields must not contain commas, newlines, or carriage returns;
// no quoting is performed.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const CsvTable& t);
CsvTable parse_csv(std::string_view text);

void write_csv(const std::filesystem::path& path, const CsvTable& t);
CsvTable read_csv(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Binary PGM (P5). maxval is 255 (one byte per sample) or 65535 (two
// bytes, big endian). Header carries exactly one comment line.
struct PgmImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<std::uint16_t> pixels;  // row-major, each <= maxval
};

std::string to_pgm(const PgmImage& img, std::string_view comment);
void write_pgm(const std::filesystem::path& path, const PgmImage& img,
               std::string_view comment);

}  // namespace henlab
