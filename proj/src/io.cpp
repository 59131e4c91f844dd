#include "henlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace henlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

void check_field(std::string_view field) {
  if (field.find_first_of(",\n\r") != std::string_view::npos)
    throw std::invalid_argument("csv: field contains a separator: '" + std::string(field) + "'");
}

void join_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    check_field(fields[i]);
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(pos));
      return fields;
    }
    fields.emplace_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

}  // namespace

std::string to_csv(const CsvTable& t) {
  std::string out;
  for (const std::string& c : t.comments) {
    if (c.find_first_of("\n\r") != std::string::npos)
      throw std::invalid_argument("csv: comment contains a newline");
    out += "# ";
    out += c;
    out += '\n';
  }
  if (!t.header.empty()) join_line(out, t.header);
  for (const auto& row : t.rows) {
    if (!t.header.empty() && row.size() != t.header.size())
      throw std::invalid_argument("csv: row width differs from header");
    join_line(out, row);
  }
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view body = line.substr(1);
      if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      t.comments.emplace_back(body);
      continue;
    }
    if (!have_header) {
      t.header = split_line(line);
      have_header = true;
    } else {
      t.rows.push_back(split_line(line));
    }
  }
  return t;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof())
    throw std::runtime_error("read failed: " + path.string());
  return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_csv(const std::filesystem::path& path, const CsvTable& t) {
  write_file(path, to_csv(t));
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

std::string to_pgm(const PgmImage& img, std::string_view comment) {
  if (img.width < 1 || img.height < 1)
    throw std::invalid_argument("pgm: dimensions must be positive");
  if (img.maxval != 255 && img.maxval != 65535)
    throw std::invalid_argument("pgm: maxval must be 255 or 65535");
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  if (img.pixels.size() != n)
    throw std::invalid_argument("pgm: pixel count does not match dimensions");
  if (comment.find_first_of("\n\r") != std::string_view::npos)
    throw std::invalid_argument("pgm: comment contains a newline");

  std::string out = "P5\n# ";
  out += comment;
  out += '\n';
  out += std::to_string(img.width) + ' ' + std::to_string(img.height) + '\n';
  out += std::to_string(img.maxval) + '\n';
  out.reserve(out.size() + (img.maxval > 255 ? 2 * n : n));
  for (std::uint16_t p : img.pixels) {
    if (p > img.maxval) throw std::invalid_argument("pgm: pixel exceeds maxval");
    if (img.maxval > 255) out += static_cast<char>(p >> 8);
    out += static_cast<char>(p & 0xff);
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const PgmImage& img,
               std::string_view comment) {
  write_file(path, to_pgm(img, comment));
}

}  // namespace henlab
