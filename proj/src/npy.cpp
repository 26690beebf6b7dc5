#include "eegart/npy.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <string_view>

#include "eegart/error.hpp"

namespace eegart {

static_assert(std::endian::native == std::endian::little,
              "NPY reader assumes a little-endian host");

namespace {

constexpr std::array<char, 6> kMagic = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

// Value text following `'key':` in the header dict, up to the next top-level
// comma or closing brace. Tuples are returned with their parentheses.
std::string header_value(const std::string& header, std::string_view key,
                         const std::filesystem::path& path) {
  std::size_t pos = std::string::npos;
  for (const char quote : {'\'', '"'}) {
    const std::string needle = std::string(1, quote) + std::string(key) + quote;
    pos = header.find(needle);
    if (pos != std::string::npos) {
      pos += needle.size();
      break;
    }
  }
  if (pos == std::string::npos) {
    fail(ErrorCode::BadMagic, path.string() + ": header has no '" + std::string(key) + "' entry");
  }
  pos = header.find(':', pos);
  if (pos == std::string::npos) fail(ErrorCode::BadMagic, path.string() + ": malformed header");
  ++pos;
  while (pos < header.size() && header[pos] == ' ') ++pos;

  std::size_t end = pos;
  int depth = 0;
  for (; end < header.size(); ++end) {
    const char c = header[end];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth == 0 && (c == ',' || c == '}')) break;
    if (depth < 0) break;
  }
  if (depth == 0 && end < header.size() && header[end] == ')') ++end;
  std::string value = header.substr(pos, end - pos);
  while (!value.empty() && value.back() == ' ') value.pop_back();
  return value;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::size_t> parse_shape(const std::string& text, const std::filesystem::path& path) {
  if (text.size() < 2 || text.front() != '(' || text.back() != ')') {
    fail(ErrorCode::BadMagic, path.string() + ": malformed shape '" + text + "'");
  }
  std::vector<std::size_t> dims;
  std::size_t i = 1;
  while (i + 1 < text.size()) {
    while (i + 1 < text.size() && (text[i] == ' ' || text[i] == ',')) ++i;
    if (i + 1 >= text.size()) break;
    std::size_t j = i;
    while (j + 1 < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
    if (j == i) fail(ErrorCode::BadMagic, path.string() + ": malformed shape '" + text + "'");
    dims.push_back(std::stoull(text.substr(i, j - i)));
    i = j;
  }
  return dims;
}

}  // namespace

NpyMatrix read_npy_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());

  std::array<char, 6> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) fail(ErrorCode::BadMagic, path.string() + " is not an NPY file");

  unsigned char version[2] = {0, 0};
  in.read(reinterpret_cast<char*>(version), 2);
  if (!in || version[0] < 1 || version[0] > 3) {
    fail(ErrorCode::BadMagic, path.string() + ": unsupported NPY version");
  }

  std::uint32_t header_len = 0;
  if (version[0] == 1) {
    unsigned char len[2];
    in.read(reinterpret_cast<char*>(len), 2);
    header_len = static_cast<std::uint32_t>(len[0]) | (static_cast<std::uint32_t>(len[1]) << 8);
  } else {
    unsigned char len[4];
    in.read(reinterpret_cast<char*>(len), 4);
    header_len = static_cast<std::uint32_t>(len[0]) | (static_cast<std::uint32_t>(len[1]) << 8) |
                 (static_cast<std::uint32_t>(len[2]) << 16) |
                 (static_cast<std::uint32_t>(len[3]) << 24);
  }
  if (!in) fail(ErrorCode::BadMagic, path.string() + ": truncated header");

  std::string header(header_len, '\0');
  in.read(header.data(), header_len);
  if (!in) fail(ErrorCode::BadMagic, path.string() + ": truncated header");

  const std::string descr = unquote(header_value(header, "descr", path));
  const std::string fortran = header_value(header, "fortran_order", path);
  const auto shape = parse_shape(header_value(header, "shape", path), path);

  std::size_t elem_size = 0;
  if (descr == "<f8") {
    elem_size = 8;
  } else if (descr == "<f4") {
    elem_size = 4;
  } else {
    fail(ErrorCode::UnsupportedDtype, path.string() + ": dtype '" + descr + "' (need <f4 or <f8)");
  }
  if (fortran != "False") {
    fail(ErrorCode::UnsupportedDtype, path.string() + ": Fortran-order arrays are not supported");
  }
  if (shape.size() != 2) {
    fail(ErrorCode::ShapeError, path.string() + ": expected a 2-D array, got " +
                                    std::to_string(shape.size()) + " dimensions");
  }

  NpyMatrix out;
  out.rows = shape[0];
  out.cols = shape[1];
  const std::size_t count = out.rows * out.cols;
  out.data.resize(count);

  if (elem_size == 8) {
    in.read(reinterpret_cast<char*>(out.data.data()), static_cast<std::streamsize>(count * 8));
  } else {
    std::vector<float> buffer(count);
    in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(count * 4));
    for (std::size_t i = 0; i < count; ++i) out.data[i] = static_cast<double>(buffer[i]);
  }
  if (!in) fail(ErrorCode::IoError, path.string() + ": file ends before all array data");
  return out;
}

SegmentSet read_npy(const std::filesystem::path& path, SetKind kind) {
  NpyMatrix m = read_npy_matrix(path);
  if (m.cols != kSegmentLength) {
    fail(ErrorCode::ShapeError, path.string() + ": rows hold " + std::to_string(m.cols) +
                                    " samples, expected " + std::to_string(kSegmentLength));
  }
  SegmentSet set;
  set.kind = kind;
  set.source_path = path.string();
  set.rows = m.rows;
  set.data = std::move(m.data);
  return set;
}

void write_npy(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
               std::span<const double> data) {
  if (data.size() != rows * cols) {
    fail(ErrorCode::LengthMismatch, "write_npy: data size does not match shape");
  }
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': (" +
                       std::to_string(rows) + ", " + std::to_string(cols) + "), }";
  // Magic + version + length field + header + newline must be a multiple of 64.
  const std::size_t prefix = kMagic.size() + 2 + 2;
  const std::size_t total = prefix + header.size() + 1;
  header.append((64 - total % 64) % 64, ' ');
  header.push_back('\n');

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  const char version[2] = {1, 0};
  out.write(version, 2);
  const auto len = static_cast<std::uint16_t>(header.size());
  const char len_bytes[2] = {static_cast<char>(len & 0xFF), static_cast<char>(len >> 8)};
  out.write(len_bytes, 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace eegart
