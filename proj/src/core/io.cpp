#include "shiftscope/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>

#include "shiftscope/error.hpp"

namespace shiftscope::io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return bytes;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw FormatError("cannot format floating-point value");
  return std::string(buf.data(), end);
}

void append_u64_le(std::string& out, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

void append_f64_le(std::string& out, double value) {
  append_u64_le(out, std::bit_cast<std::uint64_t>(value));
}

std::string_view ByteReader::take(std::size_t count) {
  if (count > remaining()) throw FormatError("unexpected end of binary data");
  auto view = bytes_.substr(pos_, count);
  pos_ += count;
  return view;
}

std::uint64_t ByteReader::u64() {
  auto raw = take(8);
  std::uint64_t value = 0;
  for (int i = 7; i >= 0; --i) value = (value << 8) | static_cast<unsigned char>(raw[i]);
  return value;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

}  // namespace shiftscope::io
