#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace shiftscope::io {

/// Whole file as bytes; IoError when unreadable.
std::string read_file(const std::filesystem::path& path);

/// Replaces the file's contents; IoError when unwritable.
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

void append_u64_le(std::string& out, std::uint64_t value);
void append_f64_le(std::string& out, double value);

/// Sequential little-endian reader over a byte buffer; FormatError on overrun.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) noexcept : bytes_(bytes) {}

  std::string_view take(std::size_t count);
  std::uint64_t u64();
  double f64();
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  std::string_view rest() const noexcept { return bytes_.substr(pos_); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace shiftscope::io
