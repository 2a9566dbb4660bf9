#include "shiftscope/features.hpp"

#include <charconv>
#include <cmath>

#include "shiftscope/error.hpp"
#include "shiftscope/io.hpp"

namespace shiftscope {

namespace {

constexpr std::string_view kBinaryMagic = "DGF1";

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_value(std::string_view text, std::size_t line_no) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) {
    throw FormatError("line " + std::to_string(line_no) + ": non-finite value '" + std::string(text) + "'");
  }
  return value;
}

FeatureMatrix parse_csv(std::string_view text) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    while (pos < text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      line = text.substr(pos, nl - pos);
      pos = nl + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) return true;
    }
    return false;
  };

  std::string_view header;
  if (!next_line(header)) throw FormatError("feature file is empty");
  auto columns = split_fields(header);
  if (columns.size() < 2 || columns.front() != "id") {
    throw FormatError("feature header must be 'id,f0,...'");
  }
  const std::size_t dim = columns.size() - 1;

  std::vector<std::string> ids;
  std::vector<double> data;
  std::string_view line;
  while (next_line(line)) {
    auto fields = split_fields(line);
    if (fields.size() != dim + 1) {
      throw FormatError("line " + std::to_string(line_no) + ": ragged row with " +
                        std::to_string(fields.size() - 1) + " values, expected " + std::to_string(dim));
    }
    ids.emplace_back(fields[0]);
    for (std::size_t j = 1; j <= dim; ++j) data.push_back(parse_value(fields[j], line_no));
  }
  return FeatureMatrix(std::move(ids), std::move(data), dim);
}

FeatureMatrix parse_binary(std::string_view bytes) {
  io::ByteReader in(bytes);
  in.take(kBinaryMagic.size());
  const auto n = in.u64();
  const auto d = in.u64();
  if (d == 0) throw FormatError("binary feature file declares zero columns");
  if (n > in.remaining() / 8 / d) throw FormatError("binary feature file truncated");
  std::vector<double> data(n * d);
  for (auto& v : data) {
    v = in.f64();
    if (!std::isfinite(v)) throw FormatError("binary feature file contains a non-finite value");
  }
  std::vector<std::string> ids;
  ids.reserve(n);
  auto rest = in.rest();
  std::size_t pos = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    auto nl = rest.find('\n', pos);
    if (nl == std::string_view::npos) throw FormatError("binary feature file: missing ids");
    ids.emplace_back(rest.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (pos != rest.size()) throw FormatError("binary feature file: trailing bytes after ids");
  return FeatureMatrix(std::move(ids), std::move(data), d);
}

void check_id(const std::string& id, bool csv) {
  if (id.find('\n') != std::string::npos || (csv && (id.find(',') != std::string::npos || id.find('\r') != std::string::npos))) {
    throw InvalidArgument("feature id '" + id + "' cannot be stored in this format");
  }
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::vector<std::string> ids, std::vector<double> data, std::size_t dim)
    : ids_(std::move(ids)), data_(std::move(data)), dim_(dim) {
  if (dim_ == 0) throw InvalidArgument("feature matrix needs at least one column");
  if (data_.size() != ids_.size() * dim_) {
    throw InvalidArgument("feature data size does not match rows x columns");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw InvalidArgument("feature matrix contains a non-finite value");
  }
}

FeatureMatrix FeatureMatrix::select(std::span<const std::size_t> indices) const {
  std::vector<std::string> ids;
  std::vector<double> data;
  ids.reserve(indices.size());
  data.reserve(indices.size() * dim_);
  for (auto i : indices) {
    if (i >= rows()) throw InvalidArgument("row index out of range");
    ids.push_back(ids_[i]);
    auto r = row(i);
    data.insert(data.end(), r.begin(), r.end());
  }
  return FeatureMatrix(std::move(ids), std::move(data), dim_);
}

FeatureMatrix concat_rows(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.dim() != b.dim()) {
    throw InvalidArgument("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  std::vector<std::string> ids(a.ids());
  ids.insert(ids.end(), b.ids().begin(), b.ids().end());
  std::vector<double> data(a.data().begin(), a.data().end());
  data.insert(data.end(), b.data().begin(), b.data().end());
  return FeatureMatrix(std::move(ids), std::move(data), a.dim());
}

FeatureMatrix subsample(const FeatureMatrix& m, std::size_t k, RngSeed seed) {
  if (k > m.rows()) {
    throw InvalidArgument("subsample size " + std::to_string(k) + " exceeds " + std::to_string(m.rows()) + " rows");
  }
  auto idx = sample_indices(m.rows(), k, seed);
  if (k == 0) return FeatureMatrix({}, {}, m.dim());
  return m.select(idx);
}

FeatureFormat format_for_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  return (ext == ".dgf" || ext == ".bin") ? FeatureFormat::binary : FeatureFormat::csv;
}

std::string serialize_features_csv(const FeatureMatrix& m) {
  std::string out = "id";
  for (std::size_t j = 0; j < m.dim(); ++j) out += ",f" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    check_id(m.ids()[i], true);
    out += m.ids()[i];
    for (double v : m.row(i)) {
      out += ',';
      out += io::format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string serialize_features_binary(const FeatureMatrix& m) {
  std::string out(kBinaryMagic);
  io::append_u64_le(out, m.rows());
  io::append_u64_le(out, m.dim());
  for (double v : m.data()) io::append_f64_le(out, v);
  for (const auto& id : m.ids()) {
    check_id(id, false);
    out += id;
    out += '\n';
  }
  return out;
}

FeatureMatrix parse_features(std::string_view bytes) {
  if (bytes.empty()) throw FormatError("feature file is empty");
  if (bytes.starts_with(kBinaryMagic)) return parse_binary(bytes);
  return parse_csv(bytes);
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  try {
    return parse_features(io::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_features(const FeatureMatrix& m, const std::filesystem::path& path, FeatureFormat format) {
  io::write_file(path, format == FeatureFormat::binary ? serialize_features_binary(m) : serialize_features_csv(m));
}

void save_features(const FeatureMatrix& m, const std::filesystem::path& path) {
  save_features(m, path, format_for_path(path));
}

}  // namespace shiftscope
