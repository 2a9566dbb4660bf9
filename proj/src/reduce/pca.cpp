#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "shiftscope/error.hpp"
#include "shiftscope/io.hpp"
#include "shiftscope/reduce.hpp"

namespace shiftscope {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

constexpr std::string_view kModelMagic = "DGP1";

// Negate each row whose largest-magnitude entry is negative (first index wins ties).
void apply_sign_convention(RowMatrix& components) {
  for (Eigen::Index r = 0; r < components.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < components.cols(); ++c) {
      if (std::fabs(components(r, c)) > std::fabs(components(r, best))) best = c;
    }
    if (components(r, best) < 0.0) components.row(r) *= -1.0;
  }
}

// Modified Gram-Schmidt in place, two passes. Rows flagged `missing`, and
// rows that collapse numerically, are replaced by the first standard basis
// vector that still has a usable residual.
void orthonormalize(RowMatrix& rows, const std::vector<bool>& missing) {
  const Eigen::Index d = rows.cols();
  Eigen::Index next_basis = 0;
  auto project_out = [&](Eigen::Index r) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index q = 0; q < r; ++q) rows.row(r) -= rows.row(q).dot(rows.row(r)) * rows.row(q);
    }
    return rows.row(r).norm();
  };
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    if (!missing[static_cast<std::size_t>(r)]) {
      const double norm = project_out(r);
      if (norm > 1e-6) {
        rows.row(r) /= norm;
        continue;
      }
    }
    while (true) {
      if (next_basis >= d) throw Error("cannot complete an orthonormal basis");
      rows.row(r).setZero();
      rows(r, next_basis++) = 1.0;
      const double norm = project_out(r);
      if (norm > 0.5) {
        rows.row(r) /= norm;
        break;
      }
    }
  }
}

RowMatrix centered(const FeatureMatrix& m, const Eigen::VectorXd& mean) {
  ConstRowMap x(m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.dim()));
  return x.rowwise() - mean.transpose();
}

void fit_covariance(const RowMatrix& xc, std::size_t k, RowMatrix& components, Eigen::VectorXd& eigenvalues) {
  const auto n = xc.rows();
  const auto d = xc.cols();
  Eigen::MatrixXd cov = (xc.transpose() * xc) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw Error("covariance eigendecomposition failed");
  for (std::size_t t = 0; t < k; ++t) {
    const auto idx = d - 1 - static_cast<Eigen::Index>(t);
    eigenvalues(static_cast<Eigen::Index>(t)) = std::max(0.0, es.eigenvalues()(idx));
    components.row(static_cast<Eigen::Index>(t)) = es.eigenvectors().col(idx).transpose();
  }
}

void fit_gram(const RowMatrix& xc, std::size_t k, RowMatrix& components, Eigen::VectorXd& eigenvalues) {
  const auto n = xc.rows();
  const auto d = xc.cols();
  Eigen::MatrixXd gram = (xc * xc.transpose()) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success) throw Error("Gram eigendecomposition failed");
  const double top = std::max(0.0, es.eigenvalues()(n - 1));
  const double tol = top * static_cast<double>(std::max(n, d)) * std::numeric_limits<double>::epsilon() * 16.0;
  std::vector<bool> missing(k, false);
  for (std::size_t t = 0; t < k; ++t) {
    const auto r = static_cast<Eigen::Index>(t);
    const auto idx = n - 1 - r;
    const double lambda = idx >= 0 ? es.eigenvalues()(idx) : 0.0;
    if (idx < 0 || lambda <= tol) {
      eigenvalues(r) = 0.0;
      missing[t] = true;
      components.row(r).setZero();
      continue;
    }
    eigenvalues(r) = lambda;
    components.row(r) = (xc.transpose() * es.eigenvectors().col(idx)).transpose() /
                        std::sqrt(static_cast<double>(n - 1) * lambda);
  }
  orthonormalize(components, missing);
}

}  // namespace

std::vector<double> PcaModel::explained_variance_ratio() const {
  std::vector<double> ratios(eigenvalues.size(), 0.0);
  if (total_variance > 0.0) {
    for (std::size_t i = 0; i < ratios.size(); ++i) ratios[i] = std::min(1.0, eigenvalues[i] / total_variance);
  }
  return ratios;
}

PcaModel pca_fit(const FeatureMatrix& m, std::size_t k, PcaSolver solver) {
  const std::size_t n = m.rows();
  const std::size_t d = m.dim();
  if (n < 2) throw InvalidArgument("PCA needs at least 2 rows, got " + std::to_string(n));
  if (k < 1 || k > d) {
    throw InvalidArgument("PCA components k=" + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
  }

  ConstRowMap x(m.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  const Eigen::VectorXd mean = x.colwise().mean().transpose();
  const RowMatrix xc = centered(m, mean);

  PcaModel model;
  model.mean.assign(mean.data(), mean.data() + d);
  model.total_variance = xc.squaredNorm() / static_cast<double>(n - 1);

  RowMatrix components = RowMatrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  Eigen::VectorXd eigenvalues = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  if (model.total_variance == 0.0) {
    for (std::size_t t = 0; t < k; ++t) components(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t)) = 1.0;
  } else {
    if (solver == PcaSolver::automatic) solver = d <= n ? PcaSolver::covariance : PcaSolver::gram;
    if (solver == PcaSolver::covariance) {
      fit_covariance(xc, k, components, eigenvalues);
    } else {
      fit_gram(xc, k, components, eigenvalues);
    }
    apply_sign_convention(components);
  }

  model.components.assign(components.data(), components.data() + components.size());
  model.eigenvalues.assign(eigenvalues.data(), eigenvalues.data() + k);
  return model;
}

FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& m) {
  if (m.dim() != model.dim()) {
    throw InvalidArgument("PCA transform: input has " + std::to_string(m.dim()) + " columns, model expects " +
                          std::to_string(model.dim()));
  }
  const auto n = static_cast<Eigen::Index>(m.rows());
  const auto d = static_cast<Eigen::Index>(model.dim());
  const auto k = static_cast<Eigen::Index>(model.k());
  Eigen::Map<const Eigen::VectorXd> mean(model.mean.data(), d);
  ConstRowMap comps(model.components.data(), k, d);
  std::vector<double> out(m.rows() * model.k());
  if (n > 0) {
    Eigen::Map<RowMatrix> z(out.data(), n, k);
    z.noalias() = centered(m, mean) * comps.transpose();
  }
  return FeatureMatrix(m.ids(), std::move(out), model.k());
}

FeatureMatrix pca_inverse_transform(const PcaModel& model, const FeatureMatrix& z) {
  if (z.dim() != model.k()) {
    throw InvalidArgument("PCA inverse transform: input has " + std::to_string(z.dim()) +
                          " columns, model has k=" + std::to_string(model.k()));
  }
  const auto n = static_cast<Eigen::Index>(z.rows());
  const auto d = static_cast<Eigen::Index>(model.dim());
  const auto k = static_cast<Eigen::Index>(model.k());
  Eigen::Map<const Eigen::RowVectorXd> mean(model.mean.data(), d);
  ConstRowMap comps(model.components.data(), k, d);
  std::vector<double> out(z.rows() * model.dim());
  if (n > 0) {
    ConstRowMap zm(z.data().data(), n, k);
    Eigen::Map<RowMatrix> x(out.data(), n, d);
    x.noalias() = zm * comps;
    x.rowwise() += mean;
  }
  return FeatureMatrix(z.ids(), std::move(out), model.dim());
}

std::string serialize_pca_model(const PcaModel& model) {
  std::string out(kModelMagic);
  io::append_u64_le(out, model.dim());
  io::append_u64_le(out, model.k());
  for (double v : model.mean) io::append_f64_le(out, v);
  for (double v : model.components) io::append_f64_le(out, v);
  for (double v : model.eigenvalues) io::append_f64_le(out, v);
  io::append_f64_le(out, model.total_variance);
  return out;
}

PcaModel parse_pca_model(std::string_view bytes) {
  if (!bytes.starts_with(kModelMagic)) throw FormatError("not a PCA model file (missing DGP1 magic)");
  io::ByteReader in(bytes);
  in.take(kModelMagic.size());
  const auto d = in.u64();
  const auto k = in.u64();
  if (d == 0 || k == 0 || k > d) throw FormatError("PCA model file has invalid dimensions");
  if (in.remaining() != 8 * (d + k * d + k + 1)) throw FormatError("PCA model file has the wrong size");
  PcaModel model;
  model.mean.resize(d);
  model.components.resize(k * d);
  model.eigenvalues.resize(k);
  for (auto& v : model.mean) v = in.f64();
  for (auto& v : model.components) v = in.f64();
  for (auto& v : model.eigenvalues) v = in.f64();
  model.total_variance = in.f64();
  return model;
}

void save_pca_model(const PcaModel& model, const std::filesystem::path& path) {
  io::write_file(path, serialize_pca_model(model));
}

PcaModel load_pca_model(const std::filesystem::path& path) {
  return parse_pca_model(io::read_file(path));
}

std::string_view to_string(ReducerKind::Kind kind) noexcept {
  switch (kind) {
    case ReducerKind::Kind::pca:
      return "pca";
    case ReducerKind::Kind::identity:
      return "identity";
    case ReducerKind::Kind::external_scores:
      break;
  }
  return "external_scores";
}

ReducerKind::Kind parse_reducer_kind(std::string_view text) {
  if (text == "pca") return ReducerKind::Kind::pca;
  if (text == "identity") return ReducerKind::Kind::identity;
  if (text == "external_scores") return ReducerKind::Kind::external_scores;
  throw InvalidArgument("unknown reducer '" + std::string(text) + "'");
}

std::size_t resolved_components(const ReducerKind& reducer, std::size_t d) {
  if (reducer.kind != ReducerKind::Kind::pca) return d;
  if (reducer.k == 0) return std::min(kDefaultPcaComponents, d);
  return reducer.k;
}

}  // namespace shiftscope
