#include "core/sampling.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace roy {
namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  // seed_seq's mixing algorithm is fixed by the standard, so the engine state
  // is identical on every conforming implementation.
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                    0x526f7945u};
  return std::mt19937_64(seq);
}

void require_order(Index p, const char* what) {
  if (p < 1) throw InvalidArgument(std::string(what) + ": order must be >= 1");
}

double parse_number(std::string_view s, std::string_view whole) {
  try {
    std::size_t used = 0;
    const std::string copy(s);
    const double v = std::stod(copy, &used);
    if (used != copy.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("scale law '" + std::string(whole) + "': bad number '" + std::string(s) + "'");
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

ScaleMatrix ScaleMatrix::identity(Index p) {
  require_order(p, "ScaleMatrix::identity");
  ScaleMatrix s;
  s.kind_ = Kind::identity;
  s.order_ = p;
  return s;
}

ScaleMatrix ScaleMatrix::diagonal(Vector values) {
  require_order(values.size(), "ScaleMatrix::diagonal");
  if (!values.allFinite() || !(values.minCoeff() > 0.0)) {
    throw NotPositiveDefinite("ScaleMatrix::diagonal: entries must be finite and positive");
  }
  ScaleMatrix s;
  s.kind_ = Kind::diagonal;
  s.order_ = values.size();
  s.diagonal_ = std::make_shared<const Vector>(std::move(values));
  return s;
}

ScaleMatrix ScaleMatrix::dense(Matrix entries) {
  if (entries.rows() != entries.cols()) throw InvalidArgument("ScaleMatrix::dense: matrix must be square");
  require_order(entries.rows(), "ScaleMatrix::dense");
  if (!entries.allFinite()) throw NotPositiveDefinite("ScaleMatrix::dense: non-finite entries");
  SymMatrix sym(std::move(entries), 1e-10);
  Eigen::LLT<Matrix> llt(sym.dense());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("ScaleMatrix::dense: Cholesky factorization failed");
  }
  ScaleMatrix s;
  s.kind_ = Kind::dense;
  s.order_ = sym.order();
  s.cholesky_ = std::make_shared<const Matrix>(llt.matrixL());
  s.dense_ = std::make_shared<const Matrix>(sym.dense());
  return s;
}

Vector ScaleMatrix::diagonal_values() const {
  switch (kind_) {
    case Kind::identity: return Vector::Ones(order_);
    case Kind::diagonal: return *diagonal_;
    case Kind::dense: return dense_->diagonal();
  }
  return {};
}

Matrix ScaleMatrix::to_dense() const {
  switch (kind_) {
    case Kind::identity: return Matrix::Identity(order_, order_);
    case Kind::diagonal: return diagonal_->asDiagonal();
    case Kind::dense: return *dense_;
  }
  return {};
}

void ScaleMatrix::apply_root(Eigen::Ref<Matrix> g) const {
  if (g.rows() != order_) throw InvalidArgument("ScaleMatrix::apply_root: row count mismatch");
  switch (kind_) {
    case Kind::identity: return;
    case Kind::diagonal: g.array().colwise() *= diagonal_->array().sqrt(); return;
    case Kind::dense: g = cholesky_->triangularView<Eigen::Lower>() * g; return;
  }
}

Matrix ScaleMatrix::congruence(const Eigen::Ref<const Matrix>& h) const {
  if (h.rows() != order_) throw InvalidArgument("ScaleMatrix::congruence: row count mismatch");
  switch (kind_) {
    case Kind::identity: return h.transpose() * h;
    case Kind::diagonal: return h.transpose() * (diagonal_->asDiagonal() * h);
    case Kind::dense: return h.transpose() * (*dense_ * h);
  }
  return {};
}

double ScaleMatrix::trace() const {
  switch (kind_) {
    case Kind::identity: return static_cast<double>(order_);
    case Kind::diagonal: return diagonal_->sum();
    case Kind::dense: return dense_->trace();
  }
  return 0.0;
}

double ScaleMatrix::trace_of_square() const {
  switch (kind_) {
    case Kind::identity: return static_cast<double>(order_);
    case Kind::diagonal: return diagonal_->squaredNorm();
    case Kind::dense: return dense_->squaredNorm();
  }
  return 0.0;
}

ScaleMatrix ScaleMatrix::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("ScaleMatrix::scaled: factor must be positive");
  switch (kind_) {
    case Kind::identity: return diagonal(Vector::Constant(order_, c));
    case Kind::diagonal: return diagonal(c * *diagonal_);
    case Kind::dense: return dense(c * *dense_);
  }
  return *this;
}

ScaleMatrix load_scale_csv(const std::filesystem::path& path) {
  Matrix m = read_csv_matrix(path);
  if (m.rows() != m.cols()) {
    throw IoError(path.string() + ": scale matrix must be square, got " + std::to_string(m.rows()) + "x" +
                  std::to_string(m.cols()));
  }
  Matrix off = m;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() == 0.0) return ScaleMatrix::diagonal(m.diagonal());
  return ScaleMatrix::dense(std::move(m));
}

ScaleLaw ScaleLaw::parse(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  ScaleLaw law;
  const std::string_view name = parts.front();
  if (name == "identity" && parts.size() == 1) {
    law.kind = Kind::identity;
  } else if (name == "uniform" && (parts.size() == 1 || parts.size() == 3)) {
    law.kind = Kind::uniform_diagonal;
    if (parts.size() == 3) {
      law.first = parse_number(parts[1], text);
      law.second = parse_number(parts[2], text);
    }
    if (!(law.first > 0.0 && law.second >= law.first)) {
      throw InvalidArgument("scale law '" + std::string(text) + "': need 0 < LO <= HI");
    }
  } else if (name == "lognormal" && parts.size() <= 2) {
    law.kind = Kind::lognormal_diagonal;
    law.first = parts.size() == 2 ? parse_number(parts[1], text) : 0.5;
    law.second = 0.0;
    if (!(law.first >= 0.0)) throw InvalidArgument("scale law '" + std::string(text) + "': sigma must be >= 0");
  } else if (name == "dense" && parts.size() == 1) {
    law.kind = Kind::dense_wishart;
  } else {
    throw InvalidArgument("unknown scale law '" + std::string(text) +
                          "' (expected identity, uniform[:LO:HI], lognormal[:SIGMA] or dense)");
  }
  return law;
}

std::string ScaleLaw::to_string() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::identity: out << "identity"; break;
    case Kind::uniform_diagonal: out << "uniform:" << first << ':' << second; break;
    case Kind::lognormal_diagonal: out << "lognormal:" << first; break;
    case Kind::dense_wishart: out << "dense"; break;
  }
  return out.str();
}

ScaleMatrix sample_random_scale(RngStream& rng, Index p, const ScaleLaw& law) {
  require_order(p, "sample_random_scale");
  switch (law.kind) {
    case ScaleLaw::Kind::identity:
      return ScaleMatrix::identity(p);
    case ScaleLaw::Kind::uniform_diagonal: {
      Vector d(p);
      for (Index i = 0; i < p; ++i) d(i) = rng.uniform(law.first, law.second);
      return ScaleMatrix::diagonal(std::move(d));
    }
    case ScaleLaw::Kind::lognormal_diagonal: {
      Vector d(p);
      for (Index i = 0; i < p; ++i) d(i) = std::exp(law.first * rng.normal());
      return ScaleMatrix::diagonal(std::move(d));
    }
    case ScaleLaw::Kind::dense_wishart: {
      // G G^T / k with k = 4p has condition number near 9.
      const Index k = 4 * p;
      const Matrix g = sample_normal_matrix(rng, p, k, ScaleMatrix::identity(p));
      Matrix s = Matrix::Zero(p, p);
      s.selfadjointView<Eigen::Lower>().rankUpdate(g, 1.0 / static_cast<double>(k));
      s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
      return ScaleMatrix::dense(std::move(s));
    }
  }
  return ScaleMatrix::identity(p);
}

Matrix sample_normal_matrix(RngStream& rng, Index p, Index n, const ScaleMatrix& scale) {
  if (p < 1 || n < 1) throw InvalidArgument("sample_normal_matrix: p and n must be >= 1");
  if (scale.order() != p) throw InvalidArgument("sample_normal_matrix: scale order differs from p");
  Matrix z(p, n);
  double* data = z.data();
  for (Index k = 0; k < p * n; ++k) data[k] = rng.normal();
  scale.apply_root(z);
  return z;
}

WishartSample sample_wishart(RngStream& rng, Index p, Index dof, const ScaleMatrix& scale) {
  if (dof < 1) throw InvalidArgument("sample_wishart: dof must be >= 1");
  return WishartSample{sample_normal_matrix(rng, p, dof, scale), dof, scale};
}

}  // namespace roy
