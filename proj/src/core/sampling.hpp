#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <string_view>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "core/matrix_core.hpp"

namespace roy {

/// Reproducible random stream keyed by (seed, stream_id). Two streams built
/// from the same key produce bit-identical sequences; distinct stream ids
/// give statistically independent sequences, so Monte Carlo replicate i can
/// own stream i regardless of how replicates are scheduled across threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return boost::random::uniform_real_distribution<double>(lo, hi)(engine_);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

/// Wishart scale matrix: identity, positive diagonal, or dense SPD. Copies
/// share immutable storage.
class ScaleMatrix {
 public:
  enum class Kind { identity, diagonal, dense };

  static ScaleMatrix identity(Index p);
  static ScaleMatrix diagonal(Vector values);
  static ScaleMatrix dense(Matrix entries);

  Kind kind() const noexcept { return kind_; }
  Index order() const noexcept { return order_; }
  bool is_identity() const noexcept { return kind_ == Kind::identity; }

  /// Diagonal entries (ones for identity).
  Vector diagonal_values() const;
  Matrix to_dense() const;

  /// g <- F g with F F^T = Sigma (lower Cholesky factor for the dense case).
  void apply_root(Eigen::Ref<Matrix> g) const;

  /// h^T Sigma h.
  Matrix congruence(const Eigen::Ref<const Matrix>& h) const;

  double trace() const;
  double trace_of_square() const;

  ScaleMatrix scaled(double c) const;

 private:
  Kind kind_ = Kind::identity;
  Index order_ = 0;
  std::shared_ptr<const Vector> diagonal_;
  std::shared_ptr<const Matrix> dense_;
  std::shared_ptr<const Matrix> cholesky_;
};

/// Reads a p x p scale matrix from CSV (no header). A matrix whose
/// off-diagonal entries are all zero is returned as a diagonal scale.
ScaleMatrix load_scale_csv(const std::filesystem::path& path);

/// Generation law for random scale matrices.
struct ScaleLaw {
  enum class Kind { identity, uniform_diagonal, lognormal_diagonal, dense_wishart };

  Kind kind = Kind::uniform_diagonal;
  double first = 0.5;   // uniform: lower bound; lognormal: sigma
  double second = 2.0;  // uniform: upper bound

  /// Accepts "identity", "uniform", "uniform:LO:HI", "lognormal",
  /// "lognormal:SIGMA" and "dense".
  static ScaleLaw parse(std::string_view text);
  std::string to_string() const;
};

ScaleMatrix sample_random_scale(RngStream& rng, Index p, const ScaleLaw& law = {});

/// p x n matrix whose columns are independent N_p(0, Sigma) vectors, filled
/// column by column from the stream.
Matrix sample_normal_matrix(RngStream& rng, Index p, Index n, const ScaleMatrix& scale);

/// W_p(dof, Sigma) kept in factor form: the realized matrix is Z Z^T.
struct WishartSample {
  Matrix factor;
  Index dof = 0;
  ScaleMatrix scale;

  Index dimension() const noexcept { return factor.rows(); }
  Matrix realized() const { return factor * factor.transpose(); }
};

WishartSample sample_wishart(RngStream& rng, Index p, Index dof, const ScaleMatrix& scale);

}  // namespace roy
