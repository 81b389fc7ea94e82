#pragma once

// Doubly singular beta ensemble: A ~ W_p(m, Sigma), B ~ W_p(q, Sigma) with
// p > max(m, q). The largest root is the largest generalized eigenvalue of
// B e = lambda A e on the range of A, i.e. the largest eigenvalue of B A^+.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/matrix_core.hpp"
#include "core/parallel.hpp"
#include "core/sampling.hpp"

namespace roy {

struct EnsembleParams {
  Index p = 0;
  Index m = 0;
  Index q = 0;

  /// Throws InvalidParams unless p > max(m, q) >= 1.
  void validate() const;
  Index root_count() const noexcept { return m < q ? m : q; }

  friend bool operator==(const EnsembleParams&, const EnsembleParams&) = default;
};

/// One realization of the ensemble in factor form: A = Za Za^T, B = Zb Zb^T.
/// The A factor is drawn from the stream before the B factor.
struct EnsembleDraw {
  WishartSample a;
  WishartSample b;
};

EnsembleDraw draw_ensemble(RngStream& rng, const EnsembleParams& params, const ScaleMatrix& scale);

/// All min(m, q) roots, descending, from the reduced form
/// V^T (C L C)^{-1} V with V = C H^T Zb and C = (H^T Sigma H)^{-1/2}, where
/// (H, L) is the nonzero eigensystem of A. Works in O(p m^2) without forming
/// any p x p matrix.
Vector reduced_spectrum(const EnsembleDraw& draw);
double largest_root_reduced(const EnsembleDraw& draw);

/// Operator-norm distance ||p b (C L C)^{-1} - I_m|| for the A-part of a
/// draw, b = (tr S / p)^2 / (tr S^2 / p). Tends to 0 as p grows.
double limit_deviation(const EnsembleDraw& draw);
double largest_root_reduced(RngStream& rng, const EnsembleParams& params, const ScaleMatrix& scale);

/// Roots of T^T B T = Lambda, T^T A T = I_m. `transform` is the p x m matrix
/// T = T1 T2 (columns ordered like the full descending generalized spectrum),
/// present only when requested.
struct GeneralizedEigenSolution {
  Vector roots;
  std::optional<Matrix> transform;
};

/// Dense route: materializes A and B, forms A^+ from the p x p
/// eigendecomposition and reads the roots off Zb^T A^+ Zb. Intended for
/// p up to a few hundred.
GeneralizedEigenSolution solve_direct(const EnsembleDraw& draw, bool with_transform = false);
GeneralizedEigenSolution largest_root_direct(RngStream& rng, const EnsembleParams& params,
                                             const ScaleMatrix& scale, bool with_transform = false);

/// Right-continuous empirical CDF of a sample.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples, std::size_t resampled = 0);

  double operator()(double x) const;
  std::size_t size() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted_samples() const noexcept { return sorted_; }
  /// Replicates that hit a rank-deficient draw and were redrawn.
  std::size_t resampled_count() const noexcept { return resampled_; }

  /// CSV with header "x,F": one row per sorted sample, F = i/n.
  void write_csv(std::ostream& out) const;

 private:
  std::vector<double> sorted_;
  std::size_t resampled_;
};

struct SimulationOptions {
  unsigned workers = default_worker_count();
  /// Redraws allowed per replicate after a RankDeficient draw.
  int max_retries = 3;
};

/// Stream id used for retry `attempt` (0 = first try) of replicate `index`.
std::uint64_t replicate_stream_id(std::uint64_t index, int attempt) noexcept;

/// Runs `replicate` once per index on its own RngStream(seed, index). A
/// replicate throwing RankDeficient is rerun on a fresh stream; after
/// max_retries redraws the campaign aborts with ResampleCapExceeded.
/// Output order is by replicate index whatever the worker count.
template <class Result>
std::vector<Result> run_replicates_of(std::uint64_t seed, std::size_t n,
                                      const std::function<Result(RngStream&)>& replicate,
                                      const SimulationOptions& options = {}, std::size_t* resampled = nullptr) {
  std::vector<Result> out(n);
  std::vector<int> retries(n, 0);
  parallel_for(n, options.workers, [&](std::size_t i) {
    for (int attempt = 0;; ++attempt) {
      RngStream rng(seed, replicate_stream_id(i, attempt));
      try {
        out[i] = replicate(rng);
        retries[i] = attempt;
        return;
      } catch (const RankDeficient& e) {
        if (attempt >= options.max_retries) {
          throw ResampleCapExceeded("replicate " + std::to_string(i) + " stayed rank deficient after " +
                                    std::to_string(options.max_retries) + " redraws: " + e.what());
        }
      }
    }
  });
  if (resampled) {
    *resampled = 0;
    for (int r : retries) *resampled += static_cast<std::size_t>(r);
  }
  return out;
}

inline std::vector<double> run_replicates(std::uint64_t seed, std::size_t n,
                                          const std::function<double(RngStream&)>& replicate,
                                          const SimulationOptions& options = {}, std::size_t* resampled = nullptr) {
  return run_replicates_of<double>(seed, n, replicate, options, resampled);
}

EmpiricalCdf simulate_empirical_cdf(std::uint64_t seed, const EnsembleParams& params, const ScaleMatrix& scale,
                                    std::size_t n_sims, const SimulationOptions& options = {});

}  // namespace roy
