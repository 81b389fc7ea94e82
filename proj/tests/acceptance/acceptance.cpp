// Acceptance suite: one PASS/FAIL line per criterion, thresholds pinned
// below. Exit status is nonzero when any criterion fails.
//
//   roy-exact-acceptance [--only N[,N...]]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>

#include "core/beta_ensemble.hpp"
#include "core/cdf_dispatch.hpp"
#include "core/exact_dist.hpp"
#include "core/goodness_of_fit.hpp"
#include "core/matrix_core.hpp"
#include "core/scale_correction.hpp"

using namespace roy;
namespace fs = std::filesystem;

namespace {

// Criterion thresholds.
constexpr double kKsExactLargeP = 0.02;       // 1
constexpr double kKsExactSmallP = 0.006;      // 2
constexpr double kClosedFormTol = 1e-8;       // 3
constexpr double kDualityTol = 1e-10;         // 4
constexpr double kDualityMcKs = 0.006;        // 4, Monte Carlo side check (n = 1e5)
constexpr double kKsTheorem1 = 0.03;          // 5
constexpr double kKsCorrectedFixed = 0.05;    // 6
constexpr double kMeanBHatTol = 0.05;         // 7
constexpr double kTwSup = 0.05;               // 8
constexpr double kPathRelTol = 1e-8;          // 9
constexpr double kPfaffianRelTol = 1e-8;      // 10
constexpr double kMoorePenroseTol = 1e-9;     // 10

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <class... Args>
  void add(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    if (!text_.empty()) text_ += "; ";
    text_ += buf;
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double ks_against(const std::vector<double>& sample, const std::function<double(double)>& cdf) {
  return ks_distance(EmpiricalCdf(sample), cdf);
}

std::vector<double> simulate(const EnsembleParams& params, const ScaleMatrix& scale, std::uint64_t seed,
                             std::size_t n) {
  return simulate_empirical_cdf(seed, params, scale, n).sorted_samples();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// 1. Exact law at finite p.
Outcome exact_large_p() {
  Outcome o;
  Detail d;
  for (Index p : {200, 500, 1000, 2000}) {
    const EnsembleParams params{p, 100, 6};
    const DoubleWishartLargestRoot exact(ensemble_double_wishart(params));
    const double ks = ks_against(simulate(params, ScaleMatrix::identity(p), kSeed, 10000),
                                 [&](double x) { return exact.cdf(x); });
    o.pass = o.pass && ks <= kKsExactLargeP;
    d.add("p=%ld KS=%.4f", static_cast<long>(p), ks);
  }
  d.add("threshold %.3f", kKsExactLargeP);
  o.detail = d.str();
  return o;
}

// 2. Exact law at small p.
Outcome exact_small_p() {
  const EnsembleParams params{12, 8, 3};
  const DoubleWishartLargestRoot exact(ensemble_double_wishart(params));
  const double ks =
      ks_against(simulate(params, ScaleMatrix::identity(12), kSeed, 100000), [&](double x) { return exact.cdf(x); });
  Detail d;
  d.add("(12,8,3) n=1e5 KS=%.4f threshold %.3f", ks, kKsExactSmallP);
  return {ks <= kKsExactSmallP, d.str()};
}

// 3. One root against the F distribution.
Outcome closed_form() {
  Outcome o;
  double worst = 0.0;
  const std::pair<long, long> cases[] = {{1, 1}, {1, 30}, {4, 9}, {6, 406}, {100, 906}, {96, 1904}, {25, 3}};
  for (const auto& [num, den] : cases) {
    const boost::math::fisher_f_distribution<double> f(static_cast<double>(num), static_cast<double>(den));
    const double scale = static_cast<double>(num) / static_cast<double>(den);
    const DoubleWishartLargestRoot law(DoubleWishartParams{1, num, den});
    const double lo = scale * boost::math::quantile(f, 0.001);
    const double hi = scale * boost::math::quantile(f, 0.999);
    for (double x : linear_grid(lo, hi, 100)) {
      worst = std::max(worst, std::abs(law.cdf(x) - boost::math::cdf(f, x / scale)));
    }
  }
  // q = 1 in the ensemble: (p, m, 1) -> one root with num = m, den = p - m + 1.
  for (const EnsembleParams& params : {EnsembleParams{5, 2, 1}, EnsembleParams{500, 100, 1}}) {
    const long num = params.m, den = params.p - params.m + 1;
    const boost::math::fisher_f_distribution<double> f(static_cast<double>(num), static_cast<double>(den));
    const double scale = static_cast<double>(num) / static_cast<double>(den);
    for (double x : linear_grid(scale * boost::math::quantile(f, 0.001), scale * boost::math::quantile(f, 0.999), 100)) {
      worst = std::max(worst, std::abs(theorem3_cdf(params, x) - boost::math::cdf(f, x / scale)));
    }
  }
  Detail d;
  d.add("max |F - F_oracle| = %.2e over 9 laws x 100 points, tolerance %.0e", worst, kClosedFormTol);
  return {worst <= kClosedFormTol, d.str()};
}

// Largest eigenvalue of W_s(num) W_s(den)^{-1} drawn directly (numerator
// may be singular).
double draw_double_wishart(RngStream& rng, const DoubleWishartParams& p) {
  const ScaleMatrix id = ScaleMatrix::identity(p.dimension);
  const Matrix a = sample_wishart(rng, p.dimension, p.num_dof, id).realized();
  const Matrix b = sample_wishart(rng, p.dimension, p.den_dof, id).realized();
  const Eigen::LLT<Matrix> llt(b);
  const Matrix l_inv = llt.matrixL().solve(Matrix::Identity(p.dimension, p.dimension));
  const Matrix c = l_inv * a * l_inv.transpose();
  return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (c + c.transpose()), Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

// 4. Duality.
Outcome duality() {
  std::mt19937_64 gen(kSeed);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index s = std::uniform_int_distribution<Index>(1, 40)(gen);
    const Index num = std::uniform_int_distribution<Index>(1, 60)(gen);
    const Index den = s + std::uniform_int_distribution<Index>(0, 200)(gen);
    const DoubleWishartParams params{s, num, den};
    const DoubleWishartLargestRoot a(params);
    const DoubleWishartLargestRoot b(mardia_dual(params));
    const double hi = quantile([&](double x) { return a.cdf(x); }, 0.999);
    for (double x : linear_grid(0.0, hi, 100)) worst = std::max(worst, std::abs(a.cdf(x) - b.cdf(x)));
  }
  // Both sides above share one canonical law, so also check a singular
  // numerator (num < s) against direct simulation of the original matrices.
  double worst_ks = 0.0;
  for (const DoubleWishartParams& params : {DoubleWishartParams{12, 3, 30}, DoubleWishartParams{20, 6, 25}}) {
    const DoubleWishartLargestRoot law(params);
    const std::vector<double> sample = run_replicates(
        kSeed, 100000, [&](RngStream& rng) { return draw_double_wishart(rng, params); });
    worst_ks = std::max(worst_ks, ks_against(sample, [&](double x) { return law.cdf(x); }));
  }
  Detail d;
  d.add("20 triples: max |F - F_dual| = %.2e (tolerance %.0e)", worst, kDualityTol);
  d.add("singular-numerator Monte Carlo max KS = %.4f (threshold %.3f)", worst_ks, kDualityMcKs);
  return {worst <= kDualityTol && worst_ks <= kDualityMcKs, d.str()};
}

// 5. Large-p approximation under the identity.
Outcome theorem1_asymptotics() {
  constexpr std::size_t kBatches = 5, kBatchSize = 2000;
  std::vector<double> medians;
  double ks_at_max = 0.0;
  Detail d;
  for (Index p : {500, 1250, 2000}) {
    const EnsembleParams params{p, 96, 4};
    const WishartLargestRoot w(4, 96);
    const auto approx = [&](double x) { return w.cdf(static_cast<double>(p) * x); };
    std::vector<double> pooled, batch_ks;
    for (std::size_t k = 0; k < kBatches; ++k) {
      const std::vector<double> s = simulate(params, ScaleMatrix::identity(p), kSeed + k, kBatchSize);
      batch_ks.push_back(ks_against(s, approx));
      pooled.insert(pooled.end(), s.begin(), s.end());
    }
    medians.push_back(median(batch_ks));
    const double ks = ks_against(pooled, approx);
    if (p == 2000) ks_at_max = ks;
    d.add("p=%ld KS=%.4f median batch KS=%.4f", static_cast<long>(p), ks, medians.back());
  }
  const bool decreasing = medians[1] < medians[0] && medians[2] < medians[1];
  d.add("KS(p=2000) threshold %.2f; median decreasing: %s", kKsTheorem1, decreasing ? "yes" : "no");
  return {ks_at_max <= kKsTheorem1 && decreasing, d.str()};
}

struct Replicate {
  double lambda = 0.0;
  double b_hat = 0.0;
};

// 6. Scale correction.
Outcome theorem2_correction() {
  constexpr std::size_t kCampaigns = 11, kReplicates = 100;
  const ScaleLaw law = ScaleLaw::parse("uniform:0.5:2");
  bool pass = true;
  Detail d;
  for (Index p : {500, 875, 1250, 1625, 2000}) {
    const EnsembleParams params{p, 96, 4};
    const WishartLargestRoot w(4, 96);
    const auto approx = [&](double x) { return w.cdf(static_cast<double>(p) * x); };
    std::vector<double> ks_corrected, ks_uncorrected;
    for (std::size_t c = 0; c < kCampaigns; ++c) {
      const std::vector<Replicate> reps = run_replicates_of<Replicate>(
          kSeed + c, kReplicates, [&](RngStream& rng) {
            const ScaleMatrix sigma = sample_random_scale(rng, p, law);
            const EnsembleDraw draw = draw_ensemble(rng, params, sigma);
            return Replicate{largest_root_reduced(draw), estimate_scale_moments(draw.a, params.m, p).b};
          });
      std::vector<double> corrected, uncorrected;
      for (const Replicate& r : reps) {
        corrected.push_back(r.b_hat * r.lambda);
        uncorrected.push_back(r.lambda);
      }
      ks_corrected.push_back(ks_against(corrected, approx));
      ks_uncorrected.push_back(ks_against(uncorrected, approx));
    }
    const double mc = median(ks_corrected), mu = median(ks_uncorrected);
    pass = pass && mc <= mu;
    d.add("p=%ld median KS corrected %.4f vs uncorrected %.4f", static_cast<long>(p), mc, mu);
  }
  RngStream scale_rng(kSeed, std::uint64_t{1} << 62);
  const ScaleMatrix sigma = sample_random_scale(scale_rng, 2000, law);
  const ScaleStats stats = scale_moments_exact(sigma);
  const EnsembleParams params{2000, 96, 4};
  const std::vector<double> sample = simulate(params, sigma, kSeed, 10000);
  const double ks_fixed = ks_against(sample, [&](double x) { return theorem2_cdf(params, stats, x); });
  pass = pass && ks_fixed <= kKsCorrectedFixed;
  d.add("fixed scale p=2000 b=%.4f corrected KS=%.4f threshold %.2f", stats.b, ks_fixed, kKsCorrectedFixed);
  return {pass, d.str()};
}

// 7. Moment estimator.
Outcome estimator_consistency() {
  auto draws = [](Index p) {
    return run_replicates(kSeed, 100, [p](RngStream& rng) {
      return estimate_scale_moments(sample_wishart(rng, p, 96, ScaleMatrix::identity(p)), 96, p).b;
    });
  };
  auto sd = [](const std::vector<double>& v) {
    const double mu = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
  };
  const std::vector<double> b1000 = draws(1000);
  const double mean = std::accumulate(b1000.begin(), b1000.end(), 0.0) / 100.0;
  const double sd500 = sd(draws(500)), sd2000 = sd(draws(2000));
  Detail d;
  d.add("p=1000 mean b_hat=%.4f (tolerance %.2f); SD p=500 %.5f > p=2000 %.5f", mean, kMeanBHatTol, sd500, sd2000);
  return {std::abs(mean - 1.0) <= kMeanBHatTol && sd2000 < sd500, d.str()};
}

// 8. Tracy-Widom approximation.
Outcome tracy_widom() {
  const EnsembleParams params{1000, 100, 6};
  const DoubleWishartLargestRoot exact(ensemble_double_wishart(params));
  const auto f = [&](double x) { return exact.cdf(x); };
  const std::vector<double> grid = linear_grid(quantile(f, 0.01), quantile(f, 0.99), 1000);
  const double sup = sup_difference([&](double x) { return tw_cdf(params, x); }, f, grid);
  Detail d;
  d.add("sup |F_tw - F_exact| over central 98%% = %.4f threshold %.2f", sup, kTwSup);
  return {sup <= kTwSup, d.str()};
}

// 9. Reduced vs direct path.
Outcome path_equivalence() {
  double worst = 0.0;
  const EnsembleParams params{200, 30, 8};
  RngStream scale_rng(kSeed, std::uint64_t{1} << 62);
  const ScaleMatrix dense = sample_random_scale(scale_rng, 200, ScaleLaw::parse("dense"));
  for (const ScaleMatrix& sigma : {ScaleMatrix::identity(200), dense}) {
    for (std::uint64_t i = 0; i < 200; ++i) {
      RngStream rng(kSeed, i);
      const EnsembleDraw draw = draw_ensemble(rng, params, sigma);
      const Vector reduced = reduced_spectrum(draw);
      const Vector direct = solve_direct(draw).roots;
      for (Index k = 0; k < reduced.size(); ++k) worst = std::max(worst, rel(direct(k), reduced(k)));
    }
  }
  Detail d;
  d.add("(200,30,8) 200 draws x {identity, dense}: max relative spectrum gap %.2e tolerance %.0e", worst,
        kPathRelTol);
  return {worst <= kPathRelTol, d.str()};
}

// 10. Kernel properties and curve sanity.
Outcome kernel_properties() {
  std::mt19937_64 gen(kSeed);
  std::normal_distribution<double> n01;
  auto random_matrix = [&](Index r, Index c) {
    Matrix m(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) m(i, j) = n01(gen);
    return m;
  };
  double worst_pf = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 * (1 + t % 20);
    const Matrix g = random_matrix(n, n);
    const Matrix s = g - g.transpose();
    const double pf = pfaffian(SkewMatrix(s));
    worst_pf = std::max(worst_pf, rel(pf * pf, s.fullPivLu().determinant()));
  }
  double worst_mp = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + t % 39;
    const Index r = 1 + static_cast<Index>(gen() % static_cast<std::uint64_t>(n));
    const Matrix z = random_matrix(n, r);
    const Matrix m = z * z.transpose();
    const Matrix mp = pseudoinverse(SymMatrix(m)).dense();
    const Matrix mmp = m * mp, mpm = mp * m;
    worst_mp = std::max({worst_mp, (m * mp * m - m).norm() / m.norm(), (mp * m * mp - mp).norm() / mp.norm(),
                         (mmp - mmp.transpose()).norm() / std::max(1.0, mmp.norm()),
                         (mpm - mpm.transpose()).norm() / std::max(1.0, mpm.norm())});
  }
  bool curves_ok = true;
  int curves = 0;
  for (const EnsembleParams& params :
       {EnsembleParams{12, 8, 3}, EnsembleParams{1000, 100, 6}, EnsembleParams{2000, 96, 4}}) {
    const DoubleWishartLargestRoot exact(ensemble_double_wishart(params));
    const double hi = 1.5 * quantile([&](double x) { return exact.cdf(x); }, 0.9999);
    const std::vector<double> grid = linear_grid(0.0, hi, 512);
    for (Method method : {Method::exact, Method::theorem1, Method::theorem2, Method::tw}) {
      const LargestRootCdf cdf(params, method, method == Method::theorem2 ? std::optional<double>(0.8) : std::nullopt);
      const CdfCurve curve = cdf_curve([&](double x) { return cdf.evaluate(x); }, grid);
      ++curves;
      for (std::size_t i = 0; i < curve.cdf.size(); ++i) {
        curves_ok = curves_ok && curve.cdf[i] >= 0.0 && curve.cdf[i] <= 1.0 &&
                    (i == 0 || curve.cdf[i] >= curve.cdf[i - 1]);
      }
    }
  }
  Detail d;
  d.add("Pf^2 vs det max rel %.2e (tol %.0e)", worst_pf, kPfaffianRelTol);
  d.add("Moore-Penrose max rel %.2e (tol %.0e)", worst_mp, kMoorePenroseTol);
  d.add("%d curves monotone in [0,1]: %s", curves, curves_ok ? "yes" : "no");
  return {worst_pf <= kPfaffianRelTol && worst_mp <= kMoorePenroseTol && curves_ok, d.str()};
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 11. Worker-count independence of the CLI.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "roy_acceptance_determinism";
  fs::remove_all(root);
  const std::string base = std::string(ROY_EXACT_CLI) + " simulate --p 500 --m 100 --q 6 --n-sims 2000 --seed 7";
  const int c1 = run_command(base + " --workers 1 --out " + (root / "w1").string() + " > /dev/null");
  const int c8 = run_command(base + " --workers 8 --out " + (root / "w8").string() + " > /dev/null");
  const std::string a = slurp(root / "w1" / "empirical.csv");
  const std::string b = slurp(root / "w8" / "empirical.csv");
  fs::remove_all(root);
  const bool same = c1 == 0 && c8 == 0 && !a.empty() && a == b;
  Detail d;
  d.add("exit codes %d/%d, empirical.csv %zu bytes, identical: %s", c1, c8, a.size(), same ? "yes" : "no");
  return {same, d.str()};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion criteria[] = {
      {1, "exact law vs Monte Carlo, m=100 q=6, p in {200,500,1000,2000}", exact_large_p},
      {2, "exact law vs Monte Carlo at small p (12,8,3)", exact_small_p},
      {3, "one root matches the scaled F law", closed_form},
      {4, "duality invariance", duality},
      {5, "large-p approximation, m=96 q=4", theorem1_asymptotics},
      {6, "scale-corrected approximation under random diagonal scales", theorem2_correction},
      {7, "moment estimator consistency", estimator_consistency},
      {8, "Tracy-Widom approximation, (1000,100,6)", tracy_widom},
      {9, "reduced and direct spectra agree", path_equivalence},
      {10, "Pfaffian, pseudoinverse and curve properties", kernel_properties},
      {11, "simulate output independent of worker count", determinism},
  };

  std::set<int> only;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--only") {
      std::stringstream ss(argv[i + 1]);
      std::string item;
      while (std::getline(ss, item, ',')) only.insert(std::stoi(item));
    }
  }

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  criterion %2d  %s  [%s] (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
