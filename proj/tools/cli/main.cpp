// roy-exact: largest-root CDFs, p-values, simulation campaigns and
// Monte Carlo validation reports for the doubly singular beta ensemble.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "roy_exact/roy_exact.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitUnsupported = 3;
constexpr int kExitResampleCap = 4;
constexpr int kExitValidationFailed = 5;

// Stream reserved for drawing a random scale once per command.
constexpr std::uint64_t kScaleStream = std::uint64_t{1} << 62;

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_of(roy_status status) {
  switch (status) {
    case ROY_OK: return kExitOk;
    case ROY_ERR_UNSUPPORTED_PARAMS: return kExitUnsupported;
    case ROY_ERR_RESAMPLE_CAP: return kExitResampleCap;
    case ROY_ERR_INTERNAL: return kExitInternal;
    default: return kExitInvalid;
  }
}

struct ContextDeleter {
  void operator()(roy_context* c) const { roy_context_destroy(c); }
};
struct ScaleDeleter {
  void operator()(roy_scale* s) const { roy_scale_destroy(s); }
};
struct CdfDeleter {
  void operator()(roy_cdf* c) const { roy_cdf_destroy(c); }
};
struct EmpiricalDeleter {
  void operator()(roy_empirical* e) const { roy_empirical_destroy(e); }
};
using Context = std::unique_ptr<roy_context, ContextDeleter>;
using Scale = std::unique_ptr<roy_scale, ScaleDeleter>;
using Cdf = std::unique_ptr<roy_cdf, CdfDeleter>;
using Empirical = std::unique_ptr<roy_empirical, EmpiricalDeleter>;

void check(roy_status status, const roy_context* ctx) {
  if (status != ROY_OK) {
    std::string message = roy_context_last_error(ctx);
    if (message.empty()) message = roy_status_string(status);
    throw CliError{exit_code_of(status), message};
  }
}

Context make_context(unsigned workers) {
  roy_context* raw = nullptr;
  if (roy_context_create(&raw) != ROY_OK) throw CliError{kExitInternal, "cannot create library context"};
  Context ctx(raw);
  check(roy_context_set_workers(ctx.get(), workers), ctx.get());
  return ctx;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kExitInvalid, "cannot write " + path.string()};
  out << text;
  if (!out) throw CliError{kExitInvalid, "failed writing " + path.string()};
}

void warn(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

void report_warnings(unsigned flags) {
  if (flags & ROY_WARN_CONDITIONING) warn("exact engine reported reduced accuracy at some points");
  if (flags & ROY_WARN_REGIME) warn("Tracy-Widom approximation used with q > m/10; expect a rough fit");
  if (flags & ROY_WARN_B_ABOVE_ONE) warn("estimated correction factor b exceeds 1 (kept as estimated)");
}

// Manifest written next to every output set. Keys are sorted (json objects
// are ordered maps), so identical runs give identical files apart from the
// wall-clock field.
class Manifest {
 public:
  explicit Manifest(std::string command) : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["version"] = roy_version();
    doc_["outputs"] = json::array();
  }
  json& params() { return doc_["params"]; }
  void set(const std::string& key, json value) { doc_[key] = std::move(value); }
  void add_output(const fs::path& p) { doc_["outputs"].push_back(p.filename().string()); }
  void write(const fs::path& dir) {
    doc_["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_file(dir / "manifest.json", doc_.dump(2) + "\n");
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

struct CommonParams {
  std::int64_t p = 0;
  std::int64_t m = 0;
  std::int64_t q = 0;
  roy_params c() const { return {p, m, q}; }
  json to_json() const { return json{{"p", p}, {"m", m}, {"q", q}}; }
};

void add_ensemble_options(CLI::App* app, CommonParams& params, bool required) {
  auto* p = app->add_option("--p", params.p, "Dimension p (> max(m, q))");
  auto* m = app->add_option("--m", params.m, "Degrees of freedom of A");
  auto* q = app->add_option("--q", params.q, "Degrees of freedom of B");
  if (required) {
    p->required();
    m->required();
    q->required();
  }
}

roy_method method_of(const std::string& name) {
  if (name == "exact") return ROY_METHOD_EXACT;
  if (name == "theorem1") return ROY_METHOD_THEOREM1;
  if (name == "theorem2") return ROY_METHOD_THEOREM2;
  return ROY_METHOD_TW;
}

Cdf make_cdf(roy_context* ctx, const CommonParams& params, roy_method method, double b = 1.0) {
  roy_cdf* raw = nullptr;
  check(roy_cdf_create(ctx, params.c(), method, b, &raw), ctx);
  return Cdf(raw);
}

double quantile(roy_context* ctx, const roy_cdf* cdf, double prob) {
  double x = 0.0;
  check(roy_cdf_quantile(ctx, cdf, prob, &x), ctx);
  return x;
}

std::vector<double> evaluate_curve(roy_context* ctx, const roy_cdf* cdf, const std::vector<double>& grid,
                                   unsigned* warnings = nullptr) {
  std::vector<double> out(grid.size());
  unsigned flags = 0;
  check(roy_cdf_curve(ctx, cdf, grid.data(), grid.size(), out.data(), &flags), ctx);
  if (warnings) *warnings |= flags;
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

Scale scale_from_spec(roy_context* ctx, const std::string& spec, std::int64_t p, std::uint64_t seed) {
  roy_scale* raw = nullptr;
  if (spec == "identity") {
    check(roy_scale_identity(ctx, p, &raw), ctx);
  } else if (spec.rfind("random:", 0) == 0) {
    check(roy_scale_random(ctx, p, spec.substr(7).c_str(), seed, kScaleStream, &raw), ctx);
  } else {
    check(roy_scale_load_csv(ctx, spec.c_str(), &raw), ctx);
  }
  Scale scale(raw);
  if (roy_scale_order(scale.get()) != p) {
    throw CliError{kExitInvalid, "scale matrix order " + std::to_string(roy_scale_order(scale.get())) +
                                     " differs from p=" + std::to_string(p)};
  }
  return scale;
}

fs::path prepare_out(const std::string& dir) {
  fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw CliError{kExitInvalid, "cannot create output directory " + dir + ": " + ec.message()};
  return out;
}

// cdf ------------------------------------------------------------------

struct CdfArgs {
  CommonParams params;
  std::string method = "exact";
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::size_t grid_points = 512;
  std::optional<double> b;
  std::optional<std::string> sigma;
  std::string out = ".";
  unsigned workers = 0;
};

int run_cdf(const CdfArgs& a) {
  Manifest manifest("cdf");
  Context ctx = make_context(a.workers);
  const roy_method method = method_of(a.method);
  double b = 1.0;
  if (method == ROY_METHOD_THEOREM2) {
    if (a.b && a.sigma) throw CliError{kExitInvalid, "give either --b or --sigma, not both"};
    if (!a.b && !a.sigma) throw CliError{kExitInvalid, "--method theorem2 needs --b VALUE or --sigma FILE"};
    if (a.b) {
      b = *a.b;
    } else {
      Scale s = scale_from_spec(ctx.get(), *a.sigma, a.params.p, 0);
      roy_scale_stats stats{};
      check(roy_scale_moments(ctx.get(), s.get(), &stats), ctx.get());
      b = stats.b;
    }
  } else if (a.b || a.sigma) {
    throw CliError{kExitInvalid, "--b and --sigma apply only to --method theorem2"};
  }
  Cdf cdf = make_cdf(ctx.get(), a.params, method, b);
  report_warnings(roy_cdf_warnings(cdf.get()));

  const double lo = a.grid_min.value_or(0.0);
  const double hi = a.grid_max ? *a.grid_max : quantile(ctx.get(), cdf.get(), 0.9999);
  if (!(hi >= lo) || lo < 0.0) throw CliError{kExitInvalid, "grid needs 0 <= grid-min <= grid-max"};
  const std::vector<double> grid = linear_grid(lo, hi, a.grid_points);
  unsigned flags = 0;
  const std::vector<double> f = evaluate_curve(ctx.get(), cdf.get(), grid, &flags);
  report_warnings(flags);

  const fs::path dir = prepare_out(a.out);
  std::string csv = "x,F\n";
  for (std::size_t i = 0; i < grid.size(); ++i) csv += fmt(grid[i]) + "," + fmt(f[i]) + "\n";
  write_file(dir / "cdf.csv", csv);

  manifest.params() = a.params.to_json();
  manifest.params()["method"] = a.method;
  manifest.params()["grid_min"] = lo;
  manifest.params()["grid_max"] = hi;
  manifest.params()["grid_points"] = a.grid_points;
  manifest.params()["b"] = method == ROY_METHOD_THEOREM2 ? json(b) : json(nullptr);
  manifest.params()["sigma"] = a.sigma ? json(*a.sigma) : json(nullptr);
  manifest.set("seed", nullptr);
  manifest.add_output(dir / "cdf.csv");
  manifest.write(dir);
  return kExitOk;
}

// pvalue ---------------------------------------------------------------

struct PvalueArgs {
  CommonParams params;
  double stat = 0.0;
  std::string method = "exact";
  std::optional<double> b;
  std::optional<std::string> data;
  bool realized = false;
  std::optional<std::string> out;
};

int run_pvalue(const PvalueArgs& a) {
  Manifest manifest("pvalue");
  Context ctx = make_context(1);
  roy_method method = method_of(a.method);
  std::optional<double> b = a.b;
  unsigned flags = 0;
  if (a.data) {
    // Data always means the scale-corrected approximation.
    method = ROY_METHOD_THEOREM2;
    roy_scale_stats stats{};
    check(roy_estimate_scale_moments_csv(ctx.get(), a.data->c_str(), a.realized ? 1 : 0, a.params.m, &stats,
                                         &flags),
          ctx.get());
    b = stats.b;
  }
  if (method == ROY_METHOD_THEOREM2 && !b) throw CliError{kExitInvalid, "--method theorem2 needs --b or --data"};
  Cdf cdf = make_cdf(ctx.get(), a.params, method, b.value_or(1.0));
  flags |= roy_cdf_warnings(cdf.get());
  double pv = 0.0;
  check(roy_cdf_p_value(ctx.get(), cdf.get(), a.stat, &pv), ctx.get());
  report_warnings(flags);

  const char* names[] = {"exact", "theorem1", "theorem2", "tw"};
  json result;
  result["p_value"] = pv;
  result["method"] = names[method];
  result["params"] = a.params.to_json();
  result["stat"] = a.stat;
  result["b_used"] = method == ROY_METHOD_THEOREM2 ? json(*b) : json(nullptr);
  std::cout << result.dump() << '\n';

  if (a.out) {
    const fs::path dir = prepare_out(*a.out);
    write_file(dir / "pvalue.json", result.dump(2) + "\n");
      manifest.params() = a.params.to_json();
    manifest.params()["stat"] = a.stat;
    manifest.params()["method"] = a.method;
    manifest.params()["b"] = a.b ? json(*a.b) : json(nullptr);
    manifest.params()["data"] = a.data ? json(*a.data) : json(nullptr);
    manifest.params()["realized"] = a.realized;
    manifest.set("seed", nullptr);
    manifest.add_output(dir / "pvalue.json");
    manifest.write(dir);
  }
  return kExitOk;
}

// simulate -------------------------------------------------------------

struct SimulateArgs {
  CommonParams params;
  std::size_t n_sims = 10000;
  std::uint64_t seed = 1;
  std::string sigma = "identity";
  unsigned workers = 0;
  std::string out = ".";
};

int run_simulate(const SimulateArgs& a) {
  Manifest manifest("simulate");
  Context ctx = make_context(a.workers);
  Scale scale = scale_from_spec(ctx.get(), a.sigma, a.params.p, a.seed);
  roy_empirical* raw = nullptr;
  check(roy_simulate(ctx.get(), a.params.c(), scale.get(), a.seed, a.n_sims, &raw), ctx.get());
  Empirical emp(raw);
  const fs::path dir = prepare_out(a.out);
  check(roy_empirical_write_csv(ctx.get(), emp.get(), (dir / "empirical.csv").string().c_str()), ctx.get());
  const std::size_t resampled = roy_empirical_resampled(emp.get());
  if (resampled > 0) warn(std::to_string(resampled) + " rank-deficient draws were redrawn");

  manifest.params() = a.params.to_json();
  manifest.params()["n_sims"] = a.n_sims;
  manifest.params()["sigma"] = a.sigma;
  manifest.set("seed", a.seed);
  manifest.set("resampled", resampled);
  manifest.add_output(dir / "empirical.csv");
  manifest.write(dir);
  return kExitOk;
}

// validate -------------------------------------------------------------

struct ValidateArgs {
  std::string figure;
  std::optional<std::size_t> n_sims;
  std::uint64_t seed = 1;
  std::vector<std::int64_t> p_values;
  std::optional<std::int64_t> m;
  std::optional<std::int64_t> q;
  std::size_t grid_points = 512;
  std::size_t campaigns = 11;
  std::size_t batches = 5;
  std::size_t fixed_sims = 10000;
  std::string sigma_law = "uniform:0.5:2";
  unsigned workers = 0;
  std::string out = ".";
};

// Thresholds of the validation report.
constexpr double kKsExact = 0.02;
constexpr double kSupTw = 0.05;
constexpr double kKsTheorem1 = 0.03;
constexpr double kKsCorrectedFixed = 0.05;
// Report grids span [0, kGridStretch * largest sample].
constexpr double kGridStretch = 1.2;

struct SummaryRow {
  std::int64_t p;
  std::size_t n;
  std::string metric;
  double value;
  std::optional<double> threshold;  // value <= threshold passes
  std::optional<bool> pass;
};

class Report {
 public:
  Report(fs::path dir, std::string figure, std::int64_t m, std::int64_t q)
      : dir_(std::move(dir)), figure_(std::move(figure)), m_(m), q_(q) {}

  void add(std::int64_t p, std::size_t n, const std::string& metric, double value,
           std::optional<double> threshold = std::nullopt) {
    std::optional<bool> pass;
    if (threshold) pass = value <= *threshold;
    rows_.push_back({p, n, metric, value, threshold, pass});
  }
  void add_check(std::int64_t p, std::size_t n, const std::string& metric, bool ok) {
    rows_.push_back({p, n, metric, ok ? 1.0 : 0.0, std::nullopt, ok});
  }

  void write_table(const std::string& name, const std::vector<std::string>& columns,
                   const std::vector<std::vector<double>>& data) {
    std::string csv;
    for (std::size_t c = 0; c < columns.size(); ++c) csv += (c ? "," : "") + columns[c];
    csv += "\n";
    for (std::size_t r = 0; r < data.front().size(); ++r) {
      for (std::size_t c = 0; c < data.size(); ++c) csv += (c ? "," : "") + fmt(data[c][r]);
      csv += "\n";
    }
    write_file(dir_ / name, csv);
    outputs_.push_back(name);
  }

  bool all_pass() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const SummaryRow& r) { return r.pass.value_or(true); });
  }

  void finish(Manifest& manifest) {
    std::string csv = "figure,p,m,q,n,metric,value,threshold,pass\n";
    for (const SummaryRow& r : rows_) {
      csv += figure_ + "," + std::to_string(r.p) + "," + std::to_string(m_) + "," + std::to_string(q_) + "," +
             std::to_string(r.n) + "," + r.metric + "," + fmt(r.value) + "," +
             (r.threshold ? fmt(*r.threshold) : "NA") + "," + (r.pass ? (*r.pass ? "pass" : "fail") : "NA") +
             "\n";
    }
    write_file(dir_ / "summary.csv", csv);
    for (const std::string& o : outputs_) manifest.add_output(dir_ / o);
    manifest.add_output(dir_ / "summary.csv");
    for (const SummaryRow& r : rows_) {
      if (r.pass) {
        std::cout << figure_ << " p=" << r.p << " " << r.metric << " = " << fmt(r.value)
                  << (r.threshold ? " (<= " + fmt(*r.threshold) + ")" : "") << (*r.pass ? " pass" : " FAIL")
                  << '\n';
      }
    }
  }

 private:
  fs::path dir_;
  std::string figure_;
  std::int64_t m_;
  std::int64_t q_;
  std::vector<SummaryRow> rows_;
  std::vector<std::string> outputs_;
};

double ks_of(roy_context* ctx, const std::vector<double>& samples, const roy_cdf* cdf) {
  double d = 0.0;
  check(roy_ks_distance_samples(ctx, samples.data(), samples.size(), cdf, &d), ctx);
  return d;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Right-continuous empirical CDF of sorted data on a grid.
std::vector<double> ecdf_on(const std::vector<double>& sorted, const std::vector<double>& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), grid[i]) - sorted.begin()) /
             static_cast<double>(sorted.size());
  }
  return out;
}

std::vector<double> simulate_identity(roy_context* ctx, const CommonParams& params, std::uint64_t seed,
                                      std::size_t n) {
  Scale scale = scale_from_spec(ctx, "identity", params.p, seed);
  roy_empirical* raw = nullptr;
  check(roy_simulate(ctx, params.c(), scale.get(), seed, n, &raw), ctx);
  Empirical emp(raw);
  const double* s = roy_empirical_samples(emp.get());
  if (roy_empirical_resampled(emp.get()) > 0) warn("some rank-deficient draws were redrawn");
  return std::vector<double>(s, s + roy_empirical_size(emp.get()));
}

void validate_exact_figure(roy_context* ctx, const ValidateArgs& a, Report& report, std::int64_t m, std::int64_t q,
                           bool with_tw) {
  const std::size_t n = a.n_sims.value_or(10000);
  for (std::int64_t p : a.p_values) {
    const CommonParams params{p, m, q};
    Cdf exact = make_cdf(ctx, params, ROY_METHOD_EXACT);
    const std::vector<double> sample = simulate_identity(ctx, params, a.seed, n);
    report.add(p, n, "ks_exact", ks_of(ctx, sample, exact.get()), kKsExact);

    const std::vector<double> grid = linear_grid(0.0, kGridStretch * sample.back(), a.grid_points);
    unsigned flags = 0;
    std::vector<std::vector<double>> columns{grid, evaluate_curve(ctx, exact.get(), grid, &flags),
                                             ecdf_on(sample, grid)};
    std::vector<std::string> names{"x", "exact", "empirical"};
    if (with_tw) {
      Cdf tw = make_cdf(ctx, params, ROY_METHOD_TW);
      flags |= roy_cdf_warnings(tw.get());
      columns.push_back(evaluate_curve(ctx, tw.get(), grid));
      names.push_back("approx");
      report.add(p, n, "ks_tw", ks_of(ctx, sample, tw.get()));
      // Central 98% of the exact law.
      const std::vector<double> central =
          linear_grid(quantile(ctx, exact.get(), 0.01), quantile(ctx, exact.get(), 0.99), 400);
      const std::vector<double> fe = evaluate_curve(ctx, exact.get(), central);
      const std::vector<double> ft = evaluate_curve(ctx, tw.get(), central);
      double sup = 0.0;
      for (std::size_t i = 0; i < central.size(); ++i) sup = std::max(sup, std::abs(fe[i] - ft[i]));
      report.add(p, n, "sup_tw_minus_exact_central98", sup, kSupTw);
    }
    report_warnings(flags);
    report.write_table(a.figure + "_p" + std::to_string(p) + ".csv", names, columns);
  }
}

void validate_t1(roy_context* ctx, const ValidateArgs& a, Report& report, std::int64_t m, std::int64_t q) {
  const std::size_t n = a.n_sims.value_or(10000);
  const std::int64_t p_max = *std::max_element(a.p_values.begin(), a.p_values.end());
  std::vector<double> batch_medians;
  for (std::int64_t p : a.p_values) {
    const CommonParams params{p, m, q};
    Cdf exact = make_cdf(ctx, params, ROY_METHOD_EXACT);
    Cdf t1 = make_cdf(ctx, params, ROY_METHOD_THEOREM1);
    // The sample is the union of seed-matched batches (seed, seed + 1, ...),
    // each its own campaign, so the batch KS trend across p uses the same
    // streams at every p.
    const std::size_t batches = std::max<std::size_t>(1, std::min(a.batches, n));
    std::vector<double> sample;
    std::vector<double> ks_batches;
    for (std::size_t k = 0; k < batches; ++k) {
      const std::size_t size = n / batches + (k < n % batches ? 1 : 0);
      const std::vector<double> s = simulate_identity(ctx, params, a.seed + k, size);
      ks_batches.push_back(ks_of(ctx, s, t1.get()));
      sample.insert(sample.end(), s.begin(), s.end());
    }
    std::sort(sample.begin(), sample.end());
    report.add(p, n, "ks_exact", ks_of(ctx, sample, exact.get()), kKsExact);
    report.add(p, n, "ks_theorem1", ks_of(ctx, sample, t1.get()),
               p == p_max ? std::optional<double>(kKsTheorem1) : std::nullopt);
    batch_medians.push_back(median(ks_batches));
    report.add(p, n / batches, "median_batch_ks_theorem1", batch_medians.back());

    const std::vector<double> lambda = linear_grid(0.0, kGridStretch * sample.back(), a.grid_points);
    std::vector<double> scaled(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) scaled[i] = static_cast<double>(p) * lambda[i];
    report.write_table("t1_p" + std::to_string(p) + ".csv", {"x", "lambda", "exact", "empirical", "approx"},
                       {scaled, lambda, evaluate_curve(ctx, exact.get(), lambda), ecdf_on(sample, lambda),
                        evaluate_curve(ctx, t1.get(), lambda)});
  }
  if (batch_medians.size() > 1) {
    bool decreasing = true;
    for (std::size_t i = 1; i < batch_medians.size(); ++i) {
      decreasing = decreasing && batch_medians[i] < batch_medians[i - 1];
    }
    report.add_check(p_max, a.n_sims.value_or(10000), "median_ks_theorem1_decreasing_in_p", decreasing);
  }
}

void validate_t2(roy_context* ctx, const ValidateArgs& a, Report& report, std::int64_t m, std::int64_t q) {
  const std::size_t n = a.n_sims.value_or(100);
  const std::int64_t p_max = *std::max_element(a.p_values.begin(), a.p_values.end());
  for (std::int64_t p : a.p_values) {
    const CommonParams params{p, m, q};
    Cdf t1 = make_cdf(ctx, params, ROY_METHOD_THEOREM1);
    std::vector<double> ks_corrected, ks_uncorrected, pooled_corrected, pooled_uncorrected, b_hat;
    for (std::size_t c = 0; c < a.campaigns; ++c) {
      std::vector<roy_replicate> reps(n);
      check(roy_simulate_with_estimate(ctx, params.c(), nullptr, a.sigma_law.c_str(), a.seed + c, n, reps.data()),
            ctx);
      std::vector<double> corrected(n), uncorrected(n);
      for (std::size_t i = 0; i < n; ++i) {
        corrected[i] = reps[i].b_hat * reps[i].lambda;
        uncorrected[i] = reps[i].lambda;
        b_hat.push_back(reps[i].b_hat);
      }
      ks_corrected.push_back(ks_of(ctx, corrected, t1.get()));
      ks_uncorrected.push_back(ks_of(ctx, uncorrected, t1.get()));
      pooled_corrected.insert(pooled_corrected.end(), corrected.begin(), corrected.end());
      pooled_uncorrected.insert(pooled_uncorrected.end(), uncorrected.begin(), uncorrected.end());
    }
    const double mc = median(ks_corrected);
    const double mu = median(ks_uncorrected);
    report.add(p, n, "median_ks_corrected", mc);
    report.add(p, n, "median_ks_uncorrected", mu);
    report.add_check(p, n, "corrected_le_uncorrected", mc <= mu);
    double mean_b = 0.0;
    for (double v : b_hat) mean_b += v / static_cast<double>(b_hat.size());
    report.add(p, n, "mean_b_hat", mean_b);

    std::sort(pooled_corrected.begin(), pooled_corrected.end());
    std::sort(pooled_uncorrected.begin(), pooled_uncorrected.end());
    const double hi = kGridStretch * std::max(pooled_corrected.back(), pooled_uncorrected.back());
    const std::vector<double> lambda = linear_grid(0.0, hi, a.grid_points);
    std::vector<double> scaled(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) scaled[i] = static_cast<double>(p) * lambda[i];
    report.write_table("t2_p" + std::to_string(p) + ".csv",
                       {"x", "lambda", "empirical_corrected", "empirical_uncorrected", "approx"},
                       {scaled, lambda, ecdf_on(pooled_corrected, lambda), ecdf_on(pooled_uncorrected, lambda),
                        evaluate_curve(ctx, t1.get(), lambda)});
  }

  if (a.fixed_sims > 0) {
    // One representative scale held fixed over many draws, corrected with
    // its exact b.
    const CommonParams params{p_max, m, q};
    Scale sigma = scale_from_spec(ctx, "random:" + a.sigma_law, p_max, a.seed);
    roy_scale_stats stats{};
    check(roy_scale_moments(ctx, sigma.get(), &stats), ctx);
    roy_empirical* raw = nullptr;
    check(roy_simulate(ctx, params.c(), sigma.get(), a.seed, a.fixed_sims, &raw), ctx);
    Empirical emp(raw);
    Cdf t2 = make_cdf(ctx, params, ROY_METHOD_THEOREM2, stats.b);
    Cdf t1 = make_cdf(ctx, params, ROY_METHOD_THEOREM1);
    double ks2 = 0.0, ks1 = 0.0;
    check(roy_ks_distance(ctx, emp.get(), t2.get(), &ks2), ctx);
    check(roy_ks_distance(ctx, emp.get(), t1.get(), &ks1), ctx);
    report.add(p_max, a.fixed_sims, "fixed_sigma_b", stats.b);
    report.add(p_max, a.fixed_sims, "fixed_sigma_ks_corrected", ks2, kKsCorrectedFixed);
    report.add(p_max, a.fixed_sims, "fixed_sigma_ks_uncorrected", ks1);
  }
}

int run_validate(ValidateArgs a) {
  Manifest manifest("validate");
  const bool tw_family = a.figure == "dw" || a.figure == "tw";
  const std::int64_t m = a.m.value_or(tw_family ? 100 : 96);
  const std::int64_t q = a.q.value_or(tw_family ? 6 : 4);
  if (a.p_values.empty()) {
    a.p_values = tw_family ? std::vector<std::int64_t>{200, 500, 1000, 2000}
                           : std::vector<std::int64_t>{500, 875, 1250, 1625, 2000};
  }
  Context ctx = make_context(a.workers);
  const fs::path dir = prepare_out(a.out);
  Report report(dir, a.figure, m, q);
  if (a.figure == "dw") validate_exact_figure(ctx.get(), a, report, m, q, false);
  if (a.figure == "tw") validate_exact_figure(ctx.get(), a, report, m, q, true);
  if (a.figure == "t1") validate_t1(ctx.get(), a, report, m, q);
  if (a.figure == "t2") validate_t2(ctx.get(), a, report, m, q);

  manifest.params() = json{{"figure", a.figure}, {"m", m}, {"q", q}, {"p_values", a.p_values},
                           {"n_sims", a.n_sims ? json(*a.n_sims) : json(nullptr)},
                           {"grid_points", a.grid_points}};
  if (a.figure == "t1") manifest.params()["batches"] = a.batches;
  if (a.figure == "t2") {
    manifest.params()["campaigns"] = a.campaigns;
    manifest.params()["fixed_sims"] = a.fixed_sims;
    manifest.params()["sigma_law"] = a.sigma_law;
  }
  manifest.set("seed", a.seed);
  report.finish(manifest);
  manifest.set("all_pass", report.all_pass());
  manifest.write(dir);
  return report.all_pass() ? kExitOk : kExitValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Largest-root distributions of the doubly singular beta ensemble"};
  app.set_version_flag("--version", std::string(roy_version()));
  app.require_subcommand(1);
  const std::vector<std::string> methods{"exact", "theorem1", "theorem2", "tw"};

  CdfArgs cdf_args;
  auto* cdf = app.add_subcommand("cdf", "Evaluate a largest-root CDF on a grid (writes cdf.csv)");
  add_ensemble_options(cdf, cdf_args.params, true);
  cdf->add_option("--method", cdf_args.method, "exact | theorem1 | theorem2 | tw")
      ->check(CLI::IsMember(methods));
  cdf->add_option("--grid-min", cdf_args.grid_min, "Smallest x (default 0)");
  cdf->add_option("--grid-max", cdf_args.grid_max, "Largest x (default: 0.9999 quantile)");
  cdf->add_option("--grid-points", cdf_args.grid_points, "Number of grid points")->check(CLI::Range(1, 10000000));
  auto* b_opt = cdf->add_option("--b", cdf_args.b, "Scale correction factor b (theorem2)");
  cdf->add_option("--sigma", cdf_args.sigma, "Scale matrix CSV; b from its exact moments (theorem2)")
      ->excludes(b_opt);
  cdf->add_option("--out", cdf_args.out, "Output directory");
  cdf->add_option("--workers", cdf_args.workers, "Worker threads (default: ROY_EXACT_WORKERS or all cores)");

  PvalueArgs pv_args;
  auto* pvalue = app.add_subcommand("pvalue", "P-value of an observed largest root (JSON on stdout)");
  add_ensemble_options(pvalue, pv_args.params, true);
  pvalue->add_option("--stat", pv_args.stat, "Observed largest root")->required();
  pvalue->add_option("--method", pv_args.method, "exact | theorem1 | theorem2 | tw")
      ->check(CLI::IsMember(methods));
  pvalue->add_option("--b", pv_args.b, "Scale correction factor b (theorem2)");
  pvalue->add_option("--data", pv_args.data,
                     "CSV data matrix (p x m factor, or p x p with --realized); estimates b and uses theorem2");
  pvalue->add_flag("--realized", pv_args.realized, "--data holds the p x p matrix A with m degrees of freedom");
  pvalue->add_option("--out", pv_args.out, "Also write pvalue.json and manifest.json here");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo largest roots (writes empirical.csv)");
  add_ensemble_options(simulate, sim_args.params, true);
  simulate->add_option("--n-sims", sim_args.n_sims, "Number of draws")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_args.seed, "Seed");
  simulate->add_option("--sigma", sim_args.sigma, "identity | FILE | random:LAW (LAW: uniform[:LO:HI], lognormal[:S], dense)");
  simulate->add_option("--workers", sim_args.workers, "Worker threads (default: ROY_EXACT_WORKERS or all cores)");
  simulate->add_option("--out", sim_args.out, "Output directory");

  ValidateArgs val_args;
  auto* validate = app.add_subcommand("validate", "Monte Carlo validation report for one figure");
  validate->add_option("--figure", val_args.figure, "dw | tw | t1 | t2")
      ->required()
      ->check(CLI::IsMember({"dw", "tw", "t1", "t2"}));
  validate->add_option("--n-sims", val_args.n_sims, "Draws per p (t2: replicates per campaign)")
      ->check(CLI::PositiveNumber);
  validate->add_option("--seed", val_args.seed, "Seed");
  validate->add_option("--p-values", val_args.p_values, "Comma-separated p grid")->delimiter(',');
  validate->add_option("--m", val_args.m, "Degrees of freedom of A");
  validate->add_option("--q", val_args.q, "Degrees of freedom of B");
  validate->add_option("--grid-points", val_args.grid_points, "Rows of the per-p CSVs")->check(CLI::Range(2, 1000000));
  validate->add_option("--campaigns", val_args.campaigns, "t2: campaigns per p")->check(CLI::PositiveNumber);
  validate->add_option("--batches", val_args.batches, "t1: batches for the median KS trend")
      ->check(CLI::PositiveNumber);
  validate->add_option("--fixed-sims", val_args.fixed_sims, "t2: draws on one fixed scale at the largest p (0 skips)");
  validate->add_option("--sigma-law", val_args.sigma_law, "t2: random scale law");
  validate->add_option("--workers", val_args.workers, "Worker threads (default: ROY_EXACT_WORKERS or all cores)");
  validate->add_option("--out", val_args.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*cdf) return run_cdf(cdf_args);
    if (*pvalue) return run_pvalue(pv_args);
    if (*simulate) return run_simulate(sim_args);
    if (*validate) return run_validate(val_args);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    if (e.exit_code == kExitInvalid) std::cerr << "run with --help for usage\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInvalid;
}
