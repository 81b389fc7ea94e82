#include "roy_exact/roy_exact.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "core/beta_ensemble.hpp"
#include "core/cdf_dispatch.hpp"
#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/exact_dist.hpp"
#include "core/goodness_of_fit.hpp"
#include "core/parallel.hpp"
#include "core/scale_correction.hpp"
#include "core/tracy_widom.hpp"

struct roy_context {
  std::string last_error;
  unsigned workers = roy::default_worker_count();
};

struct roy_scale {
  roy::ScaleMatrix scale;
};

struct roy_cdf {
  roy::LargestRootCdf cdf;
};

struct roy_empirical {
  roy::EmpiricalCdf empirical;
};

namespace {

roy_status status_of(roy::ErrorCode code) {
  switch (code) {
    case roy::ErrorCode::invalid_argument: return ROY_ERR_INVALID_ARGUMENT;
    case roy::ErrorCode::invalid_params: return ROY_ERR_INVALID_PARAMS;
    case roy::ErrorCode::unsupported_params: return ROY_ERR_UNSUPPORTED_PARAMS;
    case roy::ErrorCode::resample_cap: return ROY_ERR_RESAMPLE_CAP;
    case roy::ErrorCode::rank_deficient: return ROY_ERR_RANK_DEFICIENT;
    case roy::ErrorCode::not_positive_definite: return ROY_ERR_NOT_POSITIVE_DEFINITE;
    case roy::ErrorCode::domain: return ROY_ERR_DOMAIN;
    case roy::ErrorCode::degenerate_dof: return ROY_ERR_DEGENERATE_DOF;
    case roy::ErrorCode::io: return ROY_ERR_IO;
  }
  return ROY_ERR_INTERNAL;
}

template <class Body>
roy_status guarded(roy_context* ctx, Body&& body) {
  roy_status status = ROY_OK;
  std::string message;
  try {
    body();
  } catch (const roy::Error& e) {
    status = status_of(e.code());
    message = e.what();
  } catch (const std::bad_alloc&) {
    status = ROY_ERR_INTERNAL;
    message = "out of memory";
  } catch (const std::exception& e) {
    status = ROY_ERR_INTERNAL;
    message = e.what();
  } catch (...) {
    status = ROY_ERR_INTERNAL;
    message = "unknown error";
  }
  if (ctx) ctx->last_error = std::move(message);
  return status;
}

void require(bool condition, const char* message) {
  if (!condition) throw roy::InvalidArgument(message);
}

unsigned workers_of(const roy_context* ctx) { return ctx ? ctx->workers : roy::default_worker_count(); }

roy::EnsembleParams ensemble(roy_params p) { return {p.p, p.m, p.q}; }

roy::DoubleWishartParams double_wishart(roy_dw_params p) { return {p.dimension, p.num_dof, p.den_dof}; }

roy_scale_stats to_c(const roy::ScaleStats& s) { return {s.a1_hat, s.a2_hat, s.b}; }

// Pointwise evaluation spread over workers; NaN or negative inputs fail.
template <class Evaluate>
void evaluate_many(unsigned workers, const double* x, std::size_t n, double* out, unsigned* warnings,
                   Evaluate&& evaluate) {
  require(n == 0 || (x && out), "null array argument");
  std::vector<char> flags(n, 0);
  roy::parallel_for(n, workers, [&](std::size_t i) {
    const roy::LargestRootLaw::Value v = evaluate(x[i]);
    out[i] = v.cdf;
    flags[i] = v.conditioning_warning ? 1 : 0;
  });
  const bool flagged = std::any_of(flags.begin(), flags.end(), [](char f) { return f != 0; });
  if (warnings) *warnings = flagged ? unsigned{ROY_WARN_CONDITIONING} : 0u;
}

}  // namespace

extern "C" {

const char* roy_version(void) { return ROY_EXACT_VERSION; }

const char* roy_status_string(roy_status status) {
  switch (status) {
    case ROY_OK: return "ok";
    case ROY_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ROY_ERR_INVALID_PARAMS: return "invalid parameters";
    case ROY_ERR_UNSUPPORTED_PARAMS: return "unsupported parameters";
    case ROY_ERR_RESAMPLE_CAP: return "resample cap exceeded";
    case ROY_ERR_RANK_DEFICIENT: return "rank deficient draw";
    case ROY_ERR_NOT_POSITIVE_DEFINITE: return "matrix not positive definite";
    case ROY_ERR_DOMAIN: return "argument outside domain";
    case ROY_ERR_DEGENERATE_DOF: return "degenerate degrees of freedom";
    case ROY_ERR_IO: return "i/o error";
    case ROY_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

roy_status roy_context_create(roy_context** out) {
  if (!out) return ROY_ERR_INVALID_ARGUMENT;
  *out = new (std::nothrow) roy_context;
  return *out ? ROY_OK : ROY_ERR_INTERNAL;
}

void roy_context_destroy(roy_context* ctx) { delete ctx; }

const char* roy_context_last_error(const roy_context* ctx) { return ctx ? ctx->last_error.c_str() : ""; }

roy_status roy_context_set_workers(roy_context* ctx, unsigned workers) {
  if (!ctx) return ROY_ERR_INVALID_ARGUMENT;
  ctx->workers = workers == 0 ? roy::default_worker_count() : workers;
  ctx->last_error.clear();
  return ROY_OK;
}

unsigned roy_context_workers(const roy_context* ctx) { return workers_of(ctx); }

roy_status roy_scale_identity(roy_context* ctx, int64_t p, roy_scale** out) {
  return guarded(ctx, [&] {
    require(out != nullptr, "null output handle");
    *out = new roy_scale{roy::ScaleMatrix::identity(p)};
  });
}

roy_status roy_scale_diagonal(roy_context* ctx, const double* values, int64_t p, roy_scale** out) {
  return guarded(ctx, [&] {
    require(out != nullptr && values != nullptr && p >= 1, "roy_scale_diagonal: bad arguments");
    *out = new roy_scale{roy::ScaleMatrix::diagonal(Eigen::Map<const roy::Vector>(values, p))};
  });
}

roy_status roy_scale_dense(roy_context* ctx, const double* entries, int64_t p, roy_scale** out) {
  return guarded(ctx, [&] {
    require(out != nullptr && entries != nullptr && p >= 1, "roy_scale_dense: bad arguments");
    *out = new roy_scale{roy::ScaleMatrix::dense(Eigen::Map<const roy::Matrix>(entries, p, p))};
  });
}

roy_status roy_scale_load_csv(roy_context* ctx, const char* path, roy_scale** out) {
  return guarded(ctx, [&] {
    require(out != nullptr && path != nullptr, "roy_scale_load_csv: bad arguments");
    *out = new roy_scale{roy::load_scale_csv(path)};
  });
}

roy_status roy_scale_random(roy_context* ctx, int64_t p, const char* law, uint64_t seed, uint64_t stream,
                            roy_scale** out) {
  return guarded(ctx, [&] {
    require(out != nullptr && law != nullptr, "roy_scale_random: bad arguments");
    roy::RngStream rng(seed, stream);
    *out = new roy_scale{roy::sample_random_scale(rng, p, roy::ScaleLaw::parse(law))};
  });
}

void roy_scale_destroy(roy_scale* scale) { delete scale; }

int64_t roy_scale_order(const roy_scale* scale) { return scale ? scale->scale.order() : 0; }

roy_status roy_scale_moments(roy_context* ctx, const roy_scale* scale, roy_scale_stats* out) {
  return guarded(ctx, [&] {
    require(scale != nullptr && out != nullptr, "roy_scale_moments: bad arguments");
    *out = to_c(roy::scale_moments_exact(scale->scale));
  });
}

roy_status roy_mardia_dual(roy_context* ctx, roy_dw_params params, roy_dw_params* out) {
  return guarded(ctx, [&] {
    require(out != nullptr, "null output");
    const roy::DoubleWishartParams d = roy::mardia_dual(double_wishart(params));
    *out = {d.dimension, d.num_dof, d.den_dof};
  });
}

roy_status roy_double_wishart_cdf(roy_context* ctx, roy_dw_params params, const double* x, size_t n, double* out,
                                  unsigned* warnings) {
  return guarded(ctx, [&] {
    const roy::DoubleWishartLargestRoot law(double_wishart(params));
    evaluate_many(workers_of(ctx), x, n, out, warnings, [&](double v) { return law.evaluate(v); });
  });
}

roy_status roy_wishart_max_cdf(roy_context* ctx, int64_t dim, int64_t dof, const double* x, size_t n, double* out,
                               unsigned* warnings) {
  return guarded(ctx, [&] {
    const roy::WishartLargestRoot law(dim, dof);
    evaluate_many(workers_of(ctx), x, n, out, warnings, [&](double v) { return law.evaluate(v); });
  });
}

roy_status roy_tracy_widom1_cdf(roy_context* ctx, const double* s, size_t n, double* out) {
  return guarded(ctx, [&] {
    require(n == 0 || (s && out), "null array argument");
    for (size_t i = 0; i < n; ++i) out[i] = roy::tracy_widom1_cdf(s[i]);
  });
}

roy_status roy_tw_centering(roy_context* ctx, roy_params params, double* mu, double* sigma) {
  return guarded(ctx, [&] {
    require(mu != nullptr && sigma != nullptr, "null output");
    const roy::TracyWidomCentering c = roy::tw_centering(ensemble(params));
    *mu = c.mu;
    *sigma = c.sigma;
  });
}

roy_status roy_cdf_create(roy_context* ctx, roy_params params, roy_method method, double b, roy_cdf** out) {
  return guarded(ctx, [&] {
    require(out != nullptr, "null output handle");
    std::optional<roy::Method> m;
    switch (method) {
      case ROY_METHOD_EXACT: m = roy::Method::exact; break;
      case ROY_METHOD_THEOREM1: m = roy::Method::theorem1; break;
      case ROY_METHOD_THEOREM2: m = roy::Method::theorem2; break;
      case ROY_METHOD_TW: m = roy::Method::tw; break;
    }
    require(m.has_value(), "unknown method");
    const std::optional<double> bv = *m == roy::Method::theorem2 ? std::optional<double>(b) : std::nullopt;
    *out = new roy_cdf{roy::LargestRootCdf(ensemble(params), *m, bv)};
  });
}

void roy_cdf_destroy(roy_cdf* cdf) { delete cdf; }

unsigned roy_cdf_warnings(const roy_cdf* cdf) { return cdf && cdf->cdf.regime_warning() ? unsigned{ROY_WARN_REGIME} : 0u; }

roy_status roy_cdf_evaluate(roy_context* ctx, const roy_cdf* cdf, const double* x, size_t n, double* out,
                            unsigned* warnings) {
  return guarded(ctx, [&] {
    require(cdf != nullptr, "null evaluator");
    evaluate_many(workers_of(ctx), x, n, out, warnings, [&](double v) { return cdf->cdf.evaluate(v); });
    if (warnings) *warnings |= roy_cdf_warnings(cdf);
  });
}

roy_status roy_cdf_curve(roy_context* ctx, const roy_cdf* cdf, const double* grid, size_t n, double* out,
                         unsigned* warnings) {
  return guarded(ctx, [&] {
    require(cdf != nullptr && (n == 0 || (grid && out)), "roy_cdf_curve: bad arguments");
    const roy::CdfCurve curve = roy::cdf_curve([&](double v) { return cdf->cdf.evaluate(v); },
                                               std::span<const double>(grid, n), workers_of(ctx));
    std::copy(curve.cdf.begin(), curve.cdf.end(), out);
    if (warnings) *warnings = (curve.conditioning_warning ? unsigned{ROY_WARN_CONDITIONING} : 0u) | roy_cdf_warnings(cdf);
  });
}

roy_status roy_cdf_p_value(roy_context* ctx, const roy_cdf* cdf, double observed, double* out) {
  return guarded(ctx, [&] {
    require(cdf != nullptr && out != nullptr, "roy_cdf_p_value: bad arguments");
    *out = roy::p_value(cdf->cdf, observed);
  });
}

roy_status roy_cdf_quantile(roy_context* ctx, const roy_cdf* cdf, double prob, double* out) {
  return guarded(ctx, [&] {
    require(cdf != nullptr && out != nullptr, "roy_cdf_quantile: bad arguments");
    *out = roy::quantile([&](double v) { return cdf->cdf.cdf(v); }, prob);
  });
}

roy_status roy_estimate_scale_moments(roy_context* ctx, const double* data, int64_t rows, int64_t cols, int realized,
                                      int64_t dof, roy_scale_stats* out, unsigned* warnings) {
  return guarded(ctx, [&] {
    require(data != nullptr && out != nullptr && rows >= 1 && cols >= 1, "roy_estimate_scale_moments: bad arguments");
    const Eigen::Map<const roy::Matrix> m(data, rows, cols);
    roy::ScaleStats s;
    if (realized) {
      require(rows == cols, "realized matrix must be square");
      s = roy::estimate_scale_moments_from_matrix(roy::SymMatrix(m, 1e-9), dof);
    } else {
      s = roy::estimate_scale_moments_from_factor(m);
    }
    *out = to_c(s);
    if (warnings) *warnings = s.b_exceeds_one() ? unsigned{ROY_WARN_B_ABOVE_ONE} : 0u;
  });
}

roy_status roy_estimate_scale_moments_csv(roy_context* ctx, const char* path, int realized, int64_t dof,
                                          roy_scale_stats* out, unsigned* warnings) {
  roy::Matrix m;
  const roy_status read = guarded(ctx, [&] {
    require(path != nullptr, "null path");
    m = roy::read_csv_matrix(path);
  });
  if (read != ROY_OK) return read;
  return roy_estimate_scale_moments(ctx, m.data(), m.rows(), m.cols(), realized, dof, out, warnings);
}

roy_status roy_simulate(roy_context* ctx, roy_params params, const roy_scale* scale, uint64_t seed, size_t n_sims,
                        roy_empirical** out) {
  return guarded(ctx, [&] {
    require(scale != nullptr && out != nullptr, "roy_simulate: bad arguments");
    roy::SimulationOptions options;
    options.workers = workers_of(ctx);
    *out = new roy_empirical{roy::simulate_empirical_cdf(seed, ensemble(params), scale->scale, n_sims, options)};
  });
}

roy_status roy_simulate_with_estimate(roy_context* ctx, roy_params params, const roy_scale* scale,
                                      const char* random_law, uint64_t seed, size_t n, roy_replicate* out) {
  return guarded(ctx, [&] {
    require(out != nullptr || n == 0, "null output");
    require(scale != nullptr || random_law != nullptr, "need a scale or a random scale law");
    const roy::EnsembleParams ep = ensemble(params);
    ep.validate();
    require(random_law != nullptr || scale->scale.order() == ep.p, "scale order differs from p");
    const std::optional<roy::ScaleLaw> law =
        random_law ? std::optional<roy::ScaleLaw>(roy::ScaleLaw::parse(random_law)) : std::nullopt;
    const std::optional<roy::ScaleStats> fixed_stats =
        law ? std::nullopt : std::optional<roy::ScaleStats>(roy::scale_moments_exact(scale->scale));
    roy::SimulationOptions options;
    options.workers = workers_of(ctx);
    const std::vector<roy_replicate> reps = roy::run_replicates_of<roy_replicate>(
        seed, n,
        [&](roy::RngStream& rng) {
          const roy::ScaleMatrix sigma = law ? roy::sample_random_scale(rng, ep.p, *law) : scale->scale;
          const roy::EnsembleDraw draw = roy::draw_ensemble(rng, ep, sigma);
          roy_replicate r;
          r.lambda = roy::largest_root_reduced(draw);
          r.b_hat = roy::estimate_scale_moments(draw.a, ep.m, ep.p).b;
          r.b_true = law ? roy::scale_moments_exact(sigma).b : fixed_stats->b;
          return r;
        },
        options);
    std::copy(reps.begin(), reps.end(), out);
  });
}

roy_status roy_largest_root_paths(roy_context* ctx, roy_params params, const roy_scale* scale, uint64_t seed,
                                  uint64_t stream, double* reduced, double* direct) {
  return guarded(ctx, [&] {
    require(scale != nullptr && reduced != nullptr && direct != nullptr, "roy_largest_root_paths: bad arguments");
    roy::RngStream rng(seed, stream);
    const roy::EnsembleDraw draw = roy::draw_ensemble(rng, ensemble(params), scale->scale);
    *reduced = roy::largest_root_reduced(draw);
    *direct = roy::solve_direct(draw).roots(0);
  });
}

void roy_empirical_destroy(roy_empirical* empirical) { delete empirical; }

size_t roy_empirical_size(const roy_empirical* empirical) { return empirical ? empirical->empirical.size() : 0; }

const double* roy_empirical_samples(const roy_empirical* empirical) {
  return empirical ? empirical->empirical.sorted_samples().data() : nullptr;
}

size_t roy_empirical_resampled(const roy_empirical* empirical) {
  return empirical ? empirical->empirical.resampled_count() : 0;
}

double roy_empirical_eval(const roy_empirical* empirical, double x) {
  return empirical ? empirical->empirical(x) : std::nan("");
}

roy_status roy_empirical_write_csv(roy_context* ctx, const roy_empirical* empirical, const char* path) {
  return guarded(ctx, [&] {
    require(empirical != nullptr && path != nullptr, "roy_empirical_write_csv: bad arguments");
    std::ofstream file(path, std::ios::binary);
    if (!file) throw roy::IoError(std::string("cannot open ") + path + " for writing");
    empirical->empirical.write_csv(file);
    if (!file) throw roy::IoError(std::string("failed writing ") + path);
  });
}

roy_status roy_ks_distance(roy_context* ctx, const roy_empirical* empirical, const roy_cdf* cdf, double* out) {
  return guarded(ctx, [&] {
    require(empirical != nullptr && cdf != nullptr && out != nullptr, "roy_ks_distance: bad arguments");
    *out = roy::ks_distance(empirical->empirical, [&](double v) { return cdf->cdf.cdf(v); });
  });
}

roy_status roy_ks_distance_samples(roy_context* ctx, const double* samples, size_t n, const roy_cdf* cdf,
                                   double* out) {
  return guarded(ctx, [&] {
    require(samples != nullptr && cdf != nullptr && out != nullptr, "roy_ks_distance_samples: bad arguments");
    const roy::EmpiricalCdf e(std::vector<double>(samples, samples + n));
    *out = roy::ks_distance(e, [&](double v) { return cdf->cdf.cdf(v); });
  });
}

double roy_ks_p_value(double distance, size_t n) { return roy::ks_p_value(distance, n); }

}  // extern "C"
