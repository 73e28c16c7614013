#include "scrub/upsample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "scrub/error.hpp"
#include "scrub/hash.hpp"

namespace scrub {
namespace {

constexpr double kLambdaMax = 50.0;
constexpr double kSolveTol = 1e-9;

void validate_params(const CurveParams& params) {
  if (!(params.p >= 0.0)) throw ConfigError("curve exponent p must be >= 0");
  if (!(params.lambda >= 0.0)) throw ConfigError("curve lambda must be >= 0");
  if (!(params.C > 0.0)) throw ConfigError("curve scale C must be > 0");
  if (!(params.a >= 0.0 && params.a < 1.0))
    throw ConfigError("curve cutoff a must be in [0,1)");
}

// Unnormalized integrand in the shifted variable u = x - a.
double shape(double u, double p, double lambda) {
  if (u < 0.0) return 0.0;
  const double pw = p == 0.0 ? 1.0 : std::pow(u, p);
  return pw * std::exp(lambda * u);
}

double simpson(double lo, double hi, double flo, double fmid, double fhi) {
  return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
}

double adaptive_simpson(double p, double lambda, double lo, double hi, double flo,
                        double fmid, double fhi, double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double fq1 = shape(0.5 * (lo + mid), p, lambda);
  const double fq3 = shape(0.5 * (mid + hi), p, lambda);
  const double left = simpson(lo, mid, flo, fq1, fmid);
  const double right = simpson(mid, hi, fmid, fq3, fhi);
  const double err = left + right - whole;
  // Node tolerance: requested absolute tolerance split over the interval,
  // floored at machine relative precision of the running estimate.
  const double floor_tol =
      8.0 * std::numeric_limits<double>::epsilon() * std::abs(left + right);
  if (depth <= 0 || std::abs(err) <= std::max(15.0 * tol, floor_tol))
    return left + right + err / 15.0;
  return adaptive_simpson(p, lambda, lo, mid, flo, fq1, fmid, left, tol * 0.5,
                          depth - 1) +
         adaptive_simpson(p, lambda, mid, hi, fmid, fq3, fhi, right, tol * 0.5,
                          depth - 1);
}

// Integral of u^p * e^{lambda u} over [u_lo, u_hi], 0 <= u_lo <= u_hi.
double shape_integral(double p, double lambda, double u_lo, double u_hi,
                      double abs_tol) {
  if (u_hi <= u_lo) return 0.0;
  if (p == 0.0) {
    if (lambda == 0.0) return u_hi - u_lo;
    return (std::exp(lambda * u_hi) - std::exp(lambda * u_lo)) / lambda;
  }
  if (lambda == 0.0)
    return (std::pow(u_hi, p + 1.0) - std::pow(u_lo, p + 1.0)) / (p + 1.0);
  const double flo = shape(u_lo, p, lambda);
  const double fhi = shape(u_hi, p, lambda);
  const double fmid = shape(0.5 * (u_lo + u_hi), p, lambda);
  const double whole = simpson(u_lo, u_hi, flo, fmid, fhi);
  return adaptive_simpson(p, lambda, u_lo, u_hi, flo, fmid, fhi, whole, abs_tol, 60);
}

}  // namespace

double eval_curve(const CurveParams& params, double x) {
  validate_params(params);
  if (x < params.a) return 0.0;
  return params.C * shape(x - params.a, params.p, params.lambda);
}

double curve_integral(const CurveParams& params, double lo, double hi) {
  validate_params(params);
  if (!(lo <= hi)) throw ConfigError("curve_integral: lo must be <= hi");
  lo = std::max(lo, params.a);
  if (hi <= lo) return 0.0;
  // Request the 1e-9 absolute tolerance on the final (scaled-by-C) value.
  return params.C *
         shape_integral(params.p, params.lambda, lo - params.a, hi - params.a,
                        1e-9 / params.C);
}

CurveParams solve_curve(const YieldSpec& spec, double a, CurveFamily family) {
  if (!(spec.target_ratio > 0.0))
    throw ConfigError("target_ratio must be > 0");
  if (!(spec.max_ratio > 0.0)) throw ConfigError("max_ratio must be > 0");
  if (!(spec.top_bucket_fraction > 0.0 && spec.top_bucket_fraction <= 1.0))
    throw ConfigError("top_bucket_fraction must be in (0,1]");
  if (!(a >= 0.0 && a < 1.0)) throw ConfigError("cutoff a must be in [0,1)");

  const double L = 1.0 - a;
  const double R = spec.target_ratio;
  const double M = spec.max_ratio;
  const double b = spec.top_bucket_fraction;
  if (R > M * L * (1.0 + 1e-12) + 1e-12)
    throw ConfigError("infeasible spec: target_ratio " + std::to_string(R) +
                      " exceeds max_ratio*(1-a) = " + std::to_string(M * L));

  // Top slice [1-b, 1] in shifted coordinates, clamped to the support.
  const double top_lo = std::max(0.0, (1.0 - b) - a);

  // Mean over the top slice for unit yield scale: cap(p, lambda) =
  // (R / b) * J / I with I the full-support integral and J the top-slice
  // integral; monotone increasing in lambda and in p.
  auto cap_mean = [&](double p, double lambda) {
    const double I = shape_integral(p, lambda, 0.0, L, 1e-13);
    const double J = shape_integral(p, lambda, top_lo, L, 1e-13);
    return (R / b) * (J / I);
  };

  std::vector<double> p_grid;
  if (family == CurveFamily::kExponential) {
    p_grid.push_back(0.0);
  } else {
    for (int i = 0; i <= 8; ++i) p_grid.push_back(0.5 * i);  // 0 .. 4
  }

  bool found = false;
  double best_lambda = 0.0, best_p = 0.0;
  for (double p : p_grid) {
    if (cap_mean(p, 0.0) > M + kSolveTol) continue;  // even flattest is too peaked
    double lambda;
    if (cap_mean(p, kLambdaMax) <= M + kSolveTol) {
      lambda = kLambdaMax;  // cap never binds within the search domain
    } else {
      double lo = 0.0, hi = kLambdaMax;  // invariant: cap(lo) <= M < cap(hi)
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cap_mean(p, mid) <= M)
          lo = mid;
        else
          hi = mid;
      }
      lambda = lo;
    }
    if (!found || lambda > best_lambda + kSolveTol ||
        (std::abs(lambda - best_lambda) <= kSolveTol && p > best_p)) {
      found = true;
      best_lambda = lambda;
      best_p = p;
    }
  }
  if (!found)
    throw ConfigError(
        "infeasible spec: top-slice mean exceeds max_ratio for every candidate "
        "curve (max_ratio " +
        std::to_string(M) + ")");

  CurveParams params;
  params.p = best_p;
  params.lambda = best_lambda;
  params.a = a;
  params.C = R / shape_integral(best_p, best_lambda, 0.0, L, 1e-13);
  return params;
}

std::vector<double> vigintile_boundaries() {
  std::vector<double> b(21);
  for (int i = 0; i <= 20; ++i) b[static_cast<std::size_t>(i)] = i / 20.0;
  return b;
}

BucketPlan bucket_rates(const CurveParams& params, const std::vector<double>& boundaries) {
  validate_params(params);
  if (boundaries.size() < 2) throw ConfigError("need at least 2 bucket boundaries");
  if (boundaries.front() != 0.0 || boundaries.back() != 1.0)
    throw ConfigError("bucket boundaries must start at 0 and end at 1");
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (!(boundaries[i] > boundaries[i - 1]))
      throw ConfigError("degenerate zero-width bucket at boundary index " +
                        std::to_string(i));
  }
  BucketPlan plan;
  plan.boundaries = boundaries;
  plan.rates.resize(boundaries.size() - 1);
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
    const double width = boundaries[i + 1] - boundaries[i];
    plan.rates[i] = curve_integral(params, boundaries[i], boundaries[i + 1]) / width;
  }
  return plan;
}

BucketPlan combine_plans(const BucketPlan& x, const BucketPlan& y, CombineMode mode) {
  if (x.boundaries != y.boundaries)
    throw ConfigError("combine_plans: plans have different bucket boundaries");
  if (x.rates.size() != y.rates.size())
    throw ConfigError("combine_plans: plans have different bucket counts");
  BucketPlan out;
  out.boundaries = x.boundaries;
  out.rates.resize(x.rates.size());
  for (std::size_t i = 0; i < x.rates.size(); ++i) {
    out.rates[i] = mode == CombineMode::kArithmetic
                       ? 0.5 * (x.rates[i] + y.rates[i])
                       : std::sqrt(x.rates[i] * y.rates[i]);
  }
  return out;
}

SamplingPlan plan_to_sampling(const BucketPlan& plan,
                              const std::vector<std::uint64_t>& bucket_doc_counts,
                              std::uint64_t seed) {
  if (bucket_doc_counts.size() != plan.rates.size())
    throw ConfigError("plan_to_sampling: bucket count mismatch");
  SamplingPlan out;
  out.seed = seed;
  out.buckets.resize(plan.rates.size());
  for (std::size_t q = 0; q < plan.rates.size(); ++q) {
    const double rate = plan.rates[q];
    if (!(rate >= 0.0)) throw ConfigError("negative bucket rate");
    auto& sched = out.buckets[q];
    sched.full_copies = static_cast<std::uint64_t>(std::floor(rate));
    const double frac = rate - std::floor(rate);
    if (frac <= 0.0) continue;
    // Portable generator: mt19937_64's sequence is pinned by the standard;
    // the 53-bit shift keeps draws platform-independent.
    std::mt19937_64 rng(mix64(seed ^ (0x9e3779b97f4a7c15ULL * (q + 1))));
    for (std::uint64_t d = 0; d < bucket_doc_counts[q]; ++d) {
      const double u =
          static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
      if (u < frac) sched.extra_docs.push_back(d);
    }
  }
  return out;
}

}  // namespace scrub
