#pragma once

#include <cstdint>
#include <vector>

namespace scrub {

// Truncated power-exponential upsampling curve:
//   f(x) = 0                          for x < a
//   f(x) = C * (x-a)^p * e^{lambda*(x-a)}  for x >= a
// with p >= 0, lambda >= 0 (monotone), C > 0, a in [0,1).
struct CurveParams {
  double p = 0.0;
  double lambda = 0.0;
  double C = 1.0;
  double a = 0.0;
};

enum class CurveFamily {
  kPowerExponential,  // p free
  kExponential,       // baseline: p pinned to 0
};

// Yield/cap constraints: integral of f over [0,1] must equal target_ratio and
// the mean of f over the top `top_bucket_fraction` slice must not exceed
// max_ratio.
struct YieldSpec {
  double target_ratio = 1.0;
  double max_ratio = 7.0;
  double top_bucket_fraction = 0.05;
};

inline constexpr double kDefaultCutoff = 0.40;

double eval_curve(const CurveParams& params, double x);

// Definite integral of the curve over [lo, hi] (clamped to [0,1]). Closed
// forms when p == 0 or lambda == 0; adaptive Simpson (abs tol 1e-9, with a
// machine-precision relative floor) otherwise.
double curve_integral(const CurveParams& params, double lo, double hi);

// Finds the steepest feasible curve: for each exponent p on a fixed grid the
// largest lambda in [0, 50] satisfying the top-slice cap is located by
// bisection (the cap mean is monotone in lambda), C follows from the yield
// constraint in closed form. Among feasible (p, lambda) the largest lambda
// wins, ties broken by larger p. Throws ConfigError naming the violated bound
// when the spec is infeasible (target_ratio > max_ratio * (1-a)) or malformed.
CurveParams solve_curve(const YieldSpec& spec, double a,
                        CurveFamily family = CurveFamily::kPowerExponential);

// Per-bucket average upsampling factors over a percentile partition.
struct BucketPlan {
  std::vector<double> boundaries;  // size = buckets+1, 0 .. 1, strictly increasing
  std::vector<double> rates;       // size = buckets, each >= 0
};

std::vector<double> vigintile_boundaries();  // 21 points, width 0.05

// rate_q = integral over the bucket / bucket width. Boundaries must start at
// 0, end at 1, and be strictly increasing (zero-width buckets are an error).
BucketPlan bucket_rates(const CurveParams& params, const std::vector<double>& boundaries);

enum class CombineMode { kArithmetic, kGeometric };

// Rate-wise mean of two plans over identical boundaries.
BucketPlan combine_plans(const BucketPlan& x, const BucketPlan& y, CombineMode mode);

// Realization of a fractional rate r: floor(r) full copies of every document
// plus one extra copy with independent probability r - floor(r).
struct BucketSchedule {
  std::uint64_t full_copies = 0;
  std::vector<std::uint64_t> extra_docs;  // indices into the bucket's doc list
};

struct SamplingPlan {
  std::vector<BucketSchedule> buckets;
  std::uint64_t seed = 0;
};

// Deterministic per seed; bucket_doc_counts[i] documents in bucket i.
SamplingPlan plan_to_sampling(const BucketPlan& plan,
                              const std::vector<std::uint64_t>& bucket_doc_counts,
                              std::uint64_t seed);

}  // namespace scrub
