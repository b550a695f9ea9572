#include "cramerlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cramerlab/bounds.hpp"
#include "cramerlab/error.hpp"
#include "cramerlab/exact_engine.hpp"
#include "cramerlab/numeric.hpp"
#include "cramerlab/rng.hpp"
#include "parallel.hpp"

namespace cramerlab {

namespace {

constexpr double kMaxRatioX = 37.0;

double hit_threshold(double t) { return t - 1e-9 * std::max(1.0, std::abs(t)); }

void check_ratio_grid(std::span<const double> x_grid) {
  for (double x : x_grid) {
    if (!(x >= 0.0)) throw Error(ErrorCode::NegativeX, "ratio grid needs x >= 0");
    if (x > kMaxRatioX)
      throw Error(ErrorCode::ZeroDenominator, "1 - Phi(x) is not representable for x = " + std::to_string(x));
  }
}

}  // namespace

Interval wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nd = static_cast<double>(n);
  const double p = static_cast<double>(k) / nd;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nd;
  const double center = (p + z2 / (2.0 * nd)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nd + z2 / (4.0 * nd * nd)) / denom;
  Interval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  // Keep the estimate inside the interval despite rounding.
  ci.lo = std::min(ci.lo, p);
  ci.hi = std::max(ci.hi, p);
  return ci;
}

std::vector<double> simulate_W(const ModelSpec& model, std::size_t n, std::size_t chains, std::uint64_t seed,
                               unsigned threads) {
  if (n < 1) throw Error(ErrorCode::ParamOutOfRange, "simulate_W needs n >= 1");
  if (chains < 1) throw Error(ErrorCode::ParamOutOfRange, "simulate_W needs chains >= 1");
  std::vector<double> out(chains);
  const double root = std::sqrt(static_cast<double>(n));
  if (const auto* exact = std::get_if<FiniteLatticeModel>(&model)) {
    const auto x = exact->payoff();
    detail::parallel_ranges(chains, threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const auto path = sample_states(*exact, n, derive_seed(seed, i));
        long double s = 0.0L;
        for (std::size_t t = 1; t <= n; ++t) s += x[path[t]];
        out[i] = static_cast<double>(s) / root;
      }
    });
  } else {
    const auto& sampled = std::get<SampledModel>(model);
    detail::parallel_ranges(chains, threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const SampledPath path = sampled.sample(n, derive_seed(seed, i));
        long double s = 0.0L;
        for (double v : path.values) s += v;
        out[i] = static_cast<double>(s) / root;
      }
    });
  }
  return out;
}

TailEstimate estimate_tail(std::span<const double> samples, double sigma_n, double x, std::uint64_t seed) {
  TailEstimate est;
  est.x = x;
  est.chains = samples.size();
  est.seed = seed;
  const double thr = hit_threshold(x * sigma_n);
  for (double w : samples)
    if (w >= thr) ++est.hits;
  est.p = samples.empty() ? 0.0 : static_cast<double>(est.hits) / static_cast<double>(samples.size());
  const Interval ci = wilson_interval(est.hits, samples.size());
  est.lo = ci.lo;
  est.hi = ci.hi;
  return est;
}

std::string_view to_string(RatioMode mode) noexcept { return mode == RatioMode::Exact ? "exact" : "mc"; }

namespace {

RatioCurve empty_curve(const CoefficientSet& coeffs, std::span<const double> x_grid, const RatioOptions& options) {
  check_ratio_grid(x_grid);
  RatioCurve curve;
  curve.n = coeffs.n;
  curve.m = coeffs.m;
  curve.source = options.mode;
  curve.gate_mode = options.gates.mode;
  curve.x_grid.assign(x_grid.begin(), x_grid.end());
  const std::size_t g = x_grid.size();
  for (auto* v : {&curve.ratio, &curve.lo, &curve.hi, &curve.left_ratio, &curve.left_lo, &curve.left_hi})
    v->resize(g);
  const BoundCurve env = cramer_envelope_curve(coeffs, x_grid, options.gates, options.envelope_c);
  curve.envelope = env.value;
  curve.envelope_valid = env.valid;
  return curve;
}

}  // namespace

RatioCurve ratio_curve(const TailTable& table, const CoefficientSet& coeffs, std::span<const double> x_grid,
                       const RatioOptions& options) {
  RatioOptions opts = options;
  opts.mode = RatioMode::Exact;
  RatioCurve curve = empty_curve(coeffs, x_grid, opts);
  const double sig = table.sigma_n();
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    curve.ratio[i] = curve.lo[i] = curve.hi[i] = std::exp(table.log_upper_tail(x * sig) - log_normal_sf(x));
    curve.left_ratio[i] = curve.left_lo[i] = curve.left_hi[i] =
        std::exp(table.log_lower_tail(-x * sig) - log_normal_cdf(-x));
  }
  return curve;
}

RatioCurve ratio_curve(std::span<const double> samples, double sigma_n, const CoefficientSet& coeffs,
                       std::span<const double> x_grid, const RatioOptions& options) {
  RatioOptions opts = options;
  opts.mode = RatioMode::MonteCarlo;
  RatioCurve curve = empty_curve(coeffs, x_grid, opts);
  curve.chains = samples.size();
  curve.seed = options.seed;
  std::vector<double> neg(samples.size());
  std::transform(samples.begin(), samples.end(), neg.begin(), [](double v) { return -v; });
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    const double sf = normal_sf(x);
    const TailEstimate right = estimate_tail(samples, sigma_n, x, options.seed);
    const TailEstimate left = estimate_tail(neg, sigma_n, x, options.seed);
    curve.ratio[i] = right.p / sf;
    curve.lo[i] = right.lo / sf;
    curve.hi[i] = right.hi / sf;
    curve.left_ratio[i] = left.p / sf;
    curve.left_lo[i] = left.lo / sf;
    curve.left_hi[i] = left.hi / sf;
  }
  return curve;
}

RatioCurve ratio_curve(const ModelSpec& model, std::size_t n, std::size_t m, std::span<const double> x_grid,
                       const RatioOptions& options) {
  check_ratio_grid(x_grid);
  const bool exact = std::holds_alternative<FiniteLatticeModel>(model);
  const CoefficientSet coeffs =
      exact ? coefficient_set(model, n, m) : coefficient_bounds(std::get<SampledModel>(model), n, m, {});
  if (options.mode == RatioMode::Exact) return ratio_curve(distribution_of_Sn(model, n), coeffs, x_grid, options);
  if (options.chains < 1) throw Error(ErrorCode::ParamOutOfRange, "mc ratio curve needs chains >= 1");
  const std::vector<double> w = simulate_W(model, n, options.chains, options.seed, options.threads);
  return ratio_curve(w, coeffs.sigma_n, coeffs, x_grid, options);
}

double empirical_ks(std::span<const double> samples, double sigma_n) {
  if (samples.size() < 100) throw Error(ErrorCode::TooFewSamples, "empirical_ks needs at least 100 samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double nd = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    const double phi = normal_cdf(s[i] / sigma_n);
    d = std::max({d, std::abs(static_cast<double>(i) / nd - phi), std::abs(static_cast<double>(j) / nd - phi)});
    i = j;
  }
  return d;
}

double log_binomial_upper_tail(std::size_t n, double p, std::int64_t k) {
  if (k <= 0) return 0.0;
  if (static_cast<std::size_t>(k) > n) return kNegInf;
  if (p <= 0.0) return kNegInf;
  if (p >= 1.0) return 0.0;
  const double nd = static_cast<double>(n);
  const double lp = std::log(p), lq = std::log1p(-p);
  const double lgn = std::lgamma(nd + 1.0);
  std::vector<double> terms;
  double peak = kNegInf;
  for (std::size_t j = static_cast<std::size_t>(k); j <= n; ++j) {
    const double jd = static_cast<double>(j);
    const double t = lgn - std::lgamma(jd + 1.0) - std::lgamma(nd - jd + 1.0) + jd * lp + (nd - jd) * lq;
    terms.push_back(t);
    peak = std::max(peak, t);
    if (t < peak - 80.0) break;  // past the mode the terms only shrink
  }
  return log_sum_exp(terms);
}

MdpResult mdp_diagnostic(const ModelSpec& model, double c, double a_exponent, std::span<const std::size_t> n_grid) {
  if (!(a_exponent > 0.0 && a_exponent < 0.5))
    throw Error(ErrorCode::ExponentOutOfRange, "mdp needs a_exponent in (0, 1/2)");
  const FiniteLatticeModel& exact = require_exact(model, "mdp_diagnostic");
  MdpResult res;
  res.c = c;
  res.a_exponent = a_exponent;
  res.sigma2 = asymptotic_variance(exact);
  res.limit = -c * c / (2.0 * res.sigma2);

  // Two-point i.i.d. payoffs reduce to a binomial count.
  std::vector<std::size_t> support;
  for (std::size_t s = 0; s < exact.size(); ++s)
    if (exact.pi()[s] > 0.0) support.push_back(s);
  std::int64_t lo_f = 0, hi_f = 0;
  double p_hi = 0.0;
  bool binomial = exact.is_iid();
  if (binomial) {
    const auto f = exact.f_num();
    lo_f = hi_f = f[support.front()];
    for (std::size_t s : support) {
      lo_f = std::min(lo_f, f[s]);
      hi_f = std::max(hi_f, f[s]);
    }
    for (std::size_t s : support) {
      if (f[s] == hi_f) p_hi += exact.pi()[s];
      else if (f[s] != lo_f) binomial = false;
    }
  }
  res.method = binomial ? "binomial" : "dp";

  for (std::size_t n : n_grid) {
    if (n < 1) throw Error(ErrorCode::ParamOutOfRange, "mdp grid needs n >= 1");
    MdpPoint pt;
    pt.n = n;
    const double nd = static_cast<double>(n);
    pt.a_n = std::pow(nd, -a_exponent);
    const double w = c / pt.a_n;  // W_n threshold
    if (binomial) {
      // Σ f_num = n·lo + K·(hi − lo) ≥ n·center + w√n·denom
      const double t = (nd * exact.center_num() + w * std::sqrt(nd) * static_cast<double>(exact.denom()) -
                        nd * static_cast<double>(lo_f)) /
                       static_cast<double>(hi_f - lo_f);
      const double kk = std::ceil(hit_threshold(t));
      pt.log_tail = kk > nd ? kNegInf : log_binomial_upper_tail(n, p_hi, static_cast<std::int64_t>(std::max(kk, 0.0)));
    } else {
      pt.log_tail = distribution_of_Sn(exact, n).log_upper_tail(w);
    }
    pt.scaled = pt.a_n * pt.a_n * pt.log_tail;
    res.points.push_back(pt);
  }
  return res;
}

}  // namespace cramerlab
