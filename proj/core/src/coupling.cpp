#include "cramerlab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cramerlab/error.hpp"
#include "cramerlab/numeric.hpp"
#include "cramerlab/rng.hpp"
#include "parallel.hpp"

namespace cramerlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kDrawBlock = 4096;
const double kLogHalf = std::log(0.5);

// Φ^{-1}(F) from ln F and ln(1 − F), choosing the better-conditioned side.
double normal_break(double log_cdf, double log_sf) {
  if (log_sf == kNegInf) return kInf;
  if (log_cdf == kNegInf) return -kInf;
  if (log_cdf <= kLogHalf) return -normal_quantile_upper_log(log_cdf);
  return normal_quantile_upper_log(log_sf);
}

}  // namespace

QuantileTransform QuantileTransform::from_table(const TailTable& table) {
  QuantileTransform q;
  const std::size_t size = table.size();
  for (std::size_t i = 0; i < size; ++i) {
    if (table.logp()[i] == kNegInf) continue;
    q.atoms_.push_back(table.w_hat_at(i));
    q.log_cdf_.push_back(table.log_cdf_at(i));
    q.log_sf_.push_back(i + 1 < size ? table.log_sf_at(i + 1) : kNegInf);
  }
  q.log_sf_.back() = kNegInf;
  for (std::size_t i = 0; i < q.atoms_.size(); ++i) q.breaks_.push_back(normal_break(q.log_cdf_[i], q.log_sf_[i]));
  return q;
}

QuantileTransform QuantileTransform::from_samples(std::span<const double> samples, double scale) {
  if (samples.size() < 1000) throw Error(ErrorCode::TooFewSamples, "empirical quantile transform needs >= 1000 samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double nd = static_cast<double>(s.size());
  QuantileTransform q;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    q.atoms_.push_back(s[i] / scale);
    q.log_cdf_.push_back(std::log(static_cast<double>(j) / nd));
    q.log_sf_.push_back(j == s.size() ? kNegInf : std::log(static_cast<double>(s.size() - j) / nd));
    i = j;
  }
  for (std::size_t i = 0; i < q.atoms_.size(); ++i) q.breaks_.push_back(normal_break(q.log_cdf_[i], q.log_sf_[i]));
  return q;
}

double QuantileTransform::operator()(double s) const {
  if (!(s > 0.0 && s <= 1.0)) throw Error(ErrorCode::OutOfRange, "quantile transform needs s in (0, 1]");
  // First atom with F(x_i) ≥ s.
  std::size_t lo = 0, hi = atoms_.size() - 1;
  const bool upper = s > 0.5;
  const double target = upper ? std::log1p(-s) : std::log(s);
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const bool reached = upper ? log_sf_[mid] <= target : log_cdf_[mid] >= target;
    if (reached) hi = mid;
    else lo = mid + 1;
  }
  return atoms_[lo];
}

double QuantileTransform::from_normal(double z) const {
  const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), z);
  return atoms_[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - breaks_.begin(),
                                                                 static_cast<std::ptrdiff_t>(atoms_.size()) - 1))];
}

std::vector<double> QuantileTransform::induced_masses() const {
  std::vector<double> mass(atoms_.size());
  double lower = -kInf;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const double upper = breaks_[i];
    mass[i] = lower >= 0.0 ? normal_sf(lower) - normal_sf(upper) : normal_cdf(upper) - normal_cdf(lower);
    lower = upper;
  }
  return mass;
}

std::vector<CoupledPair> sample_coupled_pairs(const QuantileTransform& transform, std::size_t draws,
                                              std::uint64_t seed, unsigned threads) {
  std::vector<CoupledPair> pairs(draws);
  const std::size_t blocks = (draws + kDrawBlock - 1) / kDrawBlock;
  detail::parallel_ranges(blocks, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      Rng rng(derive_seed(seed, b));
      const std::size_t stop = std::min(draws, (b + 1) * kDrawBlock);
      for (std::size_t i = b * kDrawBlock; i < stop; ++i) {
        const double z = rng.normal();
        pairs[i] = {z, transform.from_normal(z)};
      }
    }
  });
  return pairs;
}

CouplingReport coupling_report(const ModelSpec& model, std::size_t n, std::size_t m, std::size_t draws,
                               std::uint64_t seed, const CouplingConstants& constants, unsigned threads,
                               std::vector<CoupledPair>* pairs_out) {
  if (draws < 10) throw Error(ErrorCode::TooFewSamples, "coupling report needs at least 10 draws");
  const CoefficientSet coeffs = coefficient_set(model, n, m);
  CouplingReport rep;
  rep.n = n;
  rep.m = m;
  rep.draws = draws;
  rep.seed = seed;
  rep.constants = constants;
  rep.varsigma = coeffs.varsigma();
  if (!std::isnormal(rep.varsigma) || rep.varsigma < 0.0)
    throw Error(ErrorCode::DegenerateGap, "varsigma_n underflows; the normalized gap is undefined");

  const TailTable table = distribution_of_Sn(model, n);
  const QuantileTransform transform = QuantileTransform::from_table(table);
  std::vector<CoupledPair> pairs = sample_coupled_pairs(transform, draws, seed, threads);

  std::vector<double> gap(draws);
  const double region = constants.alpha / rep.varsigma;
  for (std::size_t i = 0; i < draws; ++i) {
    const double y = pairs[i].y;
    const double diff = std::abs(y - pairs[i].z);
    gap[i] = diff / rep.varsigma;
    if (std::abs(y) <= region) {
      ++rep.admissible;
      if (diff > 2.0 * constants.c_alpha * (y * y + 1.0) * rep.varsigma) ++rep.violations;
    }
  }
  rep.violation_fraction = static_cast<double>(rep.violations) / static_cast<double>(draws);

  // Marginal check: Y only takes atom values, so compare the CDFs at the atoms.
  {
    std::vector<double> ys(draws);
    for (std::size_t i = 0; i < draws; ++i) ys[i] = pairs[i].y;
    std::sort(ys.begin(), ys.end());
    const auto atoms = transform.atoms();
    const auto masses = transform.induced_masses();
    std::size_t seen = 0;
    double cdf = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      while (seen < draws && ys[seen] <= atoms[i]) ++seen;
      cdf += masses[i];
      rep.marginal_ks = std::max(rep.marginal_ks, std::abs(static_cast<double>(seen) / draws - cdf));
    }
  }

  std::sort(gap.begin(), gap.end());
  const double nd = static_cast<double>(draws);
  rep.gap_median = draws % 2 ? gap[draws / 2] : 0.5 * (gap[draws / 2 - 1] + gap[draws / 2]);
  const auto survival = [&](double x) {
    const auto first = std::lower_bound(gap.begin(), gap.end(), x);
    return static_cast<double>(gap.end() - first) / nd;
  };
  for (std::size_t k = 0; k < 100; ++k) {
    const double x = gap[k * draws / 100];
    rep.survival_x.push_back(x);
    rep.survival_p.push_back(survival(x));
  }

  // Least squares of ln P̂(G ≥ x) on x over the upper decile.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = (9 * draws) / 10; i < draws; ++i) {
    const double x = gap[i];
    const double y = std::log(survival(x));
    pts.emplace_back(x, y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(pts.size());
  const double cxx = sxx - sx * sx / k;
  if (pts.size() >= 3 && cxx > 0.0) {
    rep.lambda_hat = (sxy - sx * sy / k) / cxx;
    const double intercept = (sy - rep.lambda_hat * sx) / k;
    double sse = 0.0;
    for (const auto& [x, y] : pts) {
      const double r = y - intercept - rep.lambda_hat * x;
      sse += r * r;
    }
    rep.lambda_se = std::sqrt(sse / (k - 2.0) / cxx);
  }
  if (pairs_out) *pairs_out = std::move(pairs);
  return rep;
}

}  // namespace cramerlab
