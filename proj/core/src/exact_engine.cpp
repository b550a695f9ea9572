#include "cramerlab/exact_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cramerlab/error.hpp"

namespace cramerlab {

namespace {

constexpr double kAtomTol = 1e-9;

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < w.size(); ++i) acc += static_cast<long double>(w[i]) * a[i] * b[i];
  return static_cast<double>(acc);
}

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double ConditionalMoments::sup_second_dev(double sigma_n) const noexcept {
  const double scale = static_cast<double>(m) * sigma_n * sigma_n;
  double dev = 0.0;
  for (double b : second_by_state) dev = std::max(dev, std::abs(b / scale - 1.0));
  return dev;
}

std::vector<double> ConditionalMoments::martingale_variance() const {
  std::vector<double> v(mean_by_state.size());
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = second_by_state[s] - mean_by_state[s] * mean_by_state[s];
  return v;
}

TailTable TailTable::from_log_masses(std::size_t n, std::int64_t denom, std::int64_t offset, double center,
                                     std::vector<double> logp, double sigma_n) {
  if (logp.empty()) throw Error(ErrorCode::InvalidModel, "tail table needs at least one atom");
  if (!(sigma_n > 0.0)) throw Error(ErrorCode::DegenerateVariance, "tail table needs sigma_n > 0");
  TailTable t;
  t.n_ = n;
  t.denom_ = denom;
  t.offset_ = offset;
  t.center_ = center;
  t.sigma_n_ = sigma_n;
  t.logp_ = std::move(logp);
  const std::size_t size = t.logp_.size();
  t.log_cdf_.resize(size);
  t.log_sf_.resize(size);
  double acc = kNegInf;
  // Cumulative masses are probabilities; round-off above 1 is clipped.
  for (std::size_t i = 0; i < size; ++i) t.log_cdf_[i] = std::min(0.0, acc = log_add_exp(acc, t.logp_[i]));
  acc = kNegInf;
  for (std::size_t i = size; i-- > 0;) t.log_sf_[i] = std::min(0.0, acc = log_add_exp(acc, t.logp_[i]));
  return t;
}

double TailTable::s_at(std::size_t i) const noexcept {
  return (static_cast<double>(sum_at(i)) - center_) / static_cast<double>(denom_);
}

double TailTable::w_at(std::size_t i) const noexcept { return s_at(i) / std::sqrt(static_cast<double>(n_)); }

double TailTable::cdf_at(std::size_t i) const noexcept {
  // Past the median use the survival side so values near 1 keep their precision.
  if (i + 1 >= size()) return 1.0;
  if (log_sf_[i + 1] < std::log(0.5)) return 1.0 - std::exp(log_sf_[i + 1]);
  return std::exp(log_cdf_[i]);
}

double TailTable::log_upper_tail(double w) const noexcept {
  // k ≥ center + w·denom·√n
  const double t = center_ + w * static_cast<double>(denom_) * std::sqrt(static_cast<double>(n_));
  const double tol = kAtomTol * std::max(1.0, std::abs(t));
  const double first = std::ceil(t - tol) - static_cast<double>(offset_);
  if (first <= 0.0) return log_sf_.front();
  if (first >= static_cast<double>(size())) return kNegInf;
  return log_sf_[static_cast<std::size_t>(first)];
}

double TailTable::log_lower_tail(double w) const noexcept {
  const double t = center_ + w * static_cast<double>(denom_) * std::sqrt(static_cast<double>(n_));
  const double tol = kAtomTol * std::max(1.0, std::abs(t));
  const double last = std::floor(t + tol) - static_cast<double>(offset_);
  if (last < 0.0) return kNegInf;
  if (last >= static_cast<double>(size() - 1)) return log_cdf_.back();
  return log_cdf_[static_cast<std::size_t>(last)];
}

std::vector<double> autocovariances(const FiniteLatticeModel& model, std::size_t kmax) {
  const auto pi = model.pi();
  const auto x = model.payoff();
  std::vector<double> v(x.begin(), x.end()), next(x.size());
  std::vector<double> gamma(kmax + 1);
  for (std::size_t k = 0; k <= kmax; ++k) {
    if (k > 0) {
      model.apply(v, next);
      v.swap(next);
    }
    gamma[k] = weighted_dot(pi, x, v);
  }
  return gamma;
}

double autocovariance(const FiniteLatticeModel& model, std::size_t k) { return autocovariances(model, k)[k]; }

double autocovariance(const ModelSpec& model, std::size_t k) {
  return autocovariance(require_exact(model, "autocovariance"), k);
}

double sigma_n(const FiniteLatticeModel& model, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::ParamOutOfRange, "sigma_n needs n >= 1");
  const auto gamma = autocovariances(model, n - 1);
  const double nd = static_cast<double>(n);
  long double var = gamma[0];
  for (std::size_t k = 1; k < n; ++k) var += 2.0L * (1.0L - static_cast<long double>(k) / nd) * gamma[k];
  if (var <= 1e-14L)
    throw Error(ErrorCode::DegenerateVariance, "sigma_n^2 = " + std::to_string(static_cast<double>(var)) +
                                                   " at n = " + std::to_string(n));
  return std::sqrt(static_cast<double>(var));
}

double sigma_n(const ModelSpec& model, std::size_t n) { return sigma_n(require_exact(model, "sigma_n"), n); }

double asymptotic_variance(const FiniteLatticeModel& model) {
  const auto pi = model.pi();
  const auto x = model.payoff();
  std::vector<double> v(x.begin(), x.end()), next(x.size());
  long double var = weighted_dot(pi, x, v);
  const double floor = 1e-17 * model.sup_norm();
  for (std::size_t k = 1; k < 100'000'000; ++k) {
    model.apply(v, next);
    v.swap(next);
    var += 2.0L * weighted_dot(pi, x, v);
    if (sup_abs(v) <= floor) break;
  }
  if (var <= 1e-14L) throw Error(ErrorCode::DegenerateVariance, "asymptotic variance vanishes");
  return static_cast<double>(var);
}

ConditionalMoments conditional_block_moments(const FiniteLatticeModel& model, std::size_t m) {
  if (m < 1) throw Error(ErrorCode::ParamOutOfRange, "block length must be >= 1");
  const std::size_t size = model.size();
  const auto x = model.payoff();
  // Backward recursion on the first step:
  //   a_t(s) = Σ_{s'} P(s,s') (X(s') + a_{t−1}(s'))
  //   b_t(s) = Σ_{s'} P(s,s') (X(s')² + 2X(s') a_{t−1}(s') + b_{t−1}(s'))
  std::vector<double> a(size, 0.0), b(size, 0.0), ga(size), gb(size), na(size), nb(size);
  for (std::size_t t = 1; t <= m; ++t) {
    for (std::size_t s = 0; s < size; ++s) {
      ga[s] = x[s] + a[s];
      gb[s] = x[s] * x[s] + 2.0 * x[s] * a[s] + b[s];
    }
    model.apply(ga, na);
    model.apply(gb, nb);
    a.swap(na);
    b.swap(nb);
  }
  ConditionalMoments cm;
  cm.m = m;
  cm.sup_mean = sup_abs(a);
  cm.mean_by_state = std::move(a);
  cm.second_by_state = std::move(b);
  return cm;
}

ConditionalMoments conditional_block_moments(const ModelSpec& model, std::size_t m) {
  return conditional_block_moments(require_exact(model, "conditional_block_moments"), m);
}

std::vector<double> conditional_mean_norms(const FiniteLatticeModel& model, std::size_t horizon) {
  const std::size_t size = model.size();
  const auto x = model.payoff();
  std::vector<double> v(x.begin(), x.end()), next(size), acc(size, 0.0);
  std::vector<double> norms(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    model.apply(v, next);
    v.swap(next);
    for (std::size_t s = 0; s < size; ++s) acc[s] += v[s];
    norms[t - 1] = sup_abs(acc);
  }
  return norms;
}

TailTable distribution_of_Sn(const FiniteLatticeModel& model, std::size_t n, const DpBudget& budget) {
  if (n < 1) throw Error(ErrorCode::ParamOutOfRange, "distribution_of_Sn needs n >= 1");
  const std::size_t states = model.size();
  const auto f = model.f_num();
  const std::int64_t fmin = *std::min_element(f.begin(), f.end());
  const std::int64_t fmax = *std::max_element(f.begin(), f.end());
  const std::size_t spread = static_cast<std::size_t>(fmax - fmin);
  const std::size_t width = n * spread + 1;
  const double bytes = 2.0 * static_cast<double>(states) * static_cast<double>(width) * sizeof(double);
  if (bytes > static_cast<double>(budget.max_bytes))
    throw Error(ErrorCode::BudgetExceeded, "DP needs " + std::to_string(states) + " states x " +
                                               std::to_string(width) + " sums x 2 layers = " +
                                               std::to_string(static_cast<std::uint64_t>(bytes)) +
                                               " bytes > budget " + std::to_string(budget.max_bytes));

  // Work with g(s) = f_num(s) − fmin ≥ 0. Layer t holds
  // ln P(Y_t = s, Σ_{i≤t} g(Y_i) = k) at [s·width + k], k ∈ [0, t·spread].
  std::vector<std::size_t> g(states);
  for (std::size_t s = 0; s < states; ++s) g[s] = static_cast<std::size_t>(f[s] - fmin);

  std::vector<double> cur(states * width, kNegInf), next(states * width, kNegInf);
  const auto pi = model.pi();
  for (std::size_t s = 0; s < states; ++s)
    if (pi[s] > 0.0) cur[s * width + g[s]] = std::log(pi[s]);

  std::vector<std::vector<std::pair<std::size_t, double>>> incoming(states);
  for (std::size_t s = 0; s < states; ++s)
    for (const Edge& e : model.predecessors(s)) incoming[s].emplace_back(e.state, std::log(e.prob));

  for (std::size_t t = 2; t <= n; ++t) {
    const std::size_t prev_hi = (t - 1) * spread;
    for (std::size_t s = 0; s < states; ++s) {
      double* out = next.data() + s * width;
      std::fill(out, out + t * spread + 1, kNegInf);
      double* dst = out + g[s];
      for (const auto& [p, lp] : incoming[s]) {
        const double* src = cur.data() + p * width;
        for (std::size_t k = 0; k <= prev_hi; ++k) {
          const double v = src[k];
          if (v == kNegInf) continue;
          dst[k] = log_add_exp(dst[k], v + lp);
        }
      }
    }
    cur.swap(next);
  }

  std::vector<double> logp(width, kNegInf);
  std::vector<double> column(states);
  for (std::size_t k = 0; k < width; ++k) {
    for (std::size_t s = 0; s < states; ++s) column[s] = cur[s * width + k];
    logp[k] = log_sum_exp(column);
  }
  std::size_t first = 0, last = width - 1;
  while (first < last && logp[first] == kNegInf) ++first;
  while (last > first && logp[last] == kNegInf) --last;
  std::vector<double> trimmed(logp.begin() + static_cast<std::ptrdiff_t>(first),
                              logp.begin() + static_cast<std::ptrdiff_t>(last) + 1);

  const auto nn = static_cast<std::int64_t>(n);
  return TailTable::from_log_masses(n, model.denom(), nn * fmin + static_cast<std::int64_t>(first),
                                    static_cast<double>(n) * model.center_num(), std::move(trimmed),
                                    sigma_n(model, n));
}

TailTable distribution_of_Sn(const ModelSpec& model, std::size_t n, const DpBudget& budget) {
  return distribution_of_Sn(require_exact(model, "distribution_of_Sn"), n, budget);
}

double exact_tail(const TailTable& table, double x) noexcept {
  return table.log_upper_tail(x * table.sigma_n());
}

double exact_lower_tail(const TailTable& table, double x) noexcept {
  return table.log_lower_tail(-x * table.sigma_n());
}

double quantile(const TailTable& table, double s) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::OutOfRange, "quantile level must lie in (0,1)");
  const double log_s = std::log(s);
  const double log_u = std::log1p(-s);
  // F(atom i) ≥ s, tested on whichever side of the law is better conditioned.
  std::size_t lo = 0, hi = table.size() - 1;
  auto reaches = [&](std::size_t i) {
    if (i + 1 >= table.size()) return true;
    if (s <= 0.5) return table.log_cdf_at(i) >= log_s;
    return table.log_sf_at(i + 1) <= log_u;
  };
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (reaches(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return table.w_hat_at(lo);
}

double ks_distance_exact(const TailTable& table) {
  double sup = 0.0;
  double before = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table.logp()[i] == kNegInf) continue;
    const double phi = normal_cdf(table.w_hat_at(i));
    const double after = table.cdf_at(i);
    sup = std::max({sup, std::abs(before - phi), std::abs(after - phi)});
    before = after;
  }
  return sup;
}

}  // namespace cramerlab
