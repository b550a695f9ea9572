// Independent reference computations for the test suites. Nothing here calls
// into the library's numerical code.
#pragma once

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

// Small Markov chain given densely: P row-major, payoff on integer lattice.
struct Chain {
  std::size_t states = 0;
  std::vector<double> P;
  std::vector<double> pi;
  std::vector<std::int64_t> f;  // integer payoff numerator
};

inline Chain two_state(double rho) {
  const double stay = (1.0 + rho) / 2.0;
  return {2, {stay, 1.0 - stay, 1.0 - stay, stay}, {0.5, 0.5}, {-1, 1}};
}

// Walks all paths Y_0..Y_n, calling visit(path, probability).
inline void for_each_path(const Chain& c, std::size_t n,
                          const std::function<void(const std::vector<std::size_t>&, long double)>& visit) {
  std::vector<std::size_t> path(n + 1);
  std::function<void(std::size_t, long double)> rec = [&](std::size_t t, long double p) {
    if (p == 0.0L) return;
    if (t == n) {
      visit(path, p);
      return;
    }
    for (std::size_t s = 0; s < c.states; ++s) {
      path[t + 1] = s;
      rec(t + 1, p * static_cast<long double>(c.P[path[t] * c.states + s]));
    }
  };
  for (std::size_t s = 0; s < c.states; ++s) {
    path[0] = s;
    rec(0, static_cast<long double>(c.pi[s]));
  }
}

// Law of Σ_{i=1}^n f(Y_i) by exhaustive enumeration.
inline std::map<std::int64_t, long double> sum_law(const Chain& c, std::size_t n) {
  std::map<std::int64_t, long double> law;
  for_each_path(c, n, [&](const std::vector<std::size_t>& path, long double p) {
    std::int64_t s = 0;
    for (std::size_t t = 1; t <= n; ++t) s += c.f[path[t]];
    law[s] += p;
  });
  return law;
}

// P(max_{i≤n} |S_i − i·mean| ≥ x) by enumeration.
inline long double max_abs_tail(const Chain& c, std::size_t n, double mean, double x) {
  long double total = 0.0L;
  for_each_path(c, n, [&](const std::vector<std::size_t>& path, long double p) {
    double s = 0.0, best = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
      s += static_cast<double>(c.f[path[t]]) - mean;
      best = std::max(best, std::abs(s));
    }
    if (best >= x - 1e-12) total += p;
  });
  return total;
}

// Law of max_{i≤n} |S_i − i·mean| by enumeration.
inline std::map<double, long double> max_abs_law(const Chain& c, std::size_t n, double mean) {
  std::map<double, long double> law;
  for_each_path(c, n, [&](const std::vector<std::size_t>& path, long double p) {
    double s = 0.0, best = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
      s += static_cast<double>(c.f[path[t]]) - mean;
      best = std::max(best, std::abs(s));
    }
    law[best] += p;
  });
  return law;
}

// E[S_m | Y_0 = s] and E[S_m² | Y_0 = s] by enumeration of the m steps after s.
inline void conditional_moments(const Chain& c, std::size_t m, double mean, std::vector<long double>& first,
                                std::vector<long double>& second) {
  first.assign(c.states, 0.0L);
  second.assign(c.states, 0.0L);
  for (std::size_t s0 = 0; s0 < c.states; ++s0) {
    std::function<void(std::size_t, std::size_t, long double, long double)> rec =
        [&](std::size_t t, std::size_t cur, long double p, long double sum) {
          if (t == m) {
            first[s0] += p * sum;
            second[s0] += p * sum * sum;
            return;
          }
          for (std::size_t s = 0; s < c.states; ++s) {
            const long double q = static_cast<long double>(c.P[cur * c.states + s]);
            if (q > 0) rec(t + 1, s, p * q, sum + static_cast<long double>(c.f[s]) - mean);
          }
        };
    rec(0, s0, 1.0L, 0.0L);
  }
}

// Binomial(n, p) pmf in long double.
inline long double log_binomial_pmf(std::size_t n, std::size_t k, long double p) {
  const long double nd = n, kd = k;
  return std::lgamma(nd + 1) - std::lgamma(kd + 1) - std::lgamma(nd - kd + 1) + kd * std::log(p) +
         (nd - kd) * std::log1p(-p);
}

// ln P(Bin(n, 1/2) ≥ k), accumulated in long double from the far end.
inline long double log_fair_binomial_upper(std::size_t n, std::size_t k) {
  if (k == 0) return 0.0L;
  long double peak = log_binomial_pmf(n, k, 0.5L);
  long double acc = 0.0L;
  for (std::size_t j = k; j <= n; ++j) {
    const long double t = log_binomial_pmf(n, j, 0.5L) - peak;
    if (t < -200.0L) break;
    acc += std::exp(t);
  }
  return peak + std::log(acc);
}

// 1 − Φ(x) in extended precision.
inline long double normal_sf(long double x) { return 0.5L * std::erfc(x / std::sqrt(2.0L)); }

// two_state(ρ) closed forms with X = ±1.
inline double two_state_sigma2(double rho, std::size_t n) {
  long double v = 1.0L;
  long double rk = 1.0L;
  for (std::size_t k = 1; k < n; ++k) {
    rk *= rho;
    v += 2.0L * (1.0L - static_cast<long double>(k) / n) * rk;
  }
  return static_cast<double>(v);
}

// ‖E[S_N|F₀]‖∞ = |ρ(1 − ρ^N)/(1 − ρ)|.
inline double two_state_cond_mean(double rho, std::size_t N) {
  return std::abs(rho * (1.0 - std::pow(rho, static_cast<double>(N))) / (1.0 - rho));
}

}  // namespace oracle
