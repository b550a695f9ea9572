#include "cramerlab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cramerlab/error.hpp"
#include "cramerlab/exact_engine.hpp"
#include "cramerlab/numeric.hpp"

namespace cramerlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Work cap (state-transitions) for iterating P before giving up on a certificate.
constexpr double kMaxWork = 4e9;

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double oscillation(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

double edge_count(const FiniteLatticeModel& model) {
  double e = 0.0;
  for (std::size_t s = 0; s < model.size(); ++s) e += static_cast<double>(model.successors(s).size());
  return e;
}

std::size_t floor_power(std::size_t n, double exponent) {
  const double v = std::pow(static_cast<double>(n), exponent);
  const auto m = static_cast<std::size_t>(std::floor(v * (1.0 + 1e-12)));
  return std::clamp<std::size_t>(m, 1, n);
}

// Least squares slope of ln η against ln k over the positive entries.
std::optional<double> fit_beta(std::span<const double> eta) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (!(eta[i] > 1e-300)) continue;
    const double x = std::log(static_cast<double>(i + 1));
    const double y = std::log(eta[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 3) return std::nullopt;
  const double c = static_cast<double>(cnt);
  const double den = c * sxx - sx * sx;
  if (!(den > 0.0)) return std::nullopt;
  return -(c * sxy - sx * sy) / den;
}

}  // namespace

double CoefficientSet::delta() const noexcept { return std::sqrt(delta2); }
double CoefficientSet::tau() const noexcept { return std::sqrt(tau2); }
double CoefficientSet::gamma_log_gamma() const noexcept { return x_abs_log(gamma); }
double CoefficientSet::varsigma() const noexcept {
  return x_abs_log(gamma) + x_abs_log(eps) + delta() + std::sqrt(m_over_n());
}

std::string_view to_string(GateMode mode) noexcept { return mode == GateMode::Strict ? "strict" : "practical"; }

GateMode parse_gate_mode(std::string_view text) {
  if (text == "strict") return GateMode::Strict;
  if (text == "practical") return GateMode::Practical;
  throw Error(ErrorCode::ParseError, "gate mode must be 'strict' or 'practical', got '" + std::string(text) + "'");
}

GateConfig GateConfig::strict() {
  GateConfig g;
  g.mode = GateMode::Strict;
  g.log_gamma_max = -6400.0;
  return g;
}

GateConfig GateConfig::practical() { return GateConfig{}; }

GateConfig GateConfig::for_mode(GateMode mode) { return mode == GateMode::Strict ? strict() : practical(); }

GateVerdict evaluate_gates(const CoefficientSet& coeffs, const GateConfig& config) {
  GateVerdict v;
  v.config = config;
  v.eps_ok = coeffs.eps <= config.eps_max;
  v.gamma_ok = coeffs.gamma == 0.0 || std::log(coeffs.gamma) <= config.log_gamma_max;
  v.variance_ok = coeffs.delta2 + coeffs.m_over_n() <= config.alpha0;
  return v;
}

double Contraction::rate() const noexcept { return std::pow(delta, 1.0 / static_cast<double>(r)); }

double Contraction::tail_factor() const noexcept {
  // Σ_{j≥1} δ^{⌊j/r⌋} = (r − 1) + r δ/(1 − δ)
  const double rr = static_cast<double>(r);
  return (rr - 1.0) + rr * delta / (1.0 - delta);
}

Contraction find_contraction(const FiniteLatticeModel& model, std::size_t max_r) {
  const std::size_t size = model.size();
  const auto pi = model.pi();
  // rows[s] = P^r(s, ·)
  std::vector<double> rows(size * size, 0.0), next(size * size);
  for (std::size_t s = 0; s < size; ++s) rows[s * size + s] = 1.0;
  std::optional<Contraction> best;
  for (std::size_t r = 1; r <= max_r; ++r) {
    for (std::size_t s = 0; s < size; ++s)
      model.apply_left(std::span<const double>(rows).subspan(s * size, size),
                       std::span<double>(next).subspan(s * size, size));
    rows.swap(next);

    // Doeblin: δ ≤ 1 − Σ_t min_s P^r(s,t); triangle inequality: δ ≤ 2 max_s TV(P^r(s,·), π).
    double overlap = 0.0;
    for (std::size_t t = 0; t < size; ++t) {
      double lo = 1.0;
      for (std::size_t s = 0; s < size; ++s) lo = std::min(lo, rows[s * size + t]);
      overlap += lo;
    }
    double tv = 0.0;
    for (std::size_t s = 0; s < size; ++s) {
      double d = 0.0;
      for (std::size_t t = 0; t < size; ++t) d += std::abs(rows[s * size + t] - pi[t]);
      tv = std::max(tv, 0.5 * d);
    }
    double delta = std::min(1.0 - overlap, 2.0 * tv);
    if (size <= 64) {
      double exact = 0.0;
      for (std::size_t s = 0; s < size; ++s)
        for (std::size_t u = s + 1; u < size; ++u) {
          double d = 0.0;
          for (std::size_t t = 0; t < size; ++t) d += std::abs(rows[s * size + t] - rows[u * size + t]);
          exact = std::max(exact, 0.5 * d);
        }
      delta = std::min(delta, exact);
    }
    delta = std::clamp(delta, 0.0, 1.0);
    if (delta >= 1.0 - 1e-12) continue;
    const Contraction c{r, delta};
    if (!best || c.tail_factor() < best->tail_factor()) best = c;
    if (delta <= 0.5) break;
  }
  if (!best)
    throw Error(ErrorCode::WindowTooSmall,
                "no Dobrushin contraction found within " + std::to_string(max_r) + " steps");
  return *best;
}

CoefficientSet coefficient_set(const FiniteLatticeModel& model, std::size_t n, std::size_t m, double tol) {
  if (n < 1 || m < 1 || m > n) throw Error(ErrorCode::ParamOutOfRange, "coefficient_set needs 1 <= m <= n");
  if (!(tol > 0.0)) throw Error(ErrorCode::ParamOutOfRange, "coefficient_set needs tol > 0");
  CoefficientSet c;
  c.n = n;
  c.m = m;
  c.tolerance = tol;
  c.sigma_n = sigma_n(model, n);
  c.sup_norm = model.sup_norm();
  c.eps = static_cast<double>(m) * c.sup_norm / (std::sqrt(static_cast<double>(n)) * c.sigma_n);

  const ConditionalMoments cm = conditional_block_moments(model, m);
  const double var_scale = static_cast<double>(m) * c.sigma_n * c.sigma_n;
  c.delta2 = cm.sup_mean * cm.sup_mean / var_scale + cm.sup_second_dev(c.sigma_n);

  Contraction contraction;
  try {
    contraction = find_contraction(model);
  } catch (const Error& e) {
    throw Error(ErrorCode::NoDecayCertificate, std::string("cannot certify a finite H1: ") + e.what());
  }
  const double factor = contraction.tail_factor();

  // Σ_j j^{-3/2}‖A_{mj}‖ with A_t = E[S_t|F₀] = Σ_{i≤t} P^i X. Past J the terms
  // are replaced by ‖A_{mJ}‖ Σ_{j>J} j^{-3/2}; since ‖A_{mj} − A_{mJ}‖ ≤ Σ_{i>mJ}‖P^i X‖
  // ≤ osc(P^{mJ} X)·factor, the error of that substitution is at most
  // osc(P^{mJ}X)·factor·Σ_{j>J} j^{-3/2}.
  const std::size_t size = model.size();
  const double scale = std::sqrt(static_cast<double>(m)) * c.sigma_n;
  const double work_per_step = edge_count(model);
  const auto x = model.payoff();
  std::vector<double> v(x.begin(), x.end()), next(size), acc(size, 0.0);
  long double partial = 0.0L;
  for (long long j = 1;; ++j) {
    for (std::size_t step = 0; step < m; ++step) {
      model.apply(v, next);
      v.swap(next);
      for (std::size_t s = 0; s < size; ++s) acc[s] += v[s];
    }
    const double norm = sup_abs(acc);
    partial += static_cast<long double>(std::pow(static_cast<double>(j), -1.5) * norm);
    const double z = zeta_three_halves_tail(j);
    const double remainder = norm * z;
    const double err = (oscillation(v) * factor * z + 1e-15 * remainder) / scale;
    if (err <= tol) {
      c.gamma = static_cast<double>(partial + remainder) / scale;
      c.gamma_truncation_error = err;
      c.gamma_terms = static_cast<std::size_t>(j);
      break;
    }
    if (static_cast<double>(j) * static_cast<double>(m) * work_per_step > kMaxWork)
      throw Error(ErrorCode::NoDecayCertificate, "gamma series did not reach tolerance within the work cap");
  }
  c.tau2 = c.delta2 + c.m_over_n() + 4.0 * c.eps * c.eps;
  return c;
}

CoefficientSet coefficient_set(const ModelSpec& model, std::size_t n, std::size_t m, double tol) {
  return coefficient_set(require_exact(model, "coefficient_set"), n, m, tol);
}

CoefficientSet coefficient_bounds(const SampledModel& model, std::size_t n, std::size_t m,
                                  const RemarkConstants& constants) {
  if (n < 1 || m < 1 || m > n) throw Error(ErrorCode::ParamOutOfRange, "coefficient_bounds needs 1 <= m <= n");
  CoefficientSet c;
  c.n = n;
  c.m = m;
  c.from_certificate = true;
  c.sigma_n = model.sigma_n(n);
  c.sup_norm = model.bound();
  c.eps = static_cast<double>(m) * c.sup_norm / (std::sqrt(static_cast<double>(n)) * c.sigma_n);
  const DecayCertificate cert = eta_certificate(ModelSpec(model), m);
  const RemarkBounds rb = remark_vi_bounds(cert, m, c.sigma_n, c.sup_norm, constants);
  c.gamma = rb.gamma_bound;
  c.delta2 = rb.delta2_bound;
  c.tau2 = c.delta2 + c.m_over_n() + 4.0 * c.eps * c.eps;
  return c;
}

DecayCertificate eta_certificate(const FiniteLatticeModel& model, std::size_t N, std::size_t window) {
  if (N < 1) throw Error(ErrorCode::WindowTooSmall, "eta_certificate needs N >= 1");
  const Contraction contraction = find_contraction(model);
  const double factor = contraction.tail_factor();
  const std::size_t size = model.size();
  const std::size_t last = N + window;  // explicit indices 0..last
  const auto x = model.payoff();
  const auto pi = model.pi();

  // v_i = P^i X, extended until lags beyond the explicit range are negligible
  // (bounded by the work budget).
  const double edges = edge_count(model);
  const auto lag_cap = std::max<std::size_t>(
      window, static_cast<std::size_t>(2e8 / (edges * static_cast<double>(last + 1))));
  std::vector<std::vector<double>> v(1, std::vector<double>(x.begin(), x.end()));
  const double osc0 = oscillation(x);
  std::size_t dmax = window;
  for (std::size_t i = 1;; ++i) {
    v.emplace_back(size);
    model.apply(v[i - 1], v[i]);
    if (i > last && i > dmax) {
      if (oscillation(v[i]) <= 1e-13 * osc0 || i > lag_cap) break;
      dmax = i;
    }
  }
  const std::size_t stored = v.size();
  std::vector<double> norm(stored), osc(stored);
  for (std::size_t i = 0; i < stored; ++i) {
    norm[i] = sup_abs(v[i]);
    osc[i] = oscillation(v[i]);
  }

  DecayCertificate cert;
  cert.eta1.assign(N, 0.0);
  double run = osc[last];
  for (std::size_t i = last; i >= 1; --i) {
    run = std::max(run, norm[i]);
    if (i <= N) cert.eta1[i - 1] = run;
  }
  cert.eta1_tail_sum = osc[N] * factor;

  // η₂(k) = sup_{i≥k, d≥0} ‖P^i h_d − π h_d‖ with h_d = X ⊙ P^d X.
  const double delta = contraction.delta;
  const auto step_pow = [&](std::size_t k) {
    return std::pow(delta, static_cast<double>(k / contraction.r));
  };
  const double far_lag = 2.0 * model.sup_norm() * osc[dmax + 1];
  std::vector<double> best(last + 1, 0.0);  // max over d of e_d(i)
  double window_end = 0.0;                  // max_d osc(P^last h_d)
  double at_n = 0.0;                        // max_d osc(P^N h_d)
  std::vector<double> h(size), hn(size);
  for (std::size_t d = 0; d <= dmax; ++d) {
    for (std::size_t s = 0; s < size; ++s) h[s] = x[s] * v[d][s];
    double mean = 0.0;
    for (std::size_t s = 0; s < size; ++s) mean += pi[s] * h[s];
    for (std::size_t i = 0; i <= last; ++i) {
      if (i > 0) {
        model.apply(h, hn);
        h.swap(hn);
      }
      double e = 0.0;
      for (double y : h) e = std::max(e, std::abs(y - mean));
      best[i] = std::max(best[i], e);
      if (i == N) at_n = std::max(at_n, oscillation(h));
    }
    window_end = std::max(window_end, oscillation(h));
  }
  cert.eta2.assign(N, 0.0);
  run = window_end;
  for (std::size_t i = last; i >= 1; --i) {
    run = std::max(run, best[i]);
    if (i <= N) cert.eta2[i - 1] = std::max(run, far_lag * step_pow(i));
  }
  cert.eta2_tail_sum = std::max(at_n, far_lag * step_pow(N)) * factor;

  cert.geometric_rho = contraction.rate();
  const auto beta = fit_beta(cert.eta1);
  cert.beta = beta.value_or(kInf);
  cert.beta_is_fit = beta.has_value();
  const double rho = contraction.rate();
  if (rho > 0.0)
    for (std::size_t k = 1; k <= N; ++k)
      cert.rate_constant = std::max(cert.rate_constant, cert.eta1[k - 1] / std::pow(rho, static_cast<double>(k)));
  return cert;
}

DecayCertificate eta_certificate(const ModelSpec& model, std::size_t N, std::size_t window) {
  if (const auto* exact = std::get_if<FiniteLatticeModel>(&model)) return eta_certificate(*exact, N, window);
  DecayCertificate cert = std::get<SampledModel>(model).decay();
  // Past the filter length both η are identically zero.
  if (cert.eta1.size() < N) {
    cert.eta1.resize(N, 0.0);
    cert.eta2.resize(N, 0.0);
  }
  return cert;
}

double effective_beta(const DecayCertificate& cert) noexcept {
  return cert.geometric_rho ? kInf : cert.beta;
}

std::string delta_rate_regime(double beta) {
  if (!(beta > 1.0)) throw Error(ErrorCode::BetaOutOfRange, "rate regime needs beta > 1");
  if (beta > 2.0) return "m^{-1/2}";
  if (beta == 2.0) return "m^{-1/2} sqrt(ln m)";
  return "m^{-(beta-1)/2}";
}

RemarkBounds remark_vi_bounds(const DecayCertificate& cert, std::size_t m, double sigma_n, double bound_x0,
                              const RemarkConstants& constants) {
  if (m < 1) throw Error(ErrorCode::ParamOutOfRange, "remark_vi_bounds needs m >= 1");
  if (cert.eta1.size() < m || cert.eta2.size() < m)
    throw Error(ErrorCode::InsufficientCertificateLength,
                "certificate covers " + std::to_string(std::min(cert.eta1.size(), cert.eta2.size())) +
                    " indices, m = " + std::to_string(m) + " needs at least m");
  if (!(sigma_n > 0.0)) throw Error(ErrorCode::DegenerateVariance, "remark_vi_bounds needs sigma_n > 0");
  const std::size_t len = cert.eta1.size();
  const auto eta1 = [&](std::size_t i) { return cert.eta1[i - 1]; };
  const auto eta2 = [&](std::size_t i) { return cert.eta2[i - 1]; };
  const double md = static_cast<double>(m);

  double head = 0.0;  // Σ_{i≤m} η₁
  for (std::size_t i = 1; i <= m; ++i) head += eta1(i);
  double weighted = 0.0;  // Σ_{i≥m} η₁/√i
  for (std::size_t i = m; i <= len; ++i) weighted += eta1(i) / std::sqrt(static_cast<double>(i));
  weighted += cert.eta1_tail_sum / std::sqrt(static_cast<double>(len + 1));

  RemarkBounds out;
  out.constants = constants;
  out.gamma_bound = constants.c1 / (std::sqrt(md) * sigma_n) * (head + std::sqrt(md) * weighted);

  // suffix[j] = Σ_{i≥j} η₁(i), tail included
  std::vector<double> suffix(len + 2, 0.0);
  suffix[len + 1] = cert.eta1_tail_sum;
  for (std::size_t j = len; j >= 1; --j) suffix[j] = suffix[j + 1] + eta1(j);
  double lin = 0.0, nested = 0.0;
  for (std::size_t i = 1; 2 * i <= m; ++i) {
    lin += static_cast<double>(i) * eta2(i);
    nested += 2 * i <= len ? suffix[2 * i] : cert.eta1_tail_sum;
  }
  double far = 0.0;  // Σ_{i≥m/2} η₂
  for (std::size_t i = std::max<std::size_t>(1, (m + 1) / 2); i <= len; ++i) far += eta2(i);
  far += cert.eta2_tail_sum;
  out.delta2_bound = constants.c2 / (md * sigma_n * sigma_n) * (head * head + lin + bound_x0 * nested + md * far);

  const double beta = effective_beta(cert);
  out.delta_regime = beta > 1.0 ? delta_rate_regime(beta) : "unclassified";
  return out;
}

BlockPurpose parse_block_purpose(std::string_view text) {
  if (text == "cramer") return BlockPurpose::Cramer;
  if (text == "berry_esseen") return BlockPurpose::BerryEsseen;
  throw Error(ErrorCode::ParseError, "block purpose must be 'cramer' or 'berry_esseen'");
}

BlockChoice select_block_size(std::size_t n, double beta, BlockPurpose purpose) {
  if (!(beta > 1.0)) throw Error(ErrorCode::BetaOutOfRange, "block-size rules need beta > 1");
  if (n < 2) throw Error(ErrorCode::ParamOutOfRange, "select_block_size needs n >= 2");
  BlockChoice out;
  out.purpose = purpose;
  const double nd = static_cast<double>(n);
  const double logn = std::log(nd);
  if (purpose == BlockPurpose::Cramer) {
    if (beta >= 1.5) {
      out.exponent = 2.0 / 7.0;
      out.prediction = std::pow(nd, 1.0 / 14.0) / std::sqrt(logn);
      out.prediction_label = "x-range o(n^{1/14}/sqrt(ln n))";
    } else {
      out.exponent = 1.0 / (3.0 * beta - 1.0);
      out.prediction = std::pow(nd, (beta - 1.0) / (6.0 * beta - 2.0));
      out.prediction_label = "x-range o(n^{(beta-1)/(6beta-2)})";
    }
  } else {
    if (beta >= 2.0) {
      out.exponent = 1.0 / 3.0;
      out.prediction = std::pow(nd, -1.0 / 6.0) * logn;
      out.prediction_label = "rate n^{-1/6} ln n";
    } else {
      out.exponent = 1.0 / (beta + 1.0);
      out.prediction = std::pow(nd, -(beta - 1.0) / (2.0 * beta + 2.0)) * logn;
      out.prediction_label = "rate n^{-(beta-1)/(2beta+2)} ln n";
    }
  }
  out.m = floor_power(n, out.exponent);
  return out;
}

DedeckerReport check_dedecker_conditions(const FiniteLatticeModel& model, std::size_t N) {
  if (N < 1) throw Error(ErrorCode::ParamOutOfRange, "check_dedecker_conditions needs N >= 1");
  Contraction contraction;
  try {
    contraction = find_contraction(model);
  } catch (const Error& e) {
    throw Error(ErrorCode::NoDecayCertificate, e.what());
  }
  DedeckerReport rep;
  rep.horizon = N;
  rep.sigma2 = asymptotic_variance(model);
  rep.geometric_rate = contraction.rate();

  const std::size_t size = model.size();
  const auto x = model.payoff();
  std::vector<double> v(x.begin(), x.end()), a(size, 0.0), b(size, 0.0), ga(size), gb(size), na(size), nb(size);
  long double series = 0.0L;
  double h1 = 0.0;
  std::size_t next_mark = 1;
  for (std::size_t k = 1; k <= N; ++k) {
    for (std::size_t s = 0; s < size; ++s) {
      ga[s] = x[s] + a[s];
      gb[s] = x[s] * x[s] + 2.0 * x[s] * a[s] + b[s];
    }
    model.apply(ga, na);
    model.apply(gb, nb);
    a.swap(na);
    b.swap(nb);
    model.apply(v, na);
    v.swap(na);
    h1 += sup_abs(v);
    series += static_cast<long double>(std::pow(static_cast<double>(k), -1.5) * sup_abs(a));
    if (k == next_mark || k == N) {
      double dev = 0.0;
      for (std::size_t s = 0; s < size; ++s)
        dev = std::max(dev, std::abs(b[s] / static_cast<double>(k) - rep.sigma2));
      rep.checkpoints.push_back(k);
      rep.series_partial.push_back(static_cast<double>(series));
      rep.deviation.push_back(dev);
      if (k == next_mark) next_mark *= 2;
    }
  }
  const double z = zeta_three_halves_tail(static_cast<long long>(N));
  const double tail_mass = oscillation(v) * contraction.tail_factor();
  h1 += tail_mass;
  rep.series_at_horizon = static_cast<double>(series);
  rep.tail_estimate = sup_abs(a) * z;
  rep.tail_error = tail_mass * z;
  rep.tail_upper_bound = h1 * z;
  rep.series_converges = true;
  const std::size_t cp = rep.deviation.size();
  rep.variance_condition_converging =
      rep.deviation.back() <= 1e-12 || (cp >= 2 && rep.deviation[cp - 1] <= rep.deviation[cp - 2]);
  rep.slow_decay = rep.geometric_rate > 0.9;
  return rep;
}

DedeckerReport check_dedecker_conditions(const ModelSpec& model, std::size_t N) {
  return check_dedecker_conditions(require_exact(model, "check_dedecker_conditions"), N);
}

}  // namespace cramerlab
