#include "cramerlab/models.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

#include "cramerlab/error.hpp"
#include "cramerlab/rng.hpp"

namespace cramerlab {

namespace {

constexpr double kRowTol = 1e-12;
constexpr std::size_t kDirectSolveLimit = 64;

std::vector<std::size_t> bfs_levels(const std::vector<std::vector<Edge>>& adj) {
  constexpr auto kUnseen = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> level(adj.size(), kUnseen);
  std::deque<std::size_t> queue{0};
  level[0] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (const Edge& e : adj[u]) {
      if (level[e.state] == kUnseen) {
        level[e.state] = level[u] + 1;
        queue.push_back(e.state);
      }
    }
  }
  return level;
}

std::vector<double> stationary_direct(std::span<const double> p, std::size_t n) {
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = p[i * n + j];
  a -= Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.row(static_cast<Eigen::Index>(n - 1)).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  rhs(static_cast<Eigen::Index>(n - 1)) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
  return {pi.data(), pi.data() + n};
}

}  // namespace

double DecayCertificate::eta1_total() const noexcept {
  return std::accumulate(eta1.begin(), eta1.end(), 0.0) + eta1_tail_sum;
}

FiniteLatticeModel FiniteLatticeModel::build(std::vector<std::string> states, std::vector<double> transition,
                                             std::vector<std::int64_t> f_num, std::int64_t denom,
                                             std::string name) {
  const std::size_t n = states.size();
  if (n == 0) throw Error(ErrorCode::InvalidModel, "model has no states");
  if (transition.size() != n * n)
    throw Error(ErrorCode::InvalidModel, "transition has " + std::to_string(transition.size()) +
                                             " entries, expected " + std::to_string(n * n));
  if (f_num.size() != n)
    throw Error(ErrorCode::InvalidModel, "f_num has " + std::to_string(f_num.size()) + " entries, expected " +
                                             std::to_string(n));
  if (denom < 1) throw Error(ErrorCode::InvalidModel, "denom must be >= 1");

  auto d = std::make_shared<Data>();
  d->name = std::move(name);
  d->out.resize(n);
  d->in.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = transition[i * n + j];
      if (!(p >= 0.0) || !std::isfinite(p))
        throw Error(ErrorCode::NonStochasticRow, "row " + std::to_string(i) + " has a negative or non-finite entry");
      row += p;
      if (p > 0.0) {
        d->out[i].push_back({j, p});
        d->in[j].push_back({i, p});
      }
    }
    if (std::abs(row - 1.0) > kRowTol)
      throw Error(ErrorCode::NonStochasticRow, "row " + std::to_string(i) + " sums to " + std::to_string(row));
  }

  // Irreducible iff every state is reachable from 0 forwards and backwards.
  const auto fwd = bfs_levels(d->out);
  const auto bwd = bfs_levels(d->in);
  constexpr auto kUnseen = std::numeric_limits<std::size_t>::max();
  for (std::size_t s = 0; s < n; ++s)
    if (fwd[s] == kUnseen || bwd[s] == kUnseen)
      throw Error(ErrorCode::ReducibleChain, "state '" + states[s] + "' is not in the class of state '" + states[0] + "'");

  // Period = gcd over edges u→v of level(u) + 1 − level(v).
  std::size_t period = 0;
  for (std::size_t u = 0; u < n; ++u)
    for (const Edge& e : d->out[u]) {
      const auto diff = static_cast<long long>(fwd[u]) + 1 - static_cast<long long>(fwd[e.state]);
      period = std::gcd(period, static_cast<std::size_t>(std::llabs(diff)));
    }
  if (period != 1) throw Error(ErrorCode::PeriodicChain, "chain has period " + std::to_string(period));

  std::vector<double> pi;
  if (n <= kDirectSolveLimit) {
    pi = stationary_direct(transition, n);
  } else {
    pi.assign(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    for (std::size_t it = 0; it < 10'000'000; ++it) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t s = 0; s < n; ++s)
        for (const Edge& e : d->out[s]) next[e.state] += pi[s] * e.prob;
      double resid = 0.0;
      for (std::size_t s = 0; s < n; ++s) resid += std::abs(next[s] - pi[s]);
      pi.swap(next);
      if (resid < 1e-14) break;
    }
  }
  for (double& p : pi) p = std::max(p, 0.0);
  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& p : pi) p /= total;

  std::vector<double> check(n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (const Edge& e : d->out[s]) check[e.state] += pi[s] * e.prob;
  for (std::size_t s = 0; s < n; ++s)
    if (std::abs(check[s] - pi[s]) > 1e-12)
      throw Error(ErrorCode::InvalidModel, "stationary vector did not converge at state " + std::to_string(s));

  if (std::all_of(f_num.begin(), f_num.end(), [&](std::int64_t v) { return v == f_num[0]; }))
    throw Error(ErrorCode::DegeneratePayoff, "payoff is constant; the centered sum vanishes");

  long double center = 0.0L;
  std::int64_t max_abs = 0;
  for (std::size_t s = 0; s < n; ++s) {
    center += static_cast<long double>(pi[s]) * static_cast<long double>(f_num[s]);
    max_abs = std::max<std::int64_t>(max_abs, std::llabs(f_num[s]));
  }
  // Round-off from the solve must not leave a spurious drift on symmetric lattices.
  if (std::abs(static_cast<double>(center)) <= 1e-14 * static_cast<double>(max_abs)) center = 0.0L;
  d->center_num = static_cast<double>(center);

  const double q = static_cast<double>(denom);
  d->payoff.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    d->payoff[s] = (static_cast<double>(f_num[s]) - d->center_num) / q;
    d->sup_norm = std::max(d->sup_norm, std::abs(d->payoff[s]));
  }

  d->iid = true;
  for (std::size_t s = 0; s < n && d->iid; ++s)
    for (std::size_t t = 0; t < n; ++t)
      if (std::abs(transition[s * n + t] - pi[t]) > 1e-15) {
        d->iid = false;
        break;
      }

  d->states = std::move(states);
  d->transition = std::move(transition);
  d->f_num = std::move(f_num);
  d->denom = denom;
  d->pi = std::move(pi);
  return FiniteLatticeModel(std::move(d));
}

std::int64_t FiniteLatticeModel::max_abs_f_num() const noexcept {
  std::int64_t m = 0;
  for (auto v : data_->f_num) m = std::max<std::int64_t>(m, std::llabs(v));
  return m;
}

void FiniteLatticeModel::apply(std::span<const double> v, std::span<double> out) const noexcept {
  for (std::size_t s = 0; s < size(); ++s) {
    double acc = 0.0;
    for (const Edge& e : data_->out[s]) acc += e.prob * v[e.state];
    out[s] = acc;
  }
}

void FiniteLatticeModel::apply_left(std::span<const double> mu, std::span<double> out) const noexcept {
  for (std::size_t t = 0; t < size(); ++t) {
    double acc = 0.0;
    for (const Edge& e : data_->in[t]) acc += mu[e.state] * e.prob;
    out[t] = acc;
  }
}

SampledModel::SampledModel(std::string name, std::vector<double> weights, DecayCertificate decay,
                           std::size_t burn_in)
    : name_(std::move(name)), weights_(std::move(weights)), decay_(std::move(decay)), burn_in_(burn_in) {
  if (weights_.empty()) throw Error(ErrorCode::InvalidModel, "sampled model needs at least one weight");
  for (double w : weights_) bound_ += std::abs(w);
  if (!(bound_ > 0.0)) throw Error(ErrorCode::DegeneratePayoff, "all weights are zero");
}

double SampledModel::oscillation_bound(std::size_t i) const noexcept {
  double r = 0.0;
  for (std::size_t j = i; j < weights_.size(); ++j) r += std::abs(weights_[j]);
  return 2.0 * r;
}

double SampledModel::autocovariance(std::size_t k) const noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i + k < weights_.size(); ++i) acc += weights_[i] * weights_[i + k];
  return acc;
}

double SampledModel::sigma_n(std::size_t n) const {
  if (n < 1) throw Error(ErrorCode::ParamOutOfRange, "sigma_n needs n >= 1");
  const double nd = static_cast<double>(n);
  double var = autocovariance(0);
  for (std::size_t k = 1; k < std::min(n, weights_.size()); ++k)
    var += 2.0 * (1.0 - static_cast<double>(k) / nd) * autocovariance(k);
  if (var <= 1e-14) throw Error(ErrorCode::DegenerateVariance, "sigma_n vanishes");
  return std::sqrt(var);
}

double SampledModel::value_at(std::span<const std::int8_t> innovations, std::size_t memory,
                              std::size_t t) const noexcept {
  // ε_{t−i} lives at index t − i + memory − 1.
  double x = 0.0;
  const std::size_t base = t + memory - 1;
  for (std::size_t i = 0; i < weights_.size(); ++i) x += weights_[i] * innovations[base - i];
  return x;
}

SampledPath SampledModel::sample(std::size_t n, std::uint64_t seed) const {
  Rng rng(seed);
  // Burn-in draws are discarded; the kept window is exactly stationary once it
  // holds `memory` innovations, so the burn-in only fixes the stream offset.
  for (std::size_t i = 0; i < burn_in_; ++i) rng.bits();
  SampledPath path;
  path.memory = memory();
  path.innovations.resize(path.memory + n);
  for (auto& e : path.innovations) e = static_cast<std::int8_t>(rng.sign());
  path.values.resize(n);
  for (std::size_t t = 1; t <= n; ++t) path.values[t - 1] = value_at(path.innovations, path.memory, t);
  return path;
}

namespace {

std::size_t draw(std::span<const Edge> edges, double u) {
  double acc = 0.0;
  for (const Edge& e : edges) {
    acc += e.prob;
    if (u < acc) return e.state;
  }
  return edges.back().state;
}

}  // namespace

std::vector<std::size_t> sample_states(const FiniteLatticeModel& model, std::size_t n, Rng& rng) {
  std::vector<Edge> start;
  const auto pi = model.pi();
  for (std::size_t s = 0; s < model.size(); ++s)
    if (pi[s] > 0.0) start.push_back({s, pi[s]});
  std::vector<std::size_t> path(n + 1);
  path[0] = draw(start, rng.uniform());
  for (std::size_t t = 1; t <= n; ++t) path[t] = draw(model.successors(path[t - 1]), rng.uniform());
  return path;
}

std::vector<std::size_t> sample_states(const FiniteLatticeModel& model, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_states(model, n, rng);
}

std::size_t certified_burn_in(double geometric_rho, double tolerance) {
  if (!(geometric_rho > 0.0 && geometric_rho < 1.0))
    throw Error(ErrorCode::ParamOutOfRange, "geometric rate must lie in (0,1)");
  return static_cast<std::size_t>(std::ceil(std::log(tolerance) / std::log(geometric_rho)));
}

namespace {

double require_param(const BuiltinParams& params, std::string_view builtin_name, std::string_view key) {
  auto it = params.find(key);
  if (it == params.end())
    throw Error(ErrorCode::ParamOutOfRange,
                std::string(builtin_name) + " requires parameter '" + std::string(key) + "'");
  return it->second;
}

double integer_param(double v, std::string_view key) {
  if (v != std::floor(v)) throw Error(ErrorCode::ParamOutOfRange, std::string(key) + " must be an integer");
  return v;
}

FiniteLatticeModel make_two_state(double rho, std::string name) {
  const double stay = (1.0 + rho) / 2.0;
  return FiniteLatticeModel::build({"-1", "+1"}, {stay, 1.0 - stay, 1.0 - stay, stay}, {-1, 1}, 1, std::move(name));
}

FiniteLatticeModel make_dyadic(int levels) {
  const std::size_t size = std::size_t{1} << levels;
  std::vector<std::string> states(size);
  std::vector<double> p(size * size, 0.0);
  std::vector<std::int64_t> f(size);
  for (std::size_t j = 0; j < size; ++j) {
    states[j] = std::to_string(j) + "/" + std::to_string(size);
    f[j] = static_cast<std::int64_t>(j);
    // Y' = ⌊(j + b·2^L)/2⌋ / 2^L with b fair Bernoulli.
    p[j * size + (j >> 1)] += 0.5;
    p[j * size + ((j + size) >> 1)] += 0.5;
  }
  return FiniteLatticeModel::build(std::move(states), std::move(p), std::move(f), static_cast<std::int64_t>(size),
                                   "dyadic_contracting(L=" + std::to_string(levels) + ")");
}

SampledModel make_moving_average(double c, std::size_t trunc) {
  std::vector<double> w(trunc + 1);
  for (std::size_t i = 0; i <= trunc; ++i) w[i] = c * std::ldexp(1.0, -static_cast<int>(i));

  // E[X_k|F₀] = Σ_{i≥k} w_i ε_{k−i}, so ‖E[X_k|F₀]‖∞ = Σ_{i=k}^{L} w_i (decreasing
  // in k, hence equal to η₁(k)). With B_k that conditional mean,
  // E[X_kX_l|F₀] − E[X_kX_l] = B_kB_l − E[B_kB_l], bounded by 2η₁(k)η₁(l).
  DecayCertificate cert;
  const std::size_t horizon = trunc + 1;
  cert.eta1.resize(horizon);
  cert.eta2.resize(horizon);
  for (std::size_t k = 1; k <= horizon; ++k) {
    double tail = 0.0;
    for (std::size_t i = k; i <= trunc; ++i) tail += w[i];
    cert.eta1[k - 1] = tail;
    cert.eta2[k - 1] = 2.0 * tail * tail;
  }
  cert.eta1_tail_sum = 0.0;
  cert.eta2_tail_sum = 0.0;
  cert.geometric_rho = 0.5;
  cert.beta = std::numeric_limits<double>::infinity();
  cert.rate_constant = 2.0 * c;
  const std::size_t burn = std::max(certified_burn_in(0.5), trunc);
  std::ostringstream name;
  name << "moving_average(c=" << c << ",L_trunc=" << trunc << ")";
  return SampledModel(name.str(), std::move(w), std::move(cert), burn);
}

}  // namespace

ModelSpec builtin(std::string_view name, const BuiltinParams& params) {
  if (name == "rademacher") {
    const double half = 0.5;
    return FiniteLatticeModel::build({"-1", "+1"}, {half, half, half, half}, {-1, 1}, 1, "rademacher");
  }
  if (name == "two_state") {
    const double rho = require_param(params, name, "rho");
    if (!(rho > -1.0 && rho < 1.0)) throw Error(ErrorCode::ParamOutOfRange, "two_state needs rho in (-1,1)");
    std::ostringstream label;
    label << "two_state(rho=" << rho << ")";
    return make_two_state(rho, label.str());
  }
  if (name == "dyadic_contracting") {
    const double levels = integer_param(require_param(params, name, "L"), "L");
    if (levels < 1 || levels > 10) throw Error(ErrorCode::ParamOutOfRange, "dyadic_contracting needs L in [1,10]");
    return make_dyadic(static_cast<int>(levels));
  }
  if (name == "moving_average") {
    const double c = require_param(params, name, "c");
    const double trunc = integer_param(require_param(params, name, "L_trunc"), "L_trunc");
    if (!(c > 0.0 && std::isfinite(c))) throw Error(ErrorCode::ParamOutOfRange, "moving_average needs c > 0");
    if (trunc < 1 || trunc > 60) throw Error(ErrorCode::ParamOutOfRange, "moving_average needs L_trunc in [1,60]");
    return make_moving_average(c, static_cast<std::size_t>(trunc));
  }
  throw Error(ErrorCode::UnknownBuiltin, "no builtin named '" + std::string(name) + "'");
}

ModelSpec builtin_from_string(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  BuiltinParams params;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos)
        throw Error(ErrorCode::ParamOutOfRange, "expected key=value in '" + std::string(item) + "'");
      const std::string value(item.substr(eq + 1));
      char* end = nullptr;
      const double v = std::strtod(value.c_str(), &end);
      if (end == value.c_str() || *end != '\0')
        throw Error(ErrorCode::ParamOutOfRange, "parameter value '" + value + "' is not a number");
      params.emplace(std::string(item.substr(0, eq)), v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  return builtin(name, params);
}

std::string_view model_name(const ModelSpec& model) noexcept {
  return std::visit([](const auto& m) -> std::string_view { return m.name(); }, model);
}

bool is_exact(const ModelSpec& model) noexcept { return std::holds_alternative<FiniteLatticeModel>(model); }

const FiniteLatticeModel& require_exact(const ModelSpec& model, std::string_view op) {
  if (const auto* m = std::get_if<FiniteLatticeModel>(&model)) return *m;
  throw Error(ErrorCode::SampledTierUnsupported,
              std::string(op) + " needs an exact-tier model; '" + std::string(model_name(model)) + "' is sampled");
}

std::vector<double> phi_mixing_coefficients(const FiniteLatticeModel& model, std::size_t horizon) {
  if (horizon < 1) throw Error(ErrorCode::ParamOutOfRange, "horizon must be >= 1");
  const std::size_t n = model.size();
  const auto pi = model.pi();
  std::vector<double> phi(horizon, 0.0);
  std::vector<double> law(n), next(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(law.begin(), law.end(), 0.0);
    law[s] = 1.0;
    for (std::size_t k = 0; k < horizon; ++k) {
      model.apply_left(law, next);
      law.swap(next);
      double tv = 0.0;
      for (std::size_t t = 0; t < n; ++t) tv += std::abs(law[t] - pi[t]);
      phi[k] = std::max(phi[k], 0.5 * tv);
    }
  }
  // φ₁ is non-increasing; floating noise must not break that.
  for (std::size_t k = 1; k < horizon; ++k) phi[k] = std::min(phi[k], phi[k - 1]);
  return phi;
}

std::vector<double> phi_mixing_coefficients(const ModelSpec& model, std::size_t horizon) {
  return phi_mixing_coefficients(require_exact(model, "phi_mixing_coefficients"), horizon);
}

}  // namespace cramerlab
