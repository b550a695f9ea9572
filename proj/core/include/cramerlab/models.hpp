#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cramerlab {

struct Edge {
  std::size_t state;
  double prob;
};

// Upper bounds on η₁(k) = sup_{j≥k} ‖E[X_j|F₀]‖∞ and
// η₂(k) = sup_{i,j≥k} ‖E[X_iX_j|F₀] − E[X_iX_j]‖∞ for k = 1..N (stored at k−1),
// plus certified bounds on the tails Σ_{k>N}.
struct DecayCertificate {
  std::vector<double> eta1;
  std::vector<double> eta2;
  double eta1_tail_sum = 0.0;
  double eta2_tail_sum = 0.0;
  // Fitted exponent in η = O(k^{-β}); +inf when no fit is possible.
  // effective_beta() reports +inf whenever geometric_rho is set.
  double beta = 0.0;
  bool beta_is_fit = false;
  double rate_constant = 0.0;
  std::optional<double> geometric_rho;

  std::size_t length() const noexcept { return eta1.size(); }
  /// Σ_k η₁(k) over the whole certificate including its tail.
  double eta1_total() const noexcept;
};

/// Stationary Markov chain on finitely many states with lattice payoff
/// f(s) = f_num(s)/denom. The centered payoff is X(s) = f(s) − Σ_t π(t) f(t).
/// Immutable; copies share storage.
class FiniteLatticeModel {
 public:
  /// Validates, solves for π and centers the payoff.
  /// Throws NonStochasticRow, ReducibleChain, PeriodicChain, DegeneratePayoff, InvalidModel.
  static FiniteLatticeModel build(std::vector<std::string> states, std::vector<double> transition,
                                  std::vector<std::int64_t> f_num, std::int64_t denom,
                                  std::string name = "custom");

  const std::string& name() const noexcept { return data_->name; }
  std::size_t size() const noexcept { return data_->states.size(); }
  const std::vector<std::string>& states() const noexcept { return data_->states; }

  double transition(std::size_t from, std::size_t to) const noexcept {
    return data_->transition[from * size() + to];
  }
  std::span<const double> transition_matrix() const noexcept { return data_->transition; }
  std::span<const Edge> successors(std::size_t s) const noexcept { return data_->out[s]; }
  std::span<const Edge> predecessors(std::size_t s) const noexcept { return data_->in[s]; }

  std::span<const std::int64_t> f_num() const noexcept { return data_->f_num; }
  std::int64_t denom() const noexcept { return data_->denom; }
  std::span<const double> pi() const noexcept { return data_->pi; }

  /// denom·E_π f; the DP centers integer sums by n·center_num().
  double center_num() const noexcept { return data_->center_num; }
  /// Centered payoff X(s).
  std::span<const double> payoff() const noexcept { return data_->payoff; }
  /// ‖X₀‖∞ = max_s |X(s)|.
  double sup_norm() const noexcept { return data_->sup_norm; }
  std::int64_t max_abs_f_num() const noexcept;

  /// True when every row equals π (the sequence is i.i.d.).
  bool is_iid() const noexcept { return data_->iid; }

  /// out(s) = Σ_t P(s,t) v(t).
  void apply(std::span<const double> v, std::span<double> out) const noexcept;
  /// out(t) = Σ_s mu(s) P(s,t).
  void apply_left(std::span<const double> mu, std::span<double> out) const noexcept;

 private:
  struct Data {
    std::string name;
    std::vector<std::string> states;
    std::vector<double> transition;
    std::vector<std::vector<Edge>> out;
    std::vector<std::vector<Edge>> in;
    std::vector<std::int64_t> f_num;
    std::int64_t denom = 1;
    std::vector<double> pi;
    double center_num = 0.0;
    std::vector<double> payoff;
    double sup_norm = 0.0;
    bool iid = false;
  };
  explicit FiniteLatticeModel(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
};

/// A seeded path of a sampled model: the innovation history and the values.
/// innovations[j] = ε_{j−memory+1}, so innovations.size() = memory + n and
/// values[k−1] = X_k for k = 1..n.
struct SampledPath {
  std::vector<std::int8_t> innovations;
  std::vector<double> values;
  std::size_t memory = 0;
};

/// X_k = Σ_{i=0}^{L} w_i ε_{k−i} with ε i.i.d. Rademacher: a function of an
/// i.i.d. sequence with oscillation bounds R_i = 2 Σ_{j≥i} |w_j|.
class SampledModel {
 public:
  SampledModel(std::string name, std::vector<double> weights, DecayCertificate decay,
               std::size_t burn_in);

  const std::string& name() const noexcept { return name_; }
  std::span<const double> weights() const noexcept { return weights_; }
  /// L, the number of past innovations a value depends on.
  std::size_t memory() const noexcept { return weights_.size() - 1; }
  double bound() const noexcept { return bound_; }
  const DecayCertificate& decay() const noexcept { return decay_; }
  std::size_t burn_in() const noexcept { return burn_in_; }
  /// R_i, the largest change of X from altering innovation i.
  double oscillation_bound(std::size_t i) const noexcept;
  /// Cov(X₀, X_k) = Σ_i w_i w_{i+k}.
  double autocovariance(std::size_t k) const noexcept;
  /// σ_n from the closed-form autocovariances.
  double sigma_n(std::size_t n) const;

  /// Stationary path of length n, deterministic in seed.
  SampledPath sample(std::size_t n, std::uint64_t seed) const;

  /// X at time t (1-based) of `innovations` laid out as in SampledPath.
  double value_at(std::span<const std::int8_t> innovations, std::size_t memory,
                  std::size_t t) const noexcept;

 private:
  std::string name_;
  std::vector<double> weights_;
  double bound_ = 0.0;
  DecayCertificate decay_;
  std::size_t burn_in_ = 0;
};

using ModelSpec = std::variant<FiniteLatticeModel, SampledModel>;

using BuiltinParams = std::map<std::string, double, std::less<>>;

/// Built-in models: rademacher, two_state(rho), dyadic_contracting(L),
/// moving_average(c, L_trunc). Throws UnknownBuiltin, ParamOutOfRange.
ModelSpec builtin(std::string_view name, const BuiltinParams& params = {});

/// Parses "name" or "name:key=value,key=value" into a builtin.
ModelSpec builtin_from_string(std::string_view spec);

/// Parses the model definition text format (see docs/model-file.md).
FiniteLatticeModel parse_model_text(std::string_view text, std::string name = "file");
/// Throws ParseError naming the path when the file cannot be read.
FiniteLatticeModel load_model_file(const std::string& path);

std::string_view model_name(const ModelSpec& model) noexcept;
bool is_exact(const ModelSpec& model) noexcept;
/// Throws SampledTierUnsupported for sampled models.
const FiniteLatticeModel& require_exact(const ModelSpec& model, std::string_view op);

/// φ₁(k) = max_s TV(P^k(s,·), π) for k = 1..horizon.
std::vector<double> phi_mixing_coefficients(const FiniteLatticeModel& model, std::size_t horizon);
std::vector<double> phi_mixing_coefficients(const ModelSpec& model, std::size_t horizon);

class Rng;

/// Stationary state path Y₀..Y_n of an exact-tier model (Y₀ drawn from π).
std::vector<std::size_t> sample_states(const FiniteLatticeModel& model, std::size_t n, Rng& rng);
std::vector<std::size_t> sample_states(const FiniteLatticeModel& model, std::size_t n, std::uint64_t seed);

/// Certified burn-in ⌈ln(tol)/ln(ρ)⌉.
std::size_t certified_burn_in(double geometric_rho, double tolerance = 1e-12);

}  // namespace cramerlab
