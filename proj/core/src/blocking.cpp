#include "cramerlab/blocking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cramerlab/error.hpp"
#include "cramerlab/exact_engine.hpp"
#include "cramerlab/rng.hpp"

namespace cramerlab {

namespace {

void check_lengths(std::size_t n, std::size_t m) {
  if (m < 1) throw Error(ErrorCode::ParamOutOfRange, "block length m must be >= 1");
  if (n < m)
    throw Error(ErrorCode::TrajectoryTooShort,
                "trajectory has n = " + std::to_string(n) + " steps, block length is " + std::to_string(m));
}

std::vector<Block> layout(std::size_t n, std::size_t m, RemainderMode mode) {
  const std::size_t k = n / m;
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < k; ++i) blocks.push_back({.index = i + 1, .start = i * m, .length = m});
  if (n > k * m)
    blocks.push_back({.index = k + 1,
                      .start = k * m,
                      .length = n - k * m,
                      .martingalized = mode == RemainderMode::Martingalized});
  return blocks;
}

void finish(BlockDecomposition& d) {
  const double scale = std::sqrt(static_cast<double>(d.n)) * d.sigma_n;
  double running = 0.0;
  d.quadratic_characteristic = 0.0;
  d.total = 0.0;
  for (Block& b : d.blocks) {
    d.total += b.block_sum;
    if (!b.martingalized) {
      b.predictable = 0.0;
      b.martingale_diff = b.block_sum;
      b.xi = 0.0;
      b.cond_var = 0.0;
      continue;
    }
    b.martingale_diff = b.block_sum - b.predictable;
    b.xi = b.martingale_diff / scale;
    b.cond_var /= scale * scale;
    running += b.xi;
    d.partial_sums.push_back(running);
    d.quadratic_characteristic += b.cond_var;
  }
}

}  // namespace

double BlockDecomposition::block_total() const noexcept {
  double acc = 0.0;
  for (const Block& b : blocks) acc += b.block_sum;
  return acc;
}

BlockDecomposition decompose(const FiniteLatticeModel& model, std::span<const std::size_t> path, std::size_t m,
                             RemainderMode mode) {
  if (path.empty()) throw Error(ErrorCode::TrajectoryTooShort, "empty trajectory");
  const std::size_t n = path.size() - 1;
  check_lengths(n, m);

  BlockDecomposition d;
  d.n = n;
  d.m = m;
  d.k = n / m;
  d.mode = mode;
  d.sigma_n = sigma_n(model, n);
  d.blocks = layout(n, m, mode);

  const auto full = conditional_block_moments(model, m);
  const std::size_t rem = n - d.k * m;
  const auto tail = rem > 0 ? conditional_block_moments(model, rem) : full;
  const auto f = model.f_num();
  const double q = static_cast<double>(model.denom());

  for (Block& b : d.blocks) {
    for (std::size_t t = b.start + 1; t <= b.start + b.length; ++t) b.sum_num += f[path[t]];
    d.total_num += b.sum_num;
    b.block_sum = (static_cast<double>(b.sum_num) - static_cast<double>(b.length) * model.center_num()) / q;
    const auto& cm = b.length == m ? full : tail;
    const std::size_t y = path[b.start];
    b.predictable = cm.mean_by_state[y];
    b.cond_var = cm.second_by_state[y] - cm.mean_by_state[y] * cm.mean_by_state[y];
  }
  finish(d);
  return d;
}

BlockDecomposition decompose(const SampledModel& model, const SampledPath& path, std::size_t m, RemainderMode mode,
                             const NestedOptions& nested) {
  const std::size_t n = path.values.size();
  check_lengths(n, m);
  if (path.memory != model.memory() || path.innovations.size() != path.memory + n)
    throw Error(ErrorCode::NestedEstimateUnavailable,
                "path carries no innovation history for '" + model.name() + "'; conditional resampling needs it");
  if (nested.resamples < 2) throw Error(ErrorCode::ParamOutOfRange, "nested resampling needs >= 2 resamples");

  BlockDecomposition d;
  d.n = n;
  d.m = m;
  d.k = n / m;
  d.mode = mode;
  d.estimated = true;
  d.sigma_n = model.sigma_n(n);
  d.blocks = layout(n, m, mode);

  const std::size_t mem = path.memory;
  std::vector<std::int8_t> scratch;
  for (Block& b : d.blocks) {
    for (std::size_t t = b.start + 1; t <= b.start + b.length; ++t) b.block_sum += path.values[t - 1];
    if (!b.martingalized) continue;
    // Keep ε up to time `start`, redraw ε_{start+1 .. start+length}.
    scratch.assign(path.innovations.begin(),
                   path.innovations.begin() + static_cast<std::ptrdiff_t>(mem + b.start + b.length));
    Rng rng(derive_seed(nested.seed, b.index));
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t r = 0; r < nested.resamples; ++r) {
      for (std::size_t j = mem + b.start; j < scratch.size(); ++j) scratch[j] = static_cast<std::int8_t>(rng.sign());
      double s = 0.0;
      for (std::size_t t = b.start + 1; t <= b.start + b.length; ++t) s += model.value_at(scratch, mem, t);
      sum += s;
      sum_sq += s * s;
    }
    const double reps = static_cast<double>(nested.resamples);
    const double mean = sum / reps;
    const double var = std::max(0.0, (sum_sq - reps * mean * mean) / (reps - 1.0));
    b.predictable = mean;
    b.predictable_se = std::sqrt(var / reps);
    b.cond_var = var;
  }
  finish(d);
  return d;
}

QuadraticDeviation quadratic_characteristic_deviation(const FiniteLatticeModel& model, std::size_t n,
                                                      std::size_t m) {
  check_lengths(n, m);
  const std::size_t states = model.size();
  const std::size_t k = n / m;
  const double sig = sigma_n(model, n);
  const double scale = static_cast<double>(n) * sig * sig;
  const auto cm = conditional_block_moments(model, m);
  const auto v = cm.martingale_variance();

  // Support of P^m: which block-start states can follow which.
  std::vector<std::vector<char>> reach(states, std::vector<char>(states, 0));
  std::vector<char> frontier(states), next(states);
  for (std::size_t s = 0; s < states; ++s) {
    std::fill(frontier.begin(), frontier.end(), 0);
    frontier[s] = 1;
    for (std::size_t step = 0; step < m; ++step) {
      std::fill(next.begin(), next.end(), 0);
      for (std::size_t u = 0; u < states; ++u)
        if (frontier[u])
          for (const Edge& e : model.successors(u)) next[e.state] = 1;
      frontier.swap(next);
    }
    reach[s] = frontier;
  }

  // Max-plus / min-plus over admissible sequences of k block-start states.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> hi(v), lo(v), nhi(states), nlo(states);
  for (std::size_t step = 1; step < k; ++step) {
    std::fill(nhi.begin(), nhi.end(), -kInf);
    std::fill(nlo.begin(), nlo.end(), kInf);
    for (std::size_t u = 0; u < states; ++u)
      for (std::size_t w = 0; w < states; ++w)
        if (reach[u][w]) {
          nhi[w] = std::max(nhi[w], hi[u] + v[w]);
          nlo[w] = std::min(nlo[w], lo[u] + v[w]);
        }
    hi.swap(nhi);
    lo.swap(nlo);
  }
  const double max_sum = *std::max_element(hi.begin(), hi.end());
  const double min_sum = *std::min_element(lo.begin(), lo.end());

  QuadraticDeviation out;
  out.exact = std::max(std::abs(max_sum / scale - 1.0), std::abs(min_sum / scale - 1.0));
  out.delta2 = cm.sup_mean * cm.sup_mean / (static_cast<double>(m) * sig * sig) + cm.sup_second_dev(sig);
  out.m_over_n = static_cast<double>(m) / static_cast<double>(n);
  out.bound = out.delta2 + out.m_over_n;
  return out;
}

QuadraticDeviation quadratic_characteristic_deviation(const ModelSpec& model, std::size_t n, std::size_t m) {
  return quadratic_characteristic_deviation(require_exact(model, "quadratic_characteristic_deviation"), n, m);
}

}  // namespace cramerlab
