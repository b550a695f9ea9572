#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cramerlab/blocking.hpp"
#include "cramerlab/bounds.hpp"
#include "cramerlab/coefficients.hpp"
#include "cramerlab/coupling.hpp"
#include "cramerlab/error.hpp"
#include "cramerlab/exact_engine.hpp"
#include "cramerlab/io.hpp"
#include "cramerlab/montecarlo.hpp"
#include "cramerlab/numeric.hpp"

namespace cramerlab::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::size_t kDefaultChains = 100000;
// Slack for comparing a probability against a bound in log space.
constexpr double kLogSlack = 1e-12;

struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void config_error(const std::string& message) { throw Failure{kConfigError, message}; }

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonStochasticRow:
    case ErrorCode::ReducibleChain:
    case ErrorCode::PeriodicChain:
    case ErrorCode::DegeneratePayoff:
    case ErrorCode::DegenerateVariance:
    case ErrorCode::InvalidModel:
    case ErrorCode::UnknownBuiltin:
    case ErrorCode::SampledTierUnsupported:
    case ErrorCode::NoDecayCertificate:
    case ErrorCode::WindowTooSmall:
    case ErrorCode::DegenerateGap:
      return kModelError;
    default:
      return kConfigError;
  }
}

// ---------------------------------------------------------------- config

void apply_config_file(RunConfig& cfg) {
  std::ifstream file(cfg.config_file);
  if (!file) config_error("--config: cannot read '" + cfg.config_file + "'");
  ordered_json j;
  try {
    j = ordered_json::parse(file);
  } catch (const ordered_json::exception& e) {
    config_error("--config: '" + cfg.config_file + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) config_error("--config: top level must be an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "model") cfg.model = value.get<std::string>();
      else if (key == "n") cfg.n = value.get<std::size_t>();
      else if (key == "m") cfg.m = value.get<std::size_t>();
      else if (key == "beta") cfg.beta = value.get<double>();
      else if (key == "purpose") cfg.purpose = value.get<std::string>();
      else if (key == "x_min") cfg.x_min = value.get<double>();
      else if (key == "x_max") cfg.x_max = value.get<double>();
      else if (key == "x_count") cfg.x_count = value.get<std::size_t>();
      else if (key == "mode") cfg.mode = value.get<std::string>();
      else if (key == "chains") cfg.chains = value.get<std::size_t>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "gate_mode") cfg.gate_mode = value.get<std::string>();
      else if (key == "C") cfg.envelope_c = value.get<double>();
      else if (key == "C_be") cfg.be_c = value.get<double>();
      else if (key == "alpha0") cfg.alpha0 = value.get<double>();
      else if (key == "alpha") cfg.alpha = value.get<double>();
      else if (key == "C_alpha") cfg.c_alpha = value.get<double>();
      else if (key == "C1") cfg.c1 = value.get<double>();
      else if (key == "C2") cfg.c2 = value.get<double>();
      else if (key == "tol") cfg.tol = value.get<double>();
      else if (key == "draws") cfg.draws = value.get<std::size_t>();
      else if (key == "c") cfg.mdp_c = value.get<double>();
      else if (key == "a") cfg.mdp_a = value.get<double>();
      else if (key == "n_grid") cfg.n_grid = value.get<std::vector<std::size_t>>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else if (key == "threads") cfg.threads = value.get<unsigned>();
      else config_error("--config: unknown key '" + key + "'");
    } catch (const ordered_json::exception&) {
      config_error("--config: key '" + key + "' has the wrong type (" + value.dump() + ")");
    }
  }
}

void validate(const RunConfig& cfg) {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      config_error(std::string(name) + " must be a positive number (got " + format_double(v) + ")");
  };
  if (cfg.n < 1) config_error("--n must be >= 1");
  if (cfg.m && (*cfg.m < 1 || *cfg.m > cfg.n))
    config_error("--m must satisfy 1 <= m <= n (got m=" + std::to_string(*cfg.m) + ", n=" + std::to_string(cfg.n) + ")");
  if (cfg.beta && !(*cfg.beta > 1.0)) config_error("--beta must be > 1 (got " + format_double(*cfg.beta) + ")");
  if (cfg.purpose != "cramer" && cfg.purpose != "berry_esseen")
    config_error("--purpose must be cramer or berry_esseen (got '" + cfg.purpose + "')");
  if (!(cfg.x_min >= 0.0)) config_error("--x-min must be >= 0");
  if (!(cfg.x_max >= cfg.x_min)) config_error("--x-max must be >= --x-min");
  if (cfg.x_max > 37.0) config_error("--x-max must be <= 37 (normal tail not representable beyond)");
  if (cfg.x_count < 1) config_error("--x-count must be >= 1");
  if (cfg.mode != "auto" && cfg.mode != "exact" && cfg.mode != "mc")
    config_error("--mode must be auto, exact or mc (got '" + cfg.mode + "')");
  if (cfg.gate_mode != "strict" && cfg.gate_mode != "practical")
    config_error("--gate-mode must be strict or practical (got '" + cfg.gate_mode + "')");
  positive(cfg.envelope_c, "--C");
  positive(cfg.be_c, "--C-be");
  positive(cfg.alpha0, "--alpha0");
  positive(cfg.alpha, "--alpha");
  positive(cfg.c_alpha, "--C-alpha");
  positive(cfg.c1, "--C1");
  positive(cfg.c2, "--C2");
  positive(cfg.tol, "--tol");
  if (cfg.draws < 10) config_error("--draws must be >= 10");
  if (!(cfg.mdp_a > 0.0 && cfg.mdp_a < 0.5)) config_error("--a must lie in (0, 1/2)");
  if (!std::isfinite(cfg.mdp_c)) config_error("--c must be finite");
  for (auto v : cfg.n_grid)
    if (v < 1) config_error("--n-grid entries must be >= 1");
}

GateConfig gate_config(const RunConfig& cfg) {
  GateConfig g = GateConfig::for_mode(parse_gate_mode(cfg.gate_mode));
  g.alpha0 = cfg.alpha0;
  return g;
}

// ---------------------------------------------------------------- model

bool looks_like_path(const std::string& s) {
  if (s.find(':') != std::string::npos) return false;
  return s.find('/') != std::string::npos || s.find('.') != std::string::npos;
}

ModelSpec resolve_model(const RunConfig& cfg) {
  const std::string& s = cfg.model;
  std::error_code ec;
  if (fs::is_regular_file(s, ec)) {
    try {
      return load_model_file(s);
    } catch (const Error& e) {
      throw Failure{kModelError, std::string("model file '") + s + "': " + e.what()};
    }
  }
  if (looks_like_path(s)) config_error("--model: model file not found: '" + s + "'");
  try {
    return builtin_from_string(s);
  } catch (const Error& e) {
    throw Failure{kModelError, std::string("--model '") + s + "': " + e.what()};
  }
}

struct Resolved {
  ModelSpec model;
  std::size_t m = 1;
  std::string m_source;
};

Resolved resolve(const RunConfig& cfg, std::ostream& err) {
  Resolved r{resolve_model(cfg), 1, "flag"};
  if (cfg.m) {
    r.m = *cfg.m;
    return r;
  }
  double beta = 0.0;
  if (cfg.beta) {
    beta = *cfg.beta;
    r.m_source = "beta";
  } else {
    const DecayCertificate cert = eta_certificate(r.model, 64);
    beta = effective_beta(cert);
    r.m_source = "certificate";
    if (!cert.geometric_rho && cert.beta_is_fit)
      err << "warning: beta taken from a log-log fit (" << format_double(beta) << ")\n";
    if (!(beta > 1.0)) config_error("--beta: certificate gives beta <= 1; pass --m or --beta");
  }
  if (cfg.n < 2) config_error("--n must be >= 2 to select m automatically");
  r.m = select_block_size(cfg.n, beta, parse_block_purpose(cfg.purpose)).m;
  return r;
}

// ---------------------------------------------------------------- output

struct Context {
  RunConfig cfg;
  Manifest manifest;
  std::ostream& out;
  std::ostream& err;
};

void write_file(const Context& ctx, const std::string& name, const std::string& content) {
  std::error_code ec;
  fs::create_directories(ctx.cfg.out, ec);
  const fs::path path = fs::path(ctx.cfg.out) / name;
  std::ofstream file(path, std::ios::binary);
  if (!file) config_error("--out: cannot write '" + path.string() + "'");
  file << content;
  ctx.out << "wrote " << path.string() << '\n';
}

CoefficientSet coefficients_for(const RunConfig& cfg, const Resolved& r) {
  if (const auto* exact = std::get_if<FiniteLatticeModel>(&r.model)) return coefficient_set(*exact, cfg.n, r.m, cfg.tol);
  return coefficient_bounds(std::get<SampledModel>(r.model), cfg.n, r.m, {cfg.c1, cfg.c2});
}

// ---------------------------------------------------------------- commands

int cmd_coeffs(Context& ctx, const Resolved& r) {
  const CoefficientSet c = coefficients_for(ctx.cfg, r);
  const GateVerdict g = evaluate_gates(c, gate_config(ctx.cfg));
  write_file(ctx, "coefficients.json", coefficients_json(c, g, &ctx.manifest));
  ctx.out << "n=" << c.n << " m=" << c.m << " eps_m=" << format_double(c.eps) << " gamma_m=" << format_double(c.gamma)
          << " delta_m2=" << format_double(c.delta2) << " gates(" << to_string(g.config.mode)
          << ")=" << (g.all() ? "pass" : "fail") << '\n';
  return kOk;
}

struct Violation {
  std::string check;
  double x;
  double bound;
  double exact;
};

// Hard assertions on the exact law; returns the first violation, if any.
std::optional<Violation> verify_exact(Context& ctx, const Resolved& r, const std::vector<double>& grid) {
  const RunConfig& cfg = ctx.cfg;
  const auto& model = std::get<FiniteLatticeModel>(r.model);
  const TailTable table = distribution_of_Sn(model, cfg.n);
  const CoefficientSet coeffs = coefficient_set(model, cfg.n, r.m, cfg.tol);
  const GateConfig gates = gate_config(cfg);
  RatioOptions ropts;
  ropts.gates = gates;
  ropts.envelope_c = cfg.envelope_c;
  const RatioCurve ratio = ratio_curve(table, coeffs, grid, ropts);
  write_file(ctx, "ratio.csv", ratio_csv(ratio, &ctx.manifest));

  const double sig = coeffs.sigma_n;
  const double root_n = std::sqrt(static_cast<double>(cfg.n));
  const std::vector<double> norms = conditional_mean_norms(model, cfg.n);
  const bool martingale = model.is_iid();
  const double freedman_a = model.sup_norm() / (root_n * sig);
  const bool gamma_ok = x_abs_log(coeffs.gamma) < 1.0;

  std::optional<Violation> first;
  const auto check = [&](const char* name, double x, double log_bound, double log_exact) {
    const bool ok = log_exact <= log_bound + kLogSlack;
    if (!ok && !first) first = Violation{name, x, std::exp(log_bound), std::exp(log_exact)};
    return ok ? 1 : 0;
  };

  std::ostringstream csv;
  csv << manifest_comment(ctx.manifest)
      << "x,exact_tail,bernstein,bernstein_ok,freedman,freedman_ok,peligrad,peligrad_ok,"
         "sandwich_lo,normal_sf,sandwich_hi,sandwich_ok,envelope,envelope_valid\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const double log_tail = table.log_upper_tail(x * sig);
    double bern = NAN, fried = NAN, pel = NAN;
    int bern_ok = -1, fried_ok = -1, pel_ok = -1;
    if (x > 0.0) {
      if (gamma_ok) {
        const double lb = log_bernstein_bound(coeffs, x);
        bern = std::exp(lb);
        bern_ok = check("bernstein", x, lb, log_tail);
      }
      if (martingale) {
        const double lf = log_freedman_bound(x, 1.0, freedman_a);
        fried = std::exp(lf);
        fried_ok = check("freedman", x, lf, log_tail);
      }
      const double t = x * sig * root_n;
      const double lp = log_peligrad_bound(t, cfg.n, model.sup_norm(), norms);
      const double log_abs = log_add_exp(log_tail, table.log_lower_tail(-x * sig));
      pel = std::exp(lp);
      pel_ok = check("peligrad", x, lp, log_abs);
    }
    const auto [lo, hi] = gaussian_tail_sandwich(x);
    const double sf = normal_sf(x);
    const int sand_ok = lo <= sf && sf <= hi ? 1 : 0;
    if (!sand_ok && !first) first = Violation{"sandwich", x, sf < lo ? lo : hi, sf};
    csv << format_double(x) << ',' << format_double(std::exp(log_tail)) << ',' << format_double(bern) << ','
        << bern_ok << ',' << format_double(fried) << ',' << fried_ok << ',' << format_double(pel) << ',' << pel_ok
        << ',' << format_double(lo) << ',' << format_double(sf) << ',' << format_double(hi) << ',' << sand_ok << ','
        << format_double(ratio.envelope[i]) << ',' << static_cast<int>(ratio.envelope_valid[i]) << '\n';
  }
  write_file(ctx, "bounds.csv", csv.str());

  KsSummary ks;
  ks.source = "exact";
  ks.n = cfg.n;
  ks.m = r.m;
  ks.ks = ks_distance_exact(table);
  ks.berry_esseen_bound = berry_esseen_bound(coeffs, cfg.be_c);
  ks.berry_esseen_constant = cfg.be_c;
  ks.gate_mode = gates.mode;
  write_file(ctx, "ks.json", ks_json(ks, &ctx.manifest));
  return first;
}

std::optional<Violation> verify_mc(Context& ctx, const Resolved& r, const std::vector<double>& grid) {
  const RunConfig& cfg = ctx.cfg;
  const CoefficientSet coeffs = coefficients_for(cfg, r);
  const std::size_t chains = cfg.chains ? cfg.chains : kDefaultChains;
  const std::vector<double> w = simulate_W(r.model, cfg.n, chains, cfg.seed, cfg.threads);
  RatioOptions ropts;
  ropts.mode = RatioMode::MonteCarlo;
  ropts.seed = cfg.seed;
  ropts.gates = gate_config(cfg);
  ropts.envelope_c = cfg.envelope_c;
  const RatioCurve ratio = ratio_curve(w, coeffs.sigma_n, coeffs, grid, ropts);
  write_file(ctx, "ratio.csv", ratio_csv(ratio, &ctx.manifest));

  std::optional<Violation> first;
  std::vector<TailEstimate> tails;
  std::ostringstream csv;
  csv << manifest_comment(ctx.manifest)
      << "x,p,lo,hi,bernstein,sandwich_lo,normal_sf,sandwich_hi,sandwich_ok,envelope,envelope_valid\n";
  const bool gamma_ok = x_abs_log(coeffs.gamma) < 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const TailEstimate t = estimate_tail(w, coeffs.sigma_n, x, cfg.seed);
    tails.push_back(t);
    const double bern = x > 0.0 && gamma_ok ? bernstein_bound(coeffs, x) : NAN;
    const auto [lo, hi] = gaussian_tail_sandwich(x);
    const double sf = normal_sf(x);
    const int sand_ok = lo <= sf && sf <= hi ? 1 : 0;
    if (!sand_ok && !first) first = Violation{"sandwich", x, sf < lo ? lo : hi, sf};
    csv << format_double(x) << ',' << format_double(t.p) << ',' << format_double(t.lo) << ',' << format_double(t.hi)
        << ',' << format_double(bern) << ',' << format_double(lo) << ',' << format_double(sf) << ','
        << format_double(hi) << ',' << sand_ok << ',' << format_double(ratio.envelope[i]) << ','
        << static_cast<int>(ratio.envelope_valid[i]) << '\n';
  }
  write_file(ctx, "bounds.csv", csv.str());
  write_file(ctx, "tails.csv", tail_estimates_csv(tails, &ctx.manifest));

  KsSummary ks;
  ks.source = "mc";
  ks.n = cfg.n;
  ks.m = r.m;
  ks.chains = chains;
  ks.ks = empirical_ks(w, coeffs.sigma_n);
  ks.berry_esseen_bound = berry_esseen_bound(coeffs, cfg.be_c);
  ks.berry_esseen_constant = cfg.be_c;
  ks.gate_mode = ropts.gates.mode;
  write_file(ctx, "ks.json", ks_json(ks, &ctx.manifest));
  return first;
}

int cmd_verify(Context& ctx, const Resolved& r) {
  const RunConfig& cfg = ctx.cfg;
  const bool exact = std::holds_alternative<FiniteLatticeModel>(r.model);
  if (cfg.mode == "exact" && !exact) throw Failure{kModelError, "--mode exact needs an exact-tier model"};
  const bool use_exact = exact && cfg.mode != "mc";
  const std::vector<double> grid = linear_grid(cfg.x_min, cfg.x_max, cfg.x_count);
  const auto violation = use_exact ? verify_exact(ctx, r, grid) : verify_mc(ctx, r, grid);
  if (violation) {
    ctx.err << "assertion failed: " << violation->check << " at x=" << format_double(violation->x)
            << " bound=" << format_double(violation->bound) << " exact=" << format_double(violation->exact) << '\n';
    return kAssertionFailure;
  }
  ctx.out << "verify: all hard assertions passed (" << (use_exact ? "exact" : "mc") << ")\n";
  return kOk;
}

int cmd_coupling(Context& ctx, const Resolved& r) {
  const RunConfig& cfg = ctx.cfg;
  std::vector<CoupledPair> pairs;
  const CouplingReport rep =
      coupling_report(r.model, cfg.n, r.m, cfg.draws, cfg.seed, {cfg.alpha, cfg.c_alpha}, cfg.threads, &pairs);
  write_file(ctx, "coupling.json", coupling_report_json(rep, &ctx.manifest));
  write_file(ctx, "pairs.csv", pairs_csv(pairs, rep.varsigma, &ctx.manifest));
  ctx.out << "varsigma_n=" << format_double(rep.varsigma) << " lambda_hat=" << format_double(rep.lambda_hat)
          << " se=" << format_double(rep.lambda_se) << '\n';
  return kOk;
}

int cmd_mdp(Context& ctx, const Resolved& r) {
  const RunConfig& cfg = ctx.cfg;
  std::vector<std::size_t> grid = cfg.n_grid.empty() ? std::vector<std::size_t>{cfg.n} : cfg.n_grid;
  const MdpResult res = mdp_diagnostic(r.model, cfg.mdp_c, cfg.mdp_a, grid);
  write_file(ctx, "mdp.csv", mdp_csv(res, &ctx.manifest));
  for (const auto& p : res.points)
    ctx.out << "n=" << p.n << " scaled=" << format_double(p.scaled) << " limit=" << format_double(res.limit) << '\n';
  return kOk;
}

int cmd_report(Context& ctx, const Resolved& r) {
  cmd_coeffs(ctx, r);
  const int verdict = cmd_verify(ctx, r);
  if (const auto* exact = std::get_if<FiniteLatticeModel>(&r.model)) {
    cmd_coupling(ctx, r);
    write_file(ctx, "certificate.json", certificate_json(eta_certificate(*exact, std::max<std::size_t>(r.m, 64)),
                                                         &ctx.manifest));
    write_file(ctx, "dedecker.json", dedecker_json(check_dedecker_conditions(*exact, ctx.cfg.n), &ctx.manifest));
  } else {
    write_file(ctx, "certificate.json", certificate_json(eta_certificate(r.model, r.m), &ctx.manifest));
  }
  return verdict;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--model", cfg.model, "builtin 'name:key=value,...' or model file path");
  sub->add_option("--n", cfg.n, "number of observations");
  auto* m = sub->add_option("--m", cfg.m, "block size");
  sub->add_option("--beta", cfg.beta, "decay exponent for automatic block size")->excludes(m);
  sub->add_option("--purpose", cfg.purpose, "block-size rule: cramer or berry_esseen");
  sub->add_option("--x-min", cfg.x_min, "grid start");
  sub->add_option("--x-max", cfg.x_max, "grid end");
  sub->add_option("--x-count", cfg.x_count, "grid points");
  sub->add_option("--mode", cfg.mode, "exact, mc or auto");
  sub->add_option("--chains", cfg.chains, "Monte Carlo trajectories");
  sub->add_option("--seed", cfg.seed, "master seed");
  sub->add_option("--gate-mode", cfg.gate_mode, "strict or practical");
  sub->add_option("--C", cfg.envelope_c, "envelope constant (shape mode)");
  sub->add_option("--C-be", cfg.be_c, "Berry-Esseen constant (shape mode)");
  sub->add_option("--alpha0", cfg.alpha0, "variance gate and envelope range constant");
  sub->add_option("--alpha", cfg.alpha, "coupling region constant");
  sub->add_option("--C-alpha", cfg.c_alpha, "coupling gap constant");
  sub->add_option("--C1", cfg.c1, "gamma certificate constant");
  sub->add_option("--C2", cfg.c2, "delta certificate constant");
  sub->add_option("--tol", cfg.tol, "gamma series tolerance");
  sub->add_option("--draws", cfg.draws, "coupling draws");
  sub->add_option("--c", cfg.mdp_c, "MDP level c");
  sub->add_option("--a", cfg.mdp_a, "MDP exponent in a_n = n^-a");
  sub->add_option("--n-grid", cfg.n_grid, "MDP sample sizes")->delimiter(',');
  sub->add_option("--out", cfg.out, "output directory");
  sub->add_option("--threads", cfg.threads, "worker threads (results do not depend on it)");
  sub->add_option("--config", cfg.config_file, "JSON file whose keys override flags");
}

}  // namespace

std::string canonical_config(const RunConfig& cfg) {
  ordered_json j;
  j["command"] = cfg.command;
  j["model"] = cfg.model;
  j["n"] = cfg.n;
  j["m"] = cfg.m ? ordered_json(*cfg.m) : ordered_json(nullptr);
  j["beta"] = cfg.beta ? ordered_json(format_double(*cfg.beta)) : ordered_json(nullptr);
  j["purpose"] = cfg.purpose;
  j["x_min"] = format_double(cfg.x_min);
  j["x_max"] = format_double(cfg.x_max);
  j["x_count"] = cfg.x_count;
  j["mode"] = cfg.mode;
  j["chains"] = cfg.chains;
  j["seed"] = cfg.seed;
  j["gate_mode"] = cfg.gate_mode;
  j["C"] = format_double(cfg.envelope_c);
  j["C_be"] = format_double(cfg.be_c);
  j["alpha0"] = format_double(cfg.alpha0);
  j["alpha"] = format_double(cfg.alpha);
  j["C_alpha"] = format_double(cfg.c_alpha);
  j["C1"] = format_double(cfg.c1);
  j["C2"] = format_double(cfg.c2);
  j["tol"] = format_double(cfg.tol);
  j["draws"] = cfg.draws;
  j["c"] = format_double(cfg.mdp_c);
  j["a"] = format_double(cfg.mdp_a);
  j["n_grid"] = cfg.n_grid;
  return j.dump();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"cramerlab: moderate deviation laboratory for stationary bounded sequences"};
  app.require_subcommand(1, 1);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"coeffs", "deviation coefficients and gate verdicts"},
      {"verify", "exact or simulated ratios, KS distance and explicit-bound checks"},
      {"coupling", "quantile coupling report"},
      {"mdp", "moderate deviation scaling diagnostic"},
      {"report", "coeffs, verify, coupling and certificates in one run"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << "\n\n" << app.help();
    return kConfigError;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    if (!cfg.config_file.empty()) apply_config_file(cfg);
    validate(cfg);
    const Resolved r = resolve(cfg, err);
    Context ctx{cfg, {}, out, err};
    ctx.manifest.command = cfg.command;
    ctx.manifest.model = std::string(model_name(r.model));
    ctx.manifest.config_hash = hex64(fnv1a64(canonical_config(cfg)));
    ctx.manifest.seed = cfg.seed;
    if (cfg.command == "coeffs") return cmd_coeffs(ctx, r);
    if (cfg.command == "verify") return cmd_verify(ctx, r);
    if (cfg.command == "coupling") return cmd_coupling(ctx, r);
    if (cfg.command == "mdp") return cmd_mdp(ctx, r);
    return cmd_report(ctx, r);
  } catch (const Failure& f) {
    err << (f.code == kModelError ? "model error: " : "config error: ") << f.message << '\n';
    return f.code;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    err << (code == kModelError ? "model error: " : "config error: ") << e.what() << '\n';
    return code;
  }
}

}  // namespace cramerlab::cli
