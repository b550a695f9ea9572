#include "cramerlab/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "cramerlab/error.hpp"

namespace cramerlab {

namespace {

using nlohmann::ordered_json;

// JSON has no infinities; they are written as strings.
ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

ordered_json numbers(std::span<const double> v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

ordered_json manifest_json(const Manifest& m) {
  return ordered_json{{"tool", "cramerlab"},   {"version", kToolVersion}, {"schema", kSchemaVersion},
                      {"command", m.command},  {"model", m.model},        {"config_hash", m.config_hash},
                      {"seed", m.seed}};
}

std::string finish(ordered_json body, const Manifest* manifest) {
  ordered_json doc;
  if (manifest) doc["manifest"] = manifest_json(*manifest);
  for (auto& [k, v] : body.items()) doc[k] = v;
  return doc.dump(2) + "\n";
}

class CsvWriter {
 public:
  explicit CsvWriter(const Manifest* manifest) {
    if (manifest) out_ << manifest_comment(*manifest);
  }
  CsvWriter& header(std::initializer_list<std::string_view> cols) {
    bool first = true;
    for (auto c : cols) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << '\n';
    return *this;
  }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(std::int64_t v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::string_view v) { return std::string(v); }
  std::ostringstream out_;
};

double json_double(const ordered_json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw Error(ErrorCode::ParseError, "expected a number, got " + v.dump());
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string manifest_comment(const Manifest& m) {
  std::ostringstream out;
  out << "# tool=cramerlab version=" << kToolVersion << " schema=" << kSchemaVersion << '\n'
      << "# command=" << m.command << " model=" << m.model << '\n'
      << "# config_hash=" << m.config_hash << " seed=" << m.seed << '\n';
  return out.str();
}

std::string tail_table_json(const TailTable& t, const Manifest* manifest) {
  ordered_json j;
  j["n"] = t.n();
  j["denom"] = t.denom();
  j["offset"] = t.offset();
  j["center"] = t.center();
  j["sigma_n"] = t.sigma_n();
  j["logp"] = numbers(t.logp());
  return finish(std::move(j), manifest);
}

std::string tail_table_csv(const TailTable& t, const Manifest* manifest) {
  CsvWriter w(manifest);
  w.header({"sum", "logp"});
  for (std::size_t i = 0; i < t.size(); ++i) w.row(t.sum_at(i), t.logp()[i]);
  return w.str();
}

TailTable tail_table_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
    std::vector<double> logp;
    for (const auto& v : j.at("logp")) logp.push_back(json_double(v));
    return TailTable::from_log_masses(j.at("n").get<std::size_t>(), j.at("denom").get<std::int64_t>(),
                                      j.at("offset").get<std::int64_t>(), json_double(j.at("center")),
                                      std::move(logp), json_double(j.at("sigma_n")));
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("tail table JSON: ") + e.what());
  }
}

std::string decomposition_csv(const BlockDecomposition& d, const Manifest* manifest) {
  CsvWriter w(manifest);
  w.header({"i", "block_sum", "predictable", "martingale_diff"});
  for (const Block& b : d.blocks) w.row(b.index, b.block_sum, b.predictable, b.martingale_diff);
  return w.str();
}

std::string coefficients_json(const CoefficientSet& c, const GateVerdict& g, const Manifest* manifest) {
  ordered_json j;
  j["n"] = c.n;
  j["m"] = c.m;
  j["sigma_n"] = number(c.sigma_n);
  j["sup_norm"] = number(c.sup_norm);
  j["eps_m"] = number(c.eps);
  j["gamma_m"] = number(c.gamma);
  j["delta_m"] = number(c.delta());
  j["delta_m2"] = number(c.delta2);
  j["tau_m2"] = number(c.tau2);
  j["varsigma_n"] = number(c.varsigma());
  j["source"] = c.from_certificate ? "certificate_bound" : "exact";
  j["truncation"] = {{"gamma_truncation_error", number(c.gamma_truncation_error)},
                     {"tolerance", number(c.tolerance)},
                     {"terms", c.gamma_terms}};
  j["gates"] = {{"mode", to_string(g.config.mode)},
                {"eps_max", number(g.config.eps_max)},
                {"log_gamma_max", number(g.config.log_gamma_max)},
                {"alpha0", number(g.config.alpha0)},
                {"eps_ok", g.eps_ok},
                {"gamma_ok", g.gamma_ok},
                {"variance_ok", g.variance_ok},
                {"all", g.all()}};
  return finish(std::move(j), manifest);
}

std::string bound_curve_csv(const BoundCurve& c, const Manifest* manifest) {
  CsvWriter w(manifest);
  w.header({"x", "value", "valid"});
  for (std::size_t i = 0; i < c.x_grid.size(); ++i) w.row(c.x_grid[i], c.value[i], static_cast<int>(c.valid[i]));
  return w.str();
}

std::string bound_curve_json(const BoundCurve& c, const Manifest* manifest) {
  ordered_json j;
  j["kind"] = c.kind;
  j["unit"] = c.unit;
  j["gate_mode"] = to_string(c.gate_mode);
  j["shape_mode"] = c.shape_mode;
  ordered_json k = ordered_json::object();
  for (const auto& [name, v] : c.constants) k[name] = number(v);
  j["constants"] = k;
  j["x"] = numbers(c.x_grid);
  j["value"] = numbers(c.value);
  ordered_json valid = ordered_json::array();
  for (auto v : c.valid) valid.push_back(v != 0);
  j["valid"] = valid;
  return finish(std::move(j), manifest);
}

std::string ratio_csv(const RatioCurve& c, const Manifest* manifest) {
  CsvWriter w(manifest);
  w.header({"x", "ratio", "lo", "hi", "left_ratio", "left_lo", "left_hi", "envelope", "envelope_valid", "source"});
  for (std::size_t i = 0; i < c.x_grid.size(); ++i)
    w.row(c.x_grid[i], c.ratio[i], c.lo[i], c.hi[i], c.left_ratio[i], c.left_lo[i], c.left_hi[i], c.envelope[i],
          static_cast<int>(c.envelope_valid[i]), to_string(c.source));
  return w.str();
}

std::string tail_estimates_csv(std::span<const TailEstimate> tails, const Manifest* manifest) {
  CsvWriter w(manifest);
  w.header({"x", "p", "lo", "hi"});
  for (const auto& t : tails) w.row(t.x, t.p, t.lo, t.hi);
  return w.str();
}

std::string mdp_csv(const MdpResult& r, const Manifest* manifest) {
  CsvWriter w(manifest);
  w.header({"n", "scaled_log_tail", "limit", "a_n", "log_tail"});
  for (const auto& p : r.points) w.row(p.n, p.scaled, r.limit, p.a_n, p.log_tail);
  return w.str();
}

std::string coupling_report_json(const CouplingReport& r, const Manifest* manifest) {
  ordered_json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["draws"] = r.draws;
  j["seed"] = r.seed;
  j["varsigma_n"] = number(r.varsigma);
  j["constants"] = {{"alpha", number(r.constants.alpha)}, {"C_alpha", number(r.constants.c_alpha)},
                    {"shape_mode", true}};
  j["admissible"] = r.admissible;
  j["violations"] = r.violations;
  j["violation_fraction"] = number(r.violation_fraction);
  j["gap_median"] = number(r.gap_median);
  j["lambda_hat"] = number(r.lambda_hat);
  j["lambda_se"] = number(r.lambda_se);
  j["marginal_ks"] = number(r.marginal_ks);
  j["survival"] = {{"x", numbers(r.survival_x)}, {"p", numbers(r.survival_p)}};
  return finish(std::move(j), manifest);
}

std::string pairs_csv(std::span<const CoupledPair> pairs, double varsigma, const Manifest* manifest) {
  CsvWriter w(manifest);
  w.header({"z", "y", "gap"});
  for (const auto& p : pairs) w.row(p.z, p.y, std::abs(p.y - p.z) / varsigma);
  return w.str();
}

std::string ks_json(const KsSummary& s, const Manifest* manifest) {
  ordered_json j;
  const double nd = static_cast<double>(s.n);
  j["source"] = s.source;
  j["n"] = s.n;
  j["m"] = s.m;
  if (s.source == "mc") j["chains"] = s.chains;
  j["ks"] = number(s.ks);
  j["ks_scaled"] = number(s.n > 1 ? s.ks * std::pow(nd, 1.0 / 6.0) / std::log(nd) : NAN);
  j["berry_esseen_bound"] = number(s.berry_esseen_bound);
  j["berry_esseen_constant"] = number(s.berry_esseen_constant);
  j["shape_mode"] = true;
  j["gate_mode"] = to_string(s.gate_mode);
  return finish(std::move(j), manifest);
}

std::string dedecker_json(const DedeckerReport& r, const Manifest* manifest) {
  ordered_json j;
  j["horizon"] = r.horizon;
  ordered_json cps = ordered_json::array();
  for (auto k : r.checkpoints) cps.push_back(k);
  j["checkpoints"] = cps;
  j["series_partial"] = numbers(r.series_partial);
  j["series_at_horizon"] = number(r.series_at_horizon);
  j["tail_estimate"] = number(r.tail_estimate);
  j["tail_error"] = number(r.tail_error);
  j["tail_upper_bound"] = number(r.tail_upper_bound);
  j["sigma2"] = number(r.sigma2);
  j["deviation"] = numbers(r.deviation);
  j["geometric_rate"] = number(r.geometric_rate);
  j["series_converges"] = r.series_converges;
  j["variance_condition_converging"] = r.variance_condition_converging;
  j["slow_decay"] = r.slow_decay;
  return finish(std::move(j), manifest);
}

std::string certificate_json(const DecayCertificate& c, const Manifest* manifest) {
  ordered_json j;
  j["length"] = c.length();
  j["eta1"] = numbers(c.eta1);
  j["eta2"] = numbers(c.eta2);
  j["eta1_tail_sum"] = number(c.eta1_tail_sum);
  j["eta2_tail_sum"] = number(c.eta2_tail_sum);
  j["beta"] = number(effective_beta(c));
  j["beta_fit"] = number(c.beta);
  j["beta_is_fit"] = c.beta_is_fit;
  j["geometric_rho"] = c.geometric_rho ? number(*c.geometric_rho) : ordered_json(nullptr);
  j["rate_constant"] = number(c.rate_constant);
  return finish(std::move(j), manifest);
}

}  // namespace cramerlab
