// Serialization of tables, curves and reports.

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "cramerlab/error.hpp"
#include "cramerlab/io.hpp"
#include "json.hpp"

using namespace cramerlab;
using nlohmann::json;

namespace {

std::string first_data_line(const std::string& csv) {
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') return line;
  return {};
}

}  // namespace

TEST(Hash, Fnv1aVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Format, Doubles) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
  EXPECT_EQ(format_double(NAN), "nan");
  EXPECT_EQ(std::stod(format_double(M_PI)), M_PI);
}

TEST(Manifest, CommentLines) {
  Manifest m{"verify", "rademacher", "00000000deadbeef", 7};
  const auto text = manifest_comment(m);
  EXPECT_NE(text.find("# tool=cramerlab"), std::string::npos);
  EXPECT_NE(text.find("0.1.0"), std::string::npos);
  EXPECT_NE(text.find("config_hash=00000000deadbeef"), std::string::npos);
  EXPECT_NE(text.find("seed=7"), std::string::npos);
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  EXPECT_EQ(lines, 3u);
}

TEST(TailTableIo, JsonRoundTrip) {
  auto table = distribution_of_Sn(builtin("two_state", {{"rho", 0.4}}), 40);
  Manifest m{"coeffs", "two_state", "0123456789abcdef", 1};
  const auto text = tail_table_json(table, &m);
  auto doc = json::parse(text);
  EXPECT_EQ(doc["manifest"]["config_hash"], "0123456789abcdef");
  EXPECT_EQ(doc["n"], 40);
  auto back = tail_table_from_json(text);
  ASSERT_EQ(back.size(), table.size());
  for (std::size_t i = 0; i < table.size(); ++i) EXPECT_EQ(back.logp()[i], table.logp()[i]);
  EXPECT_EQ(back.sigma_n(), table.sigma_n());
  EXPECT_EQ(back.offset(), table.offset());
  EXPECT_THROW(tail_table_from_json("{\"n\": 3}"), Error);
  EXPECT_THROW(tail_table_from_json("not json"), Error);
}

TEST(TailTableIo, Csv) {
  auto table = distribution_of_Sn(builtin("rademacher"), 2);
  const auto csv = tail_table_csv(table);
  EXPECT_EQ(first_data_line(csv), "sum,logp");
  EXPECT_NE(csv.find("-2," + format_double(std::log(0.25))), std::string::npos);
}

TEST(CoefficientsIo, Json) {
  auto c = coefficient_set(builtin("rademacher"), 400, 5);
  auto doc = json::parse(coefficients_json(c, evaluate_gates(c, GateConfig{})));
  EXPECT_DOUBLE_EQ(doc["eps_m"].get<double>(), 0.25);
  EXPECT_DOUBLE_EQ(doc["gamma_m"].get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(doc["delta_m"].get<double>(), 0.0);
  EXPECT_EQ(doc["gates"]["mode"], "practical");
  EXPECT_EQ(doc["source"], "exact");
  EXPECT_TRUE(doc["truncation"].contains("gamma_truncation_error"));
}

TEST(CurvesIo, NonFiniteAsStrings) {
  BoundCurve curve;
  curve.kind = "test";
  curve.unit = "probability";
  curve.x_grid = {0.0, 1.0};
  curve.value = {INFINITY, 0.5};
  curve.valid = {0, 1};
  auto doc = json::parse(bound_curve_json(curve));
  EXPECT_EQ(doc["value"][0], "inf");
  EXPECT_EQ(doc["valid"][1], true);
  EXPECT_EQ(first_data_line(bound_curve_csv(curve)), "x,value,valid");
}

TEST(ReportsIo, Headers) {
  EXPECT_EQ(first_data_line(tail_estimates_csv({})), "x,p,lo,hi");
  EXPECT_EQ(first_data_line(mdp_csv({})), "n,scaled_log_tail,limit,a_n,log_tail");
  EXPECT_EQ(first_data_line(pairs_csv({}, 1.0)), "z,y,gap");
  RatioCurve rc;
  EXPECT_EQ(first_data_line(ratio_csv(rc)),
            "x,ratio,lo,hi,left_ratio,left_lo,left_hi,envelope,envelope_valid,source");
  std::vector<CoupledPair> pairs{{0.5, 1.0}};
  EXPECT_NE(pairs_csv(pairs, 0.25).find("0.5,1,2"), std::string::npos);
}

TEST(ReportsIo, KsAndDedecker) {
  KsSummary s{"exact", 1024, 10, 0, 0.01, 0.5, 1.0, GateMode::Practical};
  auto doc = json::parse(ks_json(s));
  EXPECT_EQ(doc["source"], "exact");
  EXPECT_FALSE(doc.contains("chains"));
  EXPECT_NEAR(doc["ks_scaled"].get<double>(), 0.01 * std::pow(1024.0, 1.0 / 6.0) / std::log(1024.0), 1e-15);
  auto r = check_dedecker_conditions(builtin("two_state", {{"rho", 0.4}}), 100);
  auto d = json::parse(dedecker_json(r));
  EXPECT_EQ(d["horizon"], 100);
  EXPECT_EQ(d["series_converges"], true);
  auto cert = eta_certificate(builtin("two_state", {{"rho", 0.4}}), 20);
  auto cj = json::parse(certificate_json(cert));
  EXPECT_EQ(cj["length"], 20);
  EXPECT_EQ(cj["beta"], "inf");
}
