#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "cramerlab/blocking.hpp"
#include "cramerlab/bounds.hpp"
#include "cramerlab/coefficients.hpp"
#include "cramerlab/coupling.hpp"
#include "cramerlab/exact_engine.hpp"
#include "cramerlab/montecarlo.hpp"

namespace cramerlab {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Run provenance written at the top of every output file.
struct Manifest {
  std::string command;
  std::string model;
  std::string config_hash;  // 16 hex digits
  std::uint64_t seed = 0;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data) noexcept;
std::string hex64(std::uint64_t v);

/// Shortest text that is identical on every platform: %.17g, or inf/-inf/nan.
std::string format_double(double v);

/// "# key=value" lines for CSV files.
std::string manifest_comment(const Manifest& manifest);

std::string tail_table_json(const TailTable& table, const Manifest* manifest = nullptr);
std::string tail_table_csv(const TailTable& table, const Manifest* manifest = nullptr);
/// Inverse of tail_table_json. Throws ParseError.
TailTable tail_table_from_json(std::string_view text);

std::string decomposition_csv(const BlockDecomposition& decomposition, const Manifest* manifest = nullptr);

std::string coefficients_json(const CoefficientSet& coeffs, const GateVerdict& gates,
                              const Manifest* manifest = nullptr);

std::string bound_curve_csv(const BoundCurve& curve, const Manifest* manifest = nullptr);
std::string bound_curve_json(const BoundCurve& curve, const Manifest* manifest = nullptr);

std::string ratio_csv(const RatioCurve& curve, const Manifest* manifest = nullptr);
std::string tail_estimates_csv(std::span<const TailEstimate> tails, const Manifest* manifest = nullptr);
std::string mdp_csv(const MdpResult& result, const Manifest* manifest = nullptr);

std::string coupling_report_json(const CouplingReport& report, const Manifest* manifest = nullptr);
std::string pairs_csv(std::span<const CoupledPair> pairs, double varsigma, const Manifest* manifest = nullptr);

/// Kolmogorov distance summary written by the verify command.
struct KsSummary {
  std::string source;  // exact | mc
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t chains = 0;
  double ks = 0.0;
  double berry_esseen_bound = 0.0;
  double berry_esseen_constant = 1.0;
  GateMode gate_mode = GateMode::Practical;
};
std::string ks_json(const KsSummary& summary, const Manifest* manifest = nullptr);

std::string dedecker_json(const DedeckerReport& report, const Manifest* manifest = nullptr);
std::string certificate_json(const DecayCertificate& cert, const Manifest* manifest = nullptr);

}  // namespace cramerlab
