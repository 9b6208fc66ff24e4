#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unsaid/learning.hpp"
#include "unsaid/network.hpp"
#include "unsaid/report.hpp"

namespace unsaid {

inline constexpr std::string_view kMinorReportabilityNode = "P_Minor";

/// Maps minor-symptom reportability p to major-symptom reportability h(p).
struct SeverityLink {
  std::string name;
  std::function<double(double)> h;

  double operator()(double p) const { return h(p); }

  /// h(x) = 2x - x^2, the only link selectable by name from KB files.
  static SeverityLink quadratic();
  static SeverityLink identity();
  static SeverityLink square();
  /// Throws InvalidConfig for anything but "quadratic".
  static SeverityLink by_name(std::string_view name);
};

struct PropertyCheck {
  bool passed = true;
  std::optional<double> first_violation;
};

struct LinkValidation {
  PropertyCheck increasing;        // strictly increasing and h(p) > p on (0,1)
  PropertyCheck probability;       // h maps [0,1] into [0,1]
  PropertyCheck decreasing_odds;   // h(p)/p nonincreasing on (0,1)

  bool all_passed() const {
    return increasing.passed && probability.passed && decreasing_odds.passed;
  }
};

/// Checks the three link properties on a 10^4-interval grid plus endpoints.
LinkValidation validate_link(const SeverityLink& link);

/// Adds P_Minor over `minor_grid` and re-parents each report node on it:
/// minor symptoms use the grid value as reportability, major symptoms use
/// h(grid value). Bias comes from each symptom's ReportParams.
/// Throws MissingSeverityClass, DuplicateParameterNode, UnknownVariable.
Network augment_with_severity(const Network& network, std::span<const ReportParams> params,
                              const GridAxis& minor_grid, const SeverityLink& link);

/// Two equiprobable disorders with perfectly observed symptoms: Rash
/// (minor) for RashDisease and ChestPain (major) for HeartAttack, reported
/// on question "init" with infinite bias.
struct SeverityFixture {
  Network network;
  std::vector<ReportParams> params;
  std::string minor_disorder = "RashDisease";
  std::string major_disorder = "HeartAttack";
  std::string minor_symptom = "Rash";
  std::string major_symptom = "ChestPain";
};

SeverityFixture make_severity_fixture(double disorder_prior = 0.01);

/// Posteriors of the minor and major disorder, in that order, after an open
/// probe on a severity-augmented network.
std::pair<Posterior, Posterior> severity_posterior_demo(const Network& network,
                                                        std::span<const ReportParams> params,
                                                        const OpenProbeResponse& response,
                                                        const SeverityFixture& fixture);

struct SeverityReference {
  double major_given_minor_report;
  double minor_given_major_report;
};

/// Continuous-prior values for the fixture (uniform P_Minor, infinite bias),
/// by composite Simpson quadrature of the defining integrals.
SeverityReference severity_reference(const SeverityLink& link, double disorder_prior = 0.01);

}  // namespace unsaid
