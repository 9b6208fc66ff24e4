#pragma once

#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "unsaid/network.hpp"

namespace unsaid {

enum class SeverityClass { None, Minor, Major };

std::string_view to_string(SeverityClass severity);
SeverityClass parse_severity_class(std::string_view text);

/// How a symptom behaves when the patient answers an open probe.
///
/// `reportability` is P(report | symptom present-like); `bias` is the ratio
/// P(report | present-like) / P(report | absent-like), so an absent-like
/// symptom is reported with probability reportability / bias. A bias of
/// +infinity means absent symptoms are never volunteered.
struct ReportParams {
  std::string symptom_id;
  std::string question_id;
  double reportability = 0.5;
  double bias = 1.0;
  SeverityClass severity = SeverityClass::None;
  /// The one state treated as absent-like; every other state is present-like.
  std::string absent_state = "absent";

  /// Throws InvalidParams.
  void validate() const;
};

inline constexpr double kInfiniteBias = std::numeric_limits<double>::infinity();

/// Report node states, in table column order.
inline constexpr std::string_view kReported = "true";
inline constexpr std::string_view kNotReported = "false";

std::string report_node_id(std::string_view question_id, std::string_view symptom_id);

/// (P(report | present-like), P(report | absent-like)) for raw parameters.
/// Throws InvalidParams.
std::pair<double, double> report_probabilities(double reportability, double bias);

/// CPT of Report_Q(symptom) with the symptom as its only parent.
ConditionalTable report_cpt(const Variable& symptom, const ReportParams& params);

/// Relative likelihood of no report, P(no report | present) / P(no report | absent),
/// i.e. (1 - P) / (1 - P / B).
double lambda_no_report(const ReportParams& params);

/// Adds one binary report node per symptom, child of exactly that symptom.
/// Throws UnknownVariable, DuplicateReportNode or InvalidParams.
Network augment_with_reports(const Network& network, std::span<const ReportParams> params,
                             std::string_view question_id);

struct OpenProbeResponse {
  std::string question_id;
  /// symptom id -> reported state (presence or a volunteered absence).
  std::map<std::string, std::string> reported;
};

/// Reported symptoms become hard findings together with Report = true;
/// every other symptom bound to the question gets Report = false.
/// Throws UnknownSymptom for a symptom not bound to the question.
Evidence open_probe_evidence(const OpenProbeResponse& response, std::span<const ReportParams> params);

/// Same information without report nodes: reported symptoms are hard
/// findings, unreported ones get the virtual finding (lambda on present-like
/// states, 1 on the absent-like state). Only valid for fixed parameters.
Evidence soft_evidence_shortcut(const Network& network, std::span<const ReportParams> params,
                                const OpenProbeResponse& response);

}  // namespace unsaid
