#include "unsaid/report.hpp"

#include <cmath>
#include <set>

#include "unsaid/errors.hpp"

namespace unsaid {

namespace {

const ReportParams* find_params(std::span<const ReportParams> params, std::string_view question,
                                std::string_view symptom) {
  for (const auto& p : params) {
    if (p.symptom_id == symptom && p.question_id == question) return &p;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(SeverityClass severity) {
  switch (severity) {
    case SeverityClass::None: return "none";
    case SeverityClass::Minor: return "minor";
    case SeverityClass::Major: return "major";
  }
  return "none";
}

SeverityClass parse_severity_class(std::string_view text) {
  if (text == "none") return SeverityClass::None;
  if (text == "minor") return SeverityClass::Minor;
  if (text == "major") return SeverityClass::Major;
  throw Error(ErrorCode::ParseError, "unknown severity class '" + std::string(text) + "'",
              "severity");
}

void ReportParams::validate() const { (void)report_probabilities(reportability, bias); }

std::string report_node_id(std::string_view question_id, std::string_view symptom_id) {
  std::string id = "Report_";
  id += question_id;
  id += '(';
  id += symptom_id;
  id += ')';
  return id;
}

std::pair<double, double> report_probabilities(double reportability, double bias) {
  if (!(reportability > 0.0 && reportability < 1.0)) {
    throw Error(ErrorCode::InvalidParams,
                "reportability must lie in (0,1), got " + std::to_string(reportability),
                "reportability");
  }
  if (!(bias >= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "bias must be >= 1, got " + std::to_string(bias), "bias");
  }
  return {reportability, std::isinf(bias) ? 0.0 : reportability / bias};
}

ConditionalTable report_cpt(const Variable& symptom, const ReportParams& params) {
  const auto [when_present, when_absent] = report_probabilities(params.reportability, params.bias);
  const auto absent = symptom.find_state(params.absent_state);
  if (!absent) {
    throw Error(ErrorCode::InvalidParams,
                "'" + symptom.id + "' has no absent-like state '" + params.absent_state + "'",
                symptom.id);
  }
  ConditionalTable table{report_node_id(params.question_id, symptom.id), {symptom.id}, {}};
  table.entries.reserve(symptom.cardinality() * 2);
  for (std::size_t s = 0; s < symptom.cardinality(); ++s) {
    const double p = (s == *absent) ? when_absent : when_present;
    table.entries.push_back(p);
    table.entries.push_back(1.0 - p);
  }
  return table;
}

double lambda_no_report(const ReportParams& params) {
  const auto [when_present, when_absent] = report_probabilities(params.reportability, params.bias);
  return (1.0 - when_present) / (1.0 - when_absent);
}

Network augment_with_reports(const Network& network, std::span<const ReportParams> params,
                             std::string_view question_id) {
  if (params.empty()) return network;
  std::vector<Variable> added;
  std::vector<ConditionalTable> tables;
  std::set<std::string> seen;
  for (const auto& p : params) {
    if (p.question_id != question_id) {
      throw Error(ErrorCode::InvalidParams,
                  "report params for '" + p.symptom_id + "' are bound to question '" +
                      p.question_id + "', not '" + std::string(question_id) + "'",
                  p.symptom_id);
    }
    const auto& symptom = network.variable(p.symptom_id);
    const auto id = report_node_id(question_id, p.symptom_id);
    if (network.contains(id) || !seen.insert(id).second) {
      throw Error(ErrorCode::DuplicateReportNode, "report node '" + id + "' already exists", id);
    }
    tables.push_back(report_cpt(symptom, p));
    added.push_back(Variable{id, {std::string(kReported), std::string(kNotReported)},
                             VariableKind::Report});
  }
  return network.extended(std::move(added), std::move(tables));
}

Evidence open_probe_evidence(const OpenProbeResponse& response,
                             std::span<const ReportParams> params) {
  Evidence evidence;
  for (const auto& [symptom, state] : response.reported) {
    if (!find_params(params, response.question_id, symptom)) {
      throw Error(ErrorCode::UnknownSymptom,
                  "'" + symptom + "' is not bound to question '" + response.question_id + "'",
                  symptom);
    }
    evidence.observe(symptom, state);
  }
  for (const auto& p : params) {
    if (p.question_id != response.question_id) continue;
    const bool reported = response.reported.contains(p.symptom_id);
    evidence.observe(report_node_id(p.question_id, p.symptom_id),
                     std::string(reported ? kReported : kNotReported));
  }
  return evidence;
}

Evidence soft_evidence_shortcut(const Network& network, std::span<const ReportParams> params,
                                const OpenProbeResponse& response) {
  Evidence evidence;
  for (const auto& [symptom, state] : response.reported) {
    if (!find_params(params, response.question_id, symptom)) {
      throw Error(ErrorCode::UnknownSymptom,
                  "'" + symptom + "' is not bound to question '" + response.question_id + "'",
                  symptom);
    }
    evidence.observe(symptom, state);
  }
  for (const auto& p : params) {
    if (p.question_id != response.question_id || response.reported.contains(p.symptom_id)) continue;
    const auto& symptom = network.variable(p.symptom_id);
    const auto absent = symptom.find_state(p.absent_state);
    if (!absent) {
      throw Error(ErrorCode::InvalidParams,
                  "'" + symptom.id + "' has no absent-like state '" + p.absent_state + "'",
                  symptom.id);
    }
    std::vector<double> weights(symptom.cardinality(), lambda_no_report(p));
    weights[*absent] = 1.0;
    evidence.observe_likelihood(p.symptom_id, std::move(weights));
  }
  return evidence;
}

}  // namespace unsaid
