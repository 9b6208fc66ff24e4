#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "unsaid/kb.hpp"

namespace unsaid {

/// P(present) per disorder, keyed by disorder id.
using DisorderTable = std::map<std::string, double>;

/// Differential after an open probe on the KB's first open probe with every
/// report node set to (reportability, bias), one row per bias value.
/// Throws InvalidConfig for an empty bias list, UnknownSymptom, InvalidParams.
std::vector<DisorderTable> sweep_bias(const KnowledgeBase& kb,
                                      const std::map<std::string, std::string>& reported,
                                      std::span<const double> biases, double reportability);

/// Same findings entered as plain closed-probe answers, no report nodes.
DisorderTable closed_probe_only(const KnowledgeBase& kb,
                                const std::map<std::string, std::string>& findings);

struct LearnRow {
  double expected_reportability = 0.0;
  double expected_bias = 0.0;
};

/// E[P_Global], E[B_Global] after each open-probe scenario in learn-global
/// mode. Throws UnsupportedMode, UnknownSymptom.
std::vector<LearnRow> learn_demo(const KnowledgeBase& kb,
                                 std::span<const std::map<std::string, std::string>> scenarios);

}  // namespace unsaid
