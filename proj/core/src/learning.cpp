#include "unsaid/learning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "unsaid/errors.hpp"
#include "unsaid/inference.hpp"

namespace unsaid {

namespace {

constexpr double kPriorSumTolerance = 1e-9;
constexpr double kClampMargin = 1e-6;

void validate_axis(const GridAxis& axis, std::string_view name, double lower, bool lower_open,
                   double upper) {
  const std::string field(name);
  if (axis.values.empty()) throw Error(ErrorCode::InvalidConfig, field + " grid is empty", field);
  if (axis.values.size() != axis.priors.size()) {
    throw Error(ErrorCode::InvalidConfig, field + " grid has mismatched priors", field);
  }
  for (std::size_t i = 0; i < axis.values.size(); ++i) {
    const double v = axis.values[i];
    const bool below = lower_open ? !(v > lower) : !(v >= lower);
    if (below || !(v < upper) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidConfig, field + " grid point out of range", field);
    }
    if (i > 0 && !(v > axis.values[i - 1])) {
      throw Error(ErrorCode::InvalidConfig, field + " grid points must be strictly increasing",
                  field);
    }
    if (!(axis.priors[i] >= 0.0)) {
      throw Error(ErrorCode::InvalidConfig, field + " grid has a negative prior", field);
    }
  }
  const double sum = std::accumulate(axis.priors.begin(), axis.priors.end(), 0.0);
  if (std::abs(sum - 1.0) > kPriorSumTolerance) {
    throw Error(ErrorCode::InvalidConfig, field + " grid priors sum to " + std::to_string(sum),
                field);
  }
}

}  // namespace

double GridAxis::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * priors[i];
  return m;
}

GridAxis GridAxis::uniform(std::vector<double> values) {
  const auto n = values.size();
  return GridAxis{std::move(values), std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0)};
}

GridAxis GridAxis::uniform_unit_interval(std::size_t n) {
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  }
  return uniform(std::move(values));
}

void ParamGrid::validate() const {
  validate_axis(reportability, "reportability", 0.0, true, 1.0);
  validate_axis(bias, "bias", 1.0, false, std::numeric_limits<double>::infinity());
}

ParamGrid ParamGrid::defaults() {
  return ParamGrid{GridAxis::uniform({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}),
                   GridAxis::uniform({1.0, 2.0, 5.0, 10.0, 20.0})};
}

std::pair<double, double> LinkPolicy::effective(double global_reportability, double global_bias,
                                                const ReportParams& params) const {
  double p = global_reportability;
  double b = global_bias;
  if (auto it = reportability_scale.find(params.symptom_id); it != reportability_scale.end()) {
    p = std::clamp(p * it->second, kClampMargin, 1.0 - kClampMargin);
  }
  if (auto it = bias_scale.find(params.symptom_id); it != bias_scale.end()) {
    b = std::max(1.0, b * it->second);
  }
  return {p, b};
}

std::string grid_label(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ConditionalTable grid_prior_table(std::string_view node_id, const GridAxis& axis) {
  return ConditionalTable{std::string(node_id), {}, axis.priors};
}

Network augment_with_global_params(const Network& network, std::span<const ReportParams> params,
                                   const ParamGrid& grid, const LinkPolicy& link) {
  for (auto id : {kReportabilityNode, kBiasNode}) {
    if (network.contains(id)) {
      throw Error(ErrorCode::DuplicateParameterNode,
                  "network already has parameter node '" + std::string(id) + "'", std::string(id));
    }
  }
  grid.validate();

  auto axis_variable = [](std::string_view id, const GridAxis& axis) {
    Variable v{std::string(id), {}, VariableKind::Parameter};
    for (double x : axis.values) v.states.push_back(grid_label(x));
    return v;
  };
  std::vector<Variable> added{axis_variable(kReportabilityNode, grid.reportability),
                              axis_variable(kBiasNode, grid.bias)};
  std::vector<ConditionalTable> tables{grid_prior_table(kReportabilityNode, grid.reportability),
                                       grid_prior_table(kBiasNode, grid.bias)};

  for (const auto& rp : params) {
    const auto& symptom = network.variable(rp.symptom_id);
    const auto absent = symptom.find_state(rp.absent_state);
    if (!absent) {
      throw Error(ErrorCode::InvalidParams,
                  "'" + symptom.id + "' has no absent-like state '" + rp.absent_state + "'",
                  symptom.id);
    }
    const auto id = report_node_id(rp.question_id, rp.symptom_id);
    ConditionalTable t{id, {std::string(kReportabilityNode), std::string(kBiasNode), symptom.id}, {}};
    t.entries.reserve(grid.reportability.size() * grid.bias.size() * symptom.cardinality() * 2);
    for (double gp : grid.reportability.values) {
      for (double gb : grid.bias.values) {
        const auto [p, b] = link.effective(gp, gb, rp);
        const auto [when_present, when_absent] = report_probabilities(p, b);
        for (std::size_t s = 0; s < symptom.cardinality(); ++s) {
          const double r = (s == *absent) ? when_absent : when_present;
          t.entries.push_back(r);
          t.entries.push_back(1.0 - r);
        }
      }
    }
    tables.push_back(std::move(t));
    if (!network.contains(id)) {
      added.push_back(Variable{id, {std::string(kReported), std::string(kNotReported)},
                               VariableKind::Report});
    }
  }
  return network.extended(std::move(added), std::move(tables));
}

ParamPosteriors global_param_posterior(const Network& network, const Evidence& evidence) {
  return ParamPosteriors{posterior(network, std::string(kReportabilityNode), evidence),
                         posterior(network, std::string(kBiasNode), evidence)};
}

std::vector<double> grid_values(const Posterior& posterior) {
  std::vector<double> out;
  out.reserve(posterior.states.size());
  for (const auto& s : posterior.states) {
    try {
      out.push_back(std::stod(s));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig,
                  "state '" + s + "' of '" + posterior.variable + "' is not a grid value",
                  posterior.variable);
    }
  }
  return out;
}

std::pair<double, double> expected_params(const ParamPosteriors& posteriors) {
  auto expectation = [](const Posterior& p) {
    const auto values = grid_values(p);
    double e = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) e += values[i] * p.probabilities[i];
    return e;
  };
  return {expectation(posteriors.reportability), expectation(posteriors.bias)};
}

ParamGrid carry_over_prior(const ParamPosteriors& posteriors, const ParamGrid& grid) {
  if (posteriors.reportability.probabilities.size() != grid.reportability.size() ||
      posteriors.bias.probabilities.size() != grid.bias.size()) {
    throw Error(ErrorCode::DimensionMismatch, "posterior dimensions do not match the grid");
  }
  ParamGrid next = grid;
  next.reportability.priors = posteriors.reportability.probabilities;
  next.bias.priors = posteriors.bias.probabilities;
  return next;
}

}  // namespace unsaid
