#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unsaid/network.hpp"
#include "unsaid/report.hpp"

namespace unsaid {

inline constexpr std::string_view kReportabilityNode = "P_Global";
inline constexpr std::string_view kBiasNode = "B_Global";

/// One discretized parameter: strictly increasing support points, each
/// with a prior weight.
struct GridAxis {
  std::vector<double> values;
  std::vector<double> priors;

  std::size_t size() const noexcept { return values.size(); }
  double mean() const;

  static GridAxis uniform(std::vector<double> values);
  /// n midpoints of [0,1] with equal weight; approximates a uniform prior.
  static GridAxis uniform_unit_interval(std::size_t n);
};

/// Discretized global reportability and bias.
struct ParamGrid {
  GridAxis reportability;
  GridAxis bias;

  /// Throws InvalidConfig if points are not strictly increasing, lie
  /// outside (0,1) / [1,inf), or priors do not sum to 1.
  void validate() const;

  /// Reportability {0.1,...,0.9} and bias {1,2,5,10,20}, uniform priors.
  static ParamGrid defaults();
};

/// Maps global (reportability, bias) to a report node's effective
/// parameters. Identity unless per-symptom multiplicative scales are set;
/// scaled reportability is clamped into (0,1) and scaled bias to >= 1.
struct LinkPolicy {
  std::map<std::string, double> reportability_scale;
  std::map<std::string, double> bias_scale;

  std::pair<double, double> effective(double global_reportability, double global_bias,
                                      const ReportParams& params) const;

  static LinkPolicy identity() { return {}; }
};

/// Adds P_Global and B_Global and makes them parents of every report node
/// named by `params` (creating report nodes that do not exist yet).
/// Throws DuplicateParameterNode, InvalidConfig, UnknownVariable.
Network augment_with_global_params(const Network& network, std::span<const ReportParams> params,
                                   const ParamGrid& grid,
                                   const LinkPolicy& link = LinkPolicy::identity());

struct ParamPosteriors {
  Posterior reportability;
  Posterior bias;
};

/// Throws UnknownVariable when the parameter nodes are absent, or
/// ImpossibleEvidence.
ParamPosteriors global_param_posterior(const Network& network, const Evidence& evidence);

/// Grid value of each state of a parameter posterior.
std::vector<double> grid_values(const Posterior& posterior);

/// Probability-weighted means: (E[reportability], E[bias]).
std::pair<double, double> expected_params(const ParamPosteriors& posteriors);

/// Grid with its priors replaced by `posteriors`, for the next interview
/// with the same patient. Throws DimensionMismatch.
ParamGrid carry_over_prior(const ParamPosteriors& posteriors, const ParamGrid& grid);

/// Canonical state label for a grid value (17 significant digits).
std::string grid_label(double value);

/// Prior CPT for a root parameter node over `axis`.
ConditionalTable grid_prior_table(std::string_view node_id, const GridAxis& axis);

}  // namespace unsaid
