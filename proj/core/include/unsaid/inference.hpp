#pragma once

#include <span>
#include <string>
#include <vector>

#include "unsaid/network.hpp"

namespace unsaid {

/// Removes barren nodes: unobserved, unqueried variables none of whose
/// descendants is observed or queried. Variables carrying virtual findings
/// count as observed. Throws UnknownVariable.
Network prune_barren(const Network& network, std::span<const std::string> query_ids,
                     const Evidence& evidence);

/// Exact marginal by variable elimination over the barren-pruned network.
/// Elimination order is greedy min-degree with ties broken by variable id.
/// Throws UnknownVariable, InvalidEvidence, or ImpossibleEvidence when the
/// evidence has probability zero.
Posterior posterior(const Network& network, const std::string& query_id, const Evidence& evidence);

std::vector<Posterior> posteriors(const Network& network, std::span<const std::string> query_ids,
                                  const Evidence& evidence);

/// P(evidence), with virtual findings applied as unnormalized likelihood
/// weights. Empty evidence yields 1.
double probability_of_evidence(const Network& network, const Evidence& evidence);

/// True when `source` is d-separated from every variable in `targets`
/// given the hard findings in `evidence`. A virtual finding behaves like an
/// observed child of its variable.
bool d_separated(const Network& network, const std::string& source,
                 std::span<const std::string> targets, const Evidence& evidence);

}  // namespace unsaid
