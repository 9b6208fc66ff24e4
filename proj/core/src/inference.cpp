#include "unsaid/inference.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <set>

#include "unsaid/errors.hpp"
#include "unsaid/factor.hpp"

namespace unsaid {

namespace {

// Marks every variable that is queried, observed or an ancestor of one.
std::vector<bool> relevant_mask(const Network& network, const std::vector<std::size_t>& anchors) {
  std::vector<bool> keep(network.size(), false);
  std::vector<std::size_t> stack(anchors.begin(), anchors.end());
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    if (keep[v]) continue;
    keep[v] = true;
    for (auto p : network.parents(v)) stack.push_back(p);
  }
  return keep;
}

std::vector<std::size_t> anchor_indices(const Network& network,
                                        std::span<const std::string> query_ids,
                                        const Evidence& evidence) {
  std::vector<std::size_t> anchors;
  for (const auto& q : query_ids) anchors.push_back(network.index_of(q));
  for (const auto& [id, _] : evidence.hard) anchors.push_back(network.index_of(id));
  for (const auto& [id, _] : evidence.soft) anchors.push_back(network.index_of(id));
  return anchors;
}

// Runs variable elimination over the relevant subnetwork and returns the
// unnormalized factor over `query` (or a scalar factor when absent).
Factor eliminate(const Network& network, std::optional<std::size_t> query,
                 const Evidence& evidence) {
  std::vector<std::size_t> anchors;
  if (query) anchors.push_back(*query);
  std::vector<std::optional<std::size_t>> observed(network.size());
  for (const auto& [id, state] : evidence.hard) {
    const auto idx = network.index_of(id);
    observed[idx] = network.variable(idx).state_index(state);
    anchors.push_back(idx);
  }
  for (const auto& [id, _] : evidence.soft) anchors.push_back(network.index_of(id));
  const auto keep = relevant_mask(network, anchors);

  std::vector<Factor> factors;
  for (std::size_t v = 0; v < network.size(); ++v) {
    if (!keep[v]) continue;
    Factor f = Factor::from_table(network, v);
    for (auto u : std::vector<std::size_t>(f.scope())) {
      if (observed[u] && !(query && *query == u)) f = f.restrict(u, *observed[u]);
    }
    factors.push_back(std::move(f));
  }
  for (const auto& [id, weights] : evidence.soft) {
    factors.push_back(Factor::unary(network.index_of(id), weights));
  }
  // A queried variable that is also observed keeps its scope; zero out the
  // non-observed states instead.
  if (query && observed[*query]) {
    std::vector<double> indicator(network.variable(*query).cardinality(), 0.0);
    indicator[*observed[*query]] = 1.0;
    factors.push_back(Factor::unary(*query, indicator));
  }

  std::set<std::size_t> pending;
  for (const auto& f : factors) {
    for (auto v : f.scope()) {
      if (!(query && *query == v)) pending.insert(v);
    }
  }

  while (!pending.empty()) {
    std::size_t best = *pending.begin();
    std::size_t best_degree = std::numeric_limits<std::size_t>::max();
    for (auto v : pending) {
      std::set<std::size_t> neighbours;
      for (const auto& f : factors) {
        if (!f.contains(v)) continue;
        neighbours.insert(f.scope().begin(), f.scope().end());
      }
      neighbours.erase(v);
      const auto degree = neighbours.size();
      if (degree < best_degree ||
          (degree == best_degree && network.variable(v).id < network.variable(best).id)) {
        best = v;
        best_degree = degree;
      }
    }
    pending.erase(best);

    Factor bucket;
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (f.contains(best)) {
        bucket = bucket.product(f);
      } else {
        rest.push_back(std::move(f));
      }
    }
    rest.push_back(bucket.sum_out(best));
    factors = std::move(rest);
  }

  Factor result;
  for (const auto& f : factors) result = result.product(f);
  return result;
}

}  // namespace

Network prune_barren(const Network& network, std::span<const std::string> query_ids,
                     const Evidence& evidence) {
  evidence.validate(network);
  return network.restricted_to(relevant_mask(network, anchor_indices(network, query_ids, evidence)));
}

Posterior posterior(const Network& network, const std::string& query_id, const Evidence& evidence) {
  evidence.validate(network);
  const auto q = network.index_of(query_id);
  const Factor f = eliminate(network, q, evidence);
  const double mass = f.total();
  if (!(mass > 0.0)) {
    throw Error(ErrorCode::ImpossibleEvidence, "evidence has probability zero", query_id);
  }
  const auto& var = network.variable(q);
  Posterior out{var.id, var.states, {}};
  out.probabilities.reserve(f.size());
  for (double v : f.values()) out.probabilities.push_back(v / mass);
  return out;
}

std::vector<Posterior> posteriors(const Network& network, std::span<const std::string> query_ids,
                                  const Evidence& evidence) {
  std::vector<Posterior> out;
  out.reserve(query_ids.size());
  for (const auto& q : query_ids) out.push_back(posterior(network, q, evidence));
  return out;
}

double probability_of_evidence(const Network& network, const Evidence& evidence) {
  evidence.validate(network);
  return eliminate(network, std::nullopt, evidence).total();
}

bool d_separated(const Network& network, const std::string& source,
                 std::span<const std::string> targets, const Evidence& evidence) {
  evidence.validate(network);
  const auto start = network.index_of(source);
  std::vector<bool> observed(network.size(), false);
  for (const auto& [id, _] : evidence.hard) observed[network.index_of(id)] = true;

  // Variables that are observed, carry a virtual finding, or have such a
  // descendant: these activate v-structures.
  std::vector<std::size_t> seeds;
  for (const auto& [id, _] : evidence.hard) seeds.push_back(network.index_of(id));
  for (const auto& [id, _] : evidence.soft) seeds.push_back(network.index_of(id));
  const auto activating = relevant_mask(network, seeds);

  if (observed[start]) return true;

  // Reachability over (node, arrived-from-child) pairs.
  std::vector<bool> visited_up(network.size(), false), visited_down(network.size(), false);
  std::vector<bool> reachable(network.size(), false);
  std::vector<std::pair<std::size_t, bool>> stack{{start, true}};
  while (!stack.empty()) {
    const auto [v, up] = stack.back();
    stack.pop_back();
    auto& visited = up ? visited_up : visited_down;
    if (visited[v]) continue;
    visited[v] = true;
    if (!observed[v]) reachable[v] = true;
    if (up && !observed[v]) {
      for (auto p : network.parents(v)) stack.emplace_back(p, true);
      for (auto c : network.children(v)) stack.emplace_back(c, false);
    } else if (!up) {
      if (!observed[v]) {
        for (auto c : network.children(v)) stack.emplace_back(c, false);
      }
      if (activating[v]) {
        for (auto p : network.parents(v)) stack.emplace_back(p, true);
      }
    }
  }
  for (const auto& t : targets) {
    const auto idx = network.index_of(t);
    if (idx != start && reachable[idx]) return false;
  }
  return true;
}

}  // namespace unsaid
