#include "unsaid/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "unsaid/errors.hpp"

namespace unsaid {

namespace {

constexpr double kRowSumTolerance = 1e-9;

void validate_table(const Variable& child, const ConditionalTable& table,
                    const std::vector<const Variable*>& parents) {
  std::size_t rows = 1;
  for (const auto* p : parents) rows *= p->cardinality();
  const std::size_t expected = rows * child.cardinality();
  if (table.entries.size() != expected) {
    throw Error(ErrorCode::MalformedTable,
                "table for '" + child.id + "' has " + std::to_string(table.entries.size()) +
                    " entries, expected " + std::to_string(expected),
                child.id);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t s = 0; s < child.cardinality(); ++s) {
      const double v = table.entries[r * child.cardinality() + s];
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw Error(ErrorCode::MalformedTable,
                    "table for '" + child.id + "' has entry outside [0,1]", child.id);
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw Error(ErrorCode::MalformedTable,
                  "table for '" + child.id + "' row " + std::to_string(r) + " sums to " +
                      std::to_string(sum),
                  child.id);
    }
  }
}

}  // namespace

std::string_view to_string(VariableKind kind) {
  switch (kind) {
    case VariableKind::Disorder: return "disorder";
    case VariableKind::Symptom: return "symptom";
    case VariableKind::Report: return "report";
    case VariableKind::Parameter: return "parameter";
    case VariableKind::Other: return "other";
  }
  return "other";
}

VariableKind parse_variable_kind(std::string_view text) {
  if (text == "disorder") return VariableKind::Disorder;
  if (text == "symptom") return VariableKind::Symptom;
  if (text == "report") return VariableKind::Report;
  if (text == "parameter") return VariableKind::Parameter;
  if (text == "other") return VariableKind::Other;
  throw Error(ErrorCode::ParseError, "unknown variable kind '" + std::string(text) + "'", "kind");
}

std::optional<std::size_t> Variable::find_state(std::string_view label) const {
  const auto it = std::find(states.begin(), states.end(), label);
  if (it == states.end()) return std::nullopt;
  return static_cast<std::size_t>(it - states.begin());
}

std::size_t Variable::state_index(std::string_view label) const {
  if (auto idx = find_state(label)) return *idx;
  throw Error(ErrorCode::InvalidEvidence,
              "'" + std::string(label) + "' is not a state of '" + id + "'", id);
}

Network Network::build(std::vector<Variable> variables, std::vector<ConditionalTable> tables) {
  Network net;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    const auto& v = variables[i];
    if (v.id.empty()) throw Error(ErrorCode::MalformedTable, "variable with empty id");
    const std::size_t min_states = v.kind == VariableKind::Parameter ? 1 : 2;
    if (v.states.size() < min_states) {
      throw Error(ErrorCode::MalformedTable,
                  "variable '" + v.id + "' needs at least " + std::to_string(min_states) + " states",
                  v.id);
    }
    std::set<std::string> labels(v.states.begin(), v.states.end());
    if (labels.size() != v.states.size()) {
      throw Error(ErrorCode::MalformedTable, "variable '" + v.id + "' has duplicate states",
                  v.id);
    }
    if (!net.index_.emplace(v.id, i).second) {
      throw Error(ErrorCode::MalformedTable, "duplicate variable id '" + v.id + "'", v.id);
    }
  }

  std::vector<std::optional<ConditionalTable>> by_var(variables.size());
  for (auto& t : tables) {
    const auto it = net.index_.find(t.child);
    if (it == net.index_.end()) {
      throw Error(ErrorCode::UnknownVariable, "table for unknown variable '" + t.child + "'",
                  t.child);
    }
    if (by_var[it->second]) {
      throw Error(ErrorCode::MalformedTable, "more than one table for '" + t.child + "'",
                  t.child);
    }
    by_var[it->second] = std::move(t);
  }

  net.parents_.resize(variables.size());
  net.children_.resize(variables.size());
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (!by_var[i]) {
      throw Error(ErrorCode::MissingTable, "no table for '" + variables[i].id + "'",
                  variables[i].id);
    }
    std::vector<const Variable*> parent_vars;
    std::set<std::size_t> seen;
    for (const auto& pid : by_var[i]->parents) {
      const auto it = net.index_.find(pid);
      if (it == net.index_.end()) {
        throw Error(ErrorCode::MalformedTable,
                    "table for '" + variables[i].id + "' references unknown parent '" + pid + "'",
                    variables[i].id);
      }
      if (it->second == i) {
        throw Error(ErrorCode::CyclicGraph, "'" + pid + "' is its own parent", pid);
      }
      if (!seen.insert(it->second).second) {
        throw Error(ErrorCode::MalformedTable,
                    "table for '" + variables[i].id + "' repeats parent '" + pid + "'",
                    variables[i].id);
      }
      net.parents_[i].push_back(it->second);
      parent_vars.push_back(&variables[it->second]);
    }
    validate_table(variables[i], *by_var[i], parent_vars);
  }
  for (std::size_t i = 0; i < variables.size(); ++i) {
    for (auto p : net.parents_[i]) net.children_[p].push_back(i);
  }

  // Kahn's algorithm; the min-heap keeps the order tied to declaration order.
  std::vector<std::size_t> indegree(variables.size());
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    indegree[i] = net.parents_[i].size();
    if (indegree[i] == 0) ready.push(i);
  }
  while (!ready.empty()) {
    const auto v = ready.top();
    ready.pop();
    net.topo_.push_back(v);
    for (auto c : net.children_[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (net.topo_.size() != variables.size()) {
    std::string culprit;
    for (std::size_t i = 0; i < variables.size(); ++i) {
      if (indegree[i] > 0 && (culprit.empty() || variables[i].id < culprit)) {
        culprit = variables[i].id;
      }
    }
    throw Error(ErrorCode::CyclicGraph, "cycle through '" + culprit + "'", culprit);
  }

  net.variables_ = std::move(variables);
  net.tables_.reserve(by_var.size());
  for (auto& t : by_var) net.tables_.push_back(std::move(*t));
  return net;
}

bool Network::contains(std::string_view id) const { return find(id).has_value(); }

std::optional<std::size_t> Network::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Network::index_of(std::string_view id) const {
  if (auto idx = find(id)) return *idx;
  throw Error(ErrorCode::UnknownVariable, "unknown variable '" + std::string(id) + "'",
              std::string(id));
}

std::vector<std::string> Network::ids_of_kind(VariableKind kind) const {
  std::vector<std::string> out;
  for (const auto& v : variables_) {
    if (v.kind == kind) out.push_back(v.id);
  }
  return out;
}

Network Network::extended(std::vector<Variable> added, std::vector<ConditionalTable> tables) const {
  std::vector<Variable> vars = variables_;
  for (auto& v : added) vars.push_back(std::move(v));
  std::map<std::string, ConditionalTable> replacement;
  for (auto& t : tables) {
    auto child = t.child;
    if (!replacement.emplace(child, std::move(t)).second) {
      throw Error(ErrorCode::MalformedTable, "more than one table for '" + child + "'", child);
    }
  }
  std::vector<ConditionalTable> all;
  all.reserve(vars.size());
  for (const auto& t : tables_) {
    auto it = replacement.find(t.child);
    if (it != replacement.end()) {
      all.push_back(std::move(it->second));
      replacement.erase(it);
    } else {
      all.push_back(t);
    }
  }
  for (auto& [_, t] : replacement) all.push_back(std::move(t));
  return build(std::move(vars), std::move(all));
}

Network Network::restricted_to(const std::vector<bool>& keep) const {
  std::vector<Variable> vars;
  std::vector<ConditionalTable> tables;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (!keep.at(i)) continue;
    vars.push_back(variables_[i]);
    tables.push_back(tables_[i]);
  }
  return build(std::move(vars), std::move(tables));
}

Network build_network(std::vector<Variable> variables, std::vector<ConditionalTable> tables) {
  return Network::build(std::move(variables), std::move(tables));
}

Evidence& Evidence::observe(const std::string& id, const std::string& state) {
  if (soft.contains(id)) {
    throw Error(ErrorCode::InvalidEvidence, "'" + id + "' already has a virtual finding", id);
  }
  hard[id] = state;
  return *this;
}

Evidence& Evidence::observe_likelihood(const std::string& id, std::vector<double> weights) {
  if (hard.contains(id)) {
    throw Error(ErrorCode::InvalidEvidence, "'" + id + "' already has a hard finding", id);
  }
  soft[id] = std::move(weights);
  return *this;
}

void Evidence::validate(const Network& network) const {
  for (const auto& [id, state] : hard) {
    const auto& var = network.variable(id);
    (void)var.state_index(state);
    if (soft.contains(id)) {
      throw Error(ErrorCode::InvalidEvidence, "'" + id + "' has both hard and virtual findings",
                  id);
    }
  }
  for (const auto& [id, weights] : soft) {
    const auto& var = network.variable(id);
    if (weights.size() != var.cardinality()) {
      throw Error(ErrorCode::InvalidEvidence,
                  "virtual finding on '" + id + "' needs " + std::to_string(var.cardinality()) +
                      " weights",
                  id);
    }
    double max_weight = 0.0;
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0.0) {
        throw Error(ErrorCode::InvalidEvidence,
                    "virtual finding on '" + id + "' has a negative or non-finite weight", id);
      }
      max_weight = std::max(max_weight, w);
    }
    if (max_weight <= 0.0) {
      throw Error(ErrorCode::InvalidEvidence, "virtual finding on '" + id + "' is all zero", id);
    }
  }
}

double Posterior::probability(std::string_view state) const {
  const auto it = std::find(states.begin(), states.end(), state);
  if (it == states.end()) {
    throw Error(ErrorCode::InvalidEvidence,
                "'" + std::string(state) + "' is not a state of '" + variable + "'", variable);
  }
  return probabilities[static_cast<std::size_t>(it - states.begin())];
}

}  // namespace unsaid
