#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace unsaid {

enum class VariableKind { Disorder, Symptom, Report, Parameter, Other };

std::string_view to_string(VariableKind kind);
VariableKind parse_variable_kind(std::string_view text);

struct Variable {
  std::string id;
  std::vector<std::string> states;
  VariableKind kind = VariableKind::Other;

  std::size_t cardinality() const noexcept { return states.size(); }
  std::optional<std::size_t> find_state(std::string_view label) const;
  /// Throws InvalidEvidence when the label is not a state of this variable.
  std::size_t state_index(std::string_view label) const;
};

/// CPT for `child` given `parents`. Entries are laid out with the parent
/// combination as the row (row-major over the parents' declared state
/// orders, first parent slowest) and the child state as the column:
/// entries[row * |child| + child_state].
struct ConditionalTable {
  std::string child;
  std::vector<std::string> parents;
  std::vector<double> entries;
};

/// Immutable, validated discrete Bayesian network.
class Network {
 public:
  Network() = default;

  /// Validates and builds. Throws MissingTable, MalformedTable,
  /// UnknownVariable or CyclicGraph naming the offending variable.
  static Network build(std::vector<Variable> variables, std::vector<ConditionalTable> tables);

  std::size_t size() const noexcept { return variables_.size(); }
  bool contains(std::string_view id) const;
  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws UnknownVariable.
  std::size_t index_of(std::string_view id) const;

  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const std::vector<ConditionalTable>& tables() const noexcept { return tables_; }
  const Variable& variable(std::size_t index) const { return variables_.at(index); }
  const Variable& variable(std::string_view id) const { return variables_[index_of(id)]; }
  const ConditionalTable& table(std::size_t index) const { return tables_.at(index); }
  const ConditionalTable& table(std::string_view id) const { return tables_[index_of(id)]; }

  const std::vector<std::size_t>& parents(std::size_t index) const { return parents_.at(index); }
  const std::vector<std::size_t>& children(std::size_t index) const { return children_.at(index); }
  /// Parents before children; ties resolved by declaration order.
  const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }

  std::vector<std::string> ids_of_kind(VariableKind kind) const;

  /// Returns a new network with `added` variables appended and `tables`
  /// either defining the new variables or replacing existing CPTs.
  Network extended(std::vector<Variable> added, std::vector<ConditionalTable> tables) const;

  /// Keeps only the flagged variables. The kept set must be closed under
  /// parents.
  Network restricted_to(const std::vector<bool>& keep) const;

 private:
  std::vector<Variable> variables_;
  std::vector<ConditionalTable> tables_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> topo_;
};

Network build_network(std::vector<Variable> variables, std::vector<ConditionalTable> tables);

/// Hard findings plus virtual (likelihood-vector) findings.
struct Evidence {
  std::map<std::string, std::string> hard;
  std::map<std::string, std::vector<double>> soft;

  /// Both throw InvalidEvidence if the variable already carries the other
  /// kind of finding.
  Evidence& observe(const std::string& id, const std::string& state);
  Evidence& observe_likelihood(const std::string& id, std::vector<double> weights);

  bool empty() const noexcept { return hard.empty() && soft.empty(); }
  bool mentions(const std::string& id) const { return hard.contains(id) || soft.contains(id); }

  /// Checks ids and states against the network. Throws UnknownVariable or
  /// InvalidEvidence.
  void validate(const Network& network) const;
};

struct Posterior {
  std::string variable;
  std::vector<std::string> states;
  std::vector<double> probabilities;

  double probability(std::string_view state) const;
};

}  // namespace unsaid
