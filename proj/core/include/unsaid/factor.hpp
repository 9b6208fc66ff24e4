#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace unsaid {

class Network;

/// Dense table over a set of discrete variables (identified by network
/// index). Values are stored with the last scope variable varying fastest.
class Factor {
 public:
  Factor() : values_{1.0} {}
  Factor(std::vector<std::size_t> scope, std::vector<std::size_t> cards, std::vector<double> values);

  /// CPT of `variable` as a factor over (parents..., variable).
  static Factor from_table(const Network& network, std::size_t variable);
  /// Unary factor over `variable` carrying `weights`.
  static Factor unary(std::size_t variable, std::span<const double> weights);

  const std::vector<std::size_t>& scope() const noexcept { return scope_; }
  const std::vector<std::size_t>& cards() const noexcept { return cards_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool contains(std::size_t variable) const;

  Factor product(const Factor& other) const;
  Factor sum_out(std::size_t variable) const;
  /// Slice at `variable` = `state`; the variable leaves the scope.
  Factor restrict(std::size_t variable, std::size_t state) const;

  double total() const;

 private:
  std::size_t position(std::size_t variable) const;

  std::vector<std::size_t> scope_;
  std::vector<std::size_t> cards_;
  std::vector<std::size_t> strides_;
  std::vector<double> values_;
};

}  // namespace unsaid
