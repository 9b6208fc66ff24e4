#include "unsaid/factor.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <stdexcept>

#include "unsaid/network.hpp"

namespace unsaid {

namespace {

std::vector<std::size_t> make_strides(const std::vector<std::size_t>& cards) {
  std::vector<std::size_t> strides(cards.size());
  std::size_t stride = 1;
  for (std::size_t i = cards.size(); i-- > 0;) {
    strides[i] = stride;
    stride *= cards[i];
  }
  return strides;
}

}  // namespace

Factor::Factor(std::vector<std::size_t> scope, std::vector<std::size_t> cards,
               std::vector<double> values)
    : scope_(std::move(scope)), cards_(std::move(cards)), values_(std::move(values)) {
  if (scope_.size() != cards_.size()) throw std::invalid_argument("factor scope/cards mismatch");
  const auto n = std::accumulate(cards_.begin(), cards_.end(), std::size_t{1}, std::multiplies<>());
  if (values_.size() != n) throw std::invalid_argument("factor value count mismatch");
  strides_ = make_strides(cards_);
}

Factor Factor::from_table(const Network& network, std::size_t variable) {
  std::vector<std::size_t> scope = network.parents(variable);
  std::vector<std::size_t> cards;
  for (auto p : scope) cards.push_back(network.variable(p).cardinality());
  scope.push_back(variable);
  cards.push_back(network.variable(variable).cardinality());
  return Factor(std::move(scope), std::move(cards), network.table(variable).entries);
}

Factor Factor::unary(std::size_t variable, std::span<const double> weights) {
  return Factor({variable}, {weights.size()}, std::vector<double>(weights.begin(), weights.end()));
}

bool Factor::contains(std::size_t variable) const {
  return std::find(scope_.begin(), scope_.end(), variable) != scope_.end();
}

std::size_t Factor::position(std::size_t variable) const {
  const auto it = std::find(scope_.begin(), scope_.end(), variable);
  assert(it != scope_.end());
  return static_cast<std::size_t>(it - scope_.begin());
}

Factor Factor::product(const Factor& other) const {
  std::vector<std::size_t> scope = scope_;
  std::vector<std::size_t> cards = cards_;
  for (std::size_t i = 0; i < other.scope_.size(); ++i) {
    if (!contains(other.scope_[i])) {
      scope.push_back(other.scope_[i]);
      cards.push_back(other.cards_[i]);
    }
  }
  // Stride of each result variable inside each operand (0 when absent).
  std::vector<std::size_t> stride_a(scope.size(), 0), stride_b(scope.size(), 0);
  for (std::size_t i = 0; i < scope.size(); ++i) {
    for (std::size_t j = 0; j < scope_.size(); ++j) {
      if (scope_[j] == scope[i]) stride_a[i] = strides_[j];
    }
    for (std::size_t j = 0; j < other.scope_.size(); ++j) {
      if (other.scope_[j] == scope[i]) stride_b[i] = other.strides_[j];
    }
  }
  const auto n = std::accumulate(cards.begin(), cards.end(), std::size_t{1}, std::multiplies<>());
  std::vector<double> values(n);
  std::vector<std::size_t> counter(scope.size(), 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = values_[ia] * other.values_[ib];
    for (std::size_t d = scope.size(); d-- > 0;) {
      if (++counter[d] < cards[d]) {
        ia += stride_a[d];
        ib += stride_b[d];
        break;
      }
      ia -= stride_a[d] * (cards[d] - 1);
      ib -= stride_b[d] * (cards[d] - 1);
      counter[d] = 0;
    }
  }
  return Factor(std::move(scope), std::move(cards), std::move(values));
}

Factor Factor::sum_out(std::size_t variable) const {
  const auto pos = position(variable);
  std::vector<std::size_t> scope = scope_, cards = cards_;
  scope.erase(scope.begin() + static_cast<std::ptrdiff_t>(pos));
  cards.erase(cards.begin() + static_cast<std::ptrdiff_t>(pos));
  const std::size_t inner = strides_[pos];
  const std::size_t card = cards_[pos];
  const std::size_t outer = values_.size() / (inner * card);
  std::vector<double> values(outer * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t s = 0; s < card; ++s) {
      const double* src = values_.data() + (o * card + s) * inner;
      double* dst = values.data() + o * inner;
      for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
    }
  }
  return Factor(std::move(scope), std::move(cards), std::move(values));
}

Factor Factor::restrict(std::size_t variable, std::size_t state) const {
  const auto pos = position(variable);
  std::vector<std::size_t> scope = scope_, cards = cards_;
  scope.erase(scope.begin() + static_cast<std::ptrdiff_t>(pos));
  cards.erase(cards.begin() + static_cast<std::ptrdiff_t>(pos));
  const std::size_t inner = strides_[pos];
  const std::size_t card = cards_[pos];
  const std::size_t outer = values_.size() / (inner * card);
  std::vector<double> values;
  values.reserve(outer * inner);
  for (std::size_t o = 0; o < outer; ++o) {
    const double* src = values_.data() + (o * card + state) * inner;
    values.insert(values.end(), src, src + inner);
  }
  return Factor(std::move(scope), std::move(cards), std::move(values));
}

double Factor::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

}  // namespace unsaid
