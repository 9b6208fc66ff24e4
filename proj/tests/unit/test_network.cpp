#include <doctest.h>

#include "oracles.hpp"
#include "unsaid/errors.hpp"
#include "unsaid/network.hpp"

using namespace unsaid;

namespace {

const std::vector<std::string> kPA{"present", "absent"};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an unsaid::Error");
  return ErrorCode::IoError;
}

std::string subject_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.subject();
  }
  return {};
}

}  // namespace

TEST_CASE("net-a builds with the diagnostic structure") {
  const auto net = testing::net_a();
  CHECK(net.size() == 4);
  CHECK(net.parents(net.index_of("R")) == std::vector<std::size_t>{net.index_of("PI")});
  CHECK(net.parents(net.index_of("H")) == std::vector<std::size_t>{net.index_of("M")});
  CHECK(net.parents(net.index_of("PI")).empty());
  CHECK(net.children(net.index_of("M")) == std::vector<std::size_t>{net.index_of("H")});
  CHECK(net.ids_of_kind(VariableKind::Disorder) == std::vector<std::string>{"PI", "M"});
}

TEST_CASE("rows that do not sum to one are rejected") {
  auto build = [] {
    return Network::build({{"A", kPA, VariableKind::Other}}, {{"A", {}, {0.5, 0.4}}});
  };
  CHECK(code_of(build) == ErrorCode::MalformedTable);
  CHECK(subject_of(build) == "A");
}

TEST_CASE("entries outside [0,1] and wrong counts are rejected") {
  CHECK(code_of([] {
          return Network::build({{"A", kPA, VariableKind::Other}}, {{"A", {}, {1.5, -0.5}}});
        }) == ErrorCode::MalformedTable);
  CHECK(code_of([] {
          return Network::build({{"A", kPA, VariableKind::Other}}, {{"A", {}, {1.0}}});
        }) == ErrorCode::MalformedTable);
}

TEST_CASE("two-node cycle is rejected") {
  auto build = [] {
    return Network::build({{"A", kPA, VariableKind::Other}, {"B", kPA, VariableKind::Other}},
                          {{"A", {"B"}, {0.5, 0.5, 0.5, 0.5}}, {"B", {"A"}, {0.5, 0.5, 0.5, 0.5}}});
  };
  CHECK(code_of(build) == ErrorCode::CyclicGraph);
  CHECK(subject_of(build) == "A");
}

TEST_CASE("missing tables and dangling parents name the variable") {
  auto missing = [] {
    return Network::build({{"A", kPA, VariableKind::Other}, {"B", kPA, VariableKind::Other}},
                          {{"A", {}, {0.5, 0.5}}});
  };
  CHECK(code_of(missing) == ErrorCode::MissingTable);
  CHECK(subject_of(missing) == "B");

  auto dangling = [] {
    return Network::build({{"A", kPA, VariableKind::Other}}, {{"A", {"Z"}, {0.5, 0.5, 0.5, 0.5}}});
  };
  CHECK(code_of(dangling) == ErrorCode::MalformedTable);
  CHECK(subject_of(dangling) == "A");
}

TEST_CASE("variables need unique ids and at least two unique states") {
  CHECK(code_of([] {
          return Network::build({{"A", {"x"}, VariableKind::Other}}, {{"A", {}, {1.0}}});
        }) == ErrorCode::MalformedTable);
  CHECK(code_of([] {
          return Network::build({{"A", {"x", "x"}, VariableKind::Other}}, {{"A", {}, {0.5, 0.5}}});
        }) == ErrorCode::MalformedTable);
  CHECK(code_of([] {
          return Network::build({{"A", kPA, VariableKind::Other}, {"A", kPA, VariableKind::Other}},
                                {{"A", {}, {0.5, 0.5}}});
        }) == ErrorCode::MalformedTable);
}

TEST_CASE("extended replaces tables and appends variables") {
  const auto net = testing::net_a();
  const auto bigger = net.extended({{"Z", kPA, VariableKind::Other}},
                                   {{"Z", {"H"}, {0.3, 0.7, 0.6, 0.4}}, {"M", {}, {0.5, 0.5}}});
  CHECK(bigger.size() == 5);
  CHECK(bigger.table("M").entries == std::vector<double>{0.5, 0.5});
  CHECK(bigger.table("R").entries == net.table("R").entries);
  CHECK(bigger.topological_order().back() == bigger.index_of("Z"));
}

TEST_CASE("evidence validation") {
  const auto net = testing::net_a();
  Evidence e;
  e.observe("R", "present");
  CHECK_NOTHROW(e.validate(net));

  CHECK(code_of([&] { Evidence x; x.observe("Q", "present").validate(net); }) ==
        ErrorCode::UnknownVariable);
  CHECK(code_of([&] { Evidence x; x.observe("R", "bogus").validate(net); }) ==
        ErrorCode::InvalidEvidence);
  CHECK(code_of([&] { Evidence x; x.observe_likelihood("H", {0.0, 0.0}).validate(net); }) ==
        ErrorCode::InvalidEvidence);
  CHECK(code_of([&] { Evidence x; x.observe_likelihood("H", {1.0}).validate(net); }) ==
        ErrorCode::InvalidEvidence);
  CHECK(code_of([&] {
          Evidence x;
          x.observe("H", "present");
          x.observe_likelihood("H", {1.0, 1.0});
        }) == ErrorCode::InvalidEvidence);
}
