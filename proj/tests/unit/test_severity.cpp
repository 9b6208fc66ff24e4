#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "unsaid/errors.hpp"
#include "unsaid/inference.hpp"
#include "unsaid/learning.hpp"
#include "unsaid/severity.hpp"

using namespace unsaid;
using doctest::Approx;

namespace {

// Closed forms for the quadratic link with a uniform prior on P_Minor:
//   int p(1-h) = 1/12, int p = 1/2, int h(1-p) = 1/4, int h = 2/3.
constexpr double kMajorGivenMinor = 0.01 / 12.0 / (0.01 / 12.0 + 0.99 / 2.0);
constexpr double kMinorGivenMajor = 0.01 / 4.0 / (0.01 / 4.0 + 0.99 * 2.0 / 3.0);

struct DemoResult {
  double major_given_minor;
  double minor_given_major;
};

DemoResult run_demo(std::size_t points, const SeverityLink& link,
                    const GridAxis* grid_override = nullptr) {
  const auto fx = make_severity_fixture();
  const GridAxis grid = grid_override ? *grid_override : GridAxis::uniform_unit_interval(points);
  const auto net = augment_with_severity(fx.network, fx.params, grid, link);
  const auto minor = severity_posterior_demo(net, fx.params, {"init", {{"Rash", "present"}}}, fx);
  const auto major =
      severity_posterior_demo(net, fx.params, {"init", {{"ChestPain", "present"}}}, fx);
  return {minor.second.probability("present"), major.first.probability("present")};
}

SeverityLink sqrt_link() { return {"sqrt", [](double x) { return std::sqrt(x); }}; }
SeverityLink cubic_link() {
  return {"cubic", [](double x) { return 1.0 - (1.0 - x) * (1.0 - x) * (1.0 - x); }};
}

}  // namespace

TEST_CASE("link validation") {
  CHECK(validate_link(SeverityLink::quadratic()).all_passed());
  CHECK(validate_link(sqrt_link()).all_passed());
  CHECK(validate_link(cubic_link()).all_passed());

  const auto identity = validate_link(SeverityLink::identity());
  CHECK(!identity.increasing.passed);
  CHECK(identity.probability.passed);

  const auto square = validate_link(SeverityLink::square());
  CHECK(!square.increasing.passed);
  REQUIRE(square.increasing.first_violation.has_value());
  CHECK(*square.increasing.first_violation > 0.0);

  const SeverityLink wild{"wild", [](double x) { return 1.5 * x; }};
  CHECK(!validate_link(wild).probability.passed);
  const SeverityLink bumpy{"bumpy", [](double x) { return x + 0.2 * x * x * (1.0 - x); }};
  CHECK(!validate_link(bumpy).decreasing_odds.passed);

  CHECK(SeverityLink::by_name("quadratic")(0.5) == 0.75);
  CHECK_THROWS_AS(SeverityLink::by_name("cubic"), Error);
}

TEST_CASE("severity augmentation of the two-disease fixture") {
  const auto fx = make_severity_fixture();
  const auto net = augment_with_severity(fx.network, fx.params, GridAxis::uniform_unit_interval(4),
                                         SeverityLink::quadratic());
  CHECK(net.size() == 7);
  CHECK(net.table("Report_init(ChestPain)").parents ==
        std::vector<std::string>{"P_Minor", "ChestPain"});
  CHECK(net.variable("P_Minor").states.front() == grid_label(0.125));

  auto bad = fx.params;
  bad[0].severity = SeverityClass::None;
  try {
    augment_with_severity(fx.network, bad, GridAxis::uniform_unit_interval(4),
                          SeverityLink::quadratic());
    FAIL("expected MissingSeverityClass");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingSeverityClass);
    CHECK(e.subject() == "Rash");
  }
  CHECK_THROWS_AS(augment_with_severity(net, fx.params, GridAxis::uniform_unit_interval(4),
                                        SeverityLink::quadratic()),
                  Error);
}

TEST_CASE("closed-form reference values") {
  const auto ref = severity_reference(SeverityLink::quadratic());
  CHECK(ref.major_given_minor_report == Approx(kMajorGivenMinor).epsilon(1e-13));
  CHECK(ref.minor_given_major_report == Approx(kMinorGivenMajor).epsilon(1e-13));
  CHECK(kMajorGivenMinor == Approx(0.0016806722689075631).epsilon(1e-14));
  CHECK(kMinorGivenMajor == Approx(0.0037735849056603774).epsilon(1e-14));
}

TEST_CASE("severity demo at 1000 grid points") {
  const auto r = run_demo(1000, SeverityLink::quadratic());
  CHECK(std::abs(r.major_given_minor - kMajorGivenMinor) < 1e-5);
  CHECK(std::abs(r.minor_given_major - kMinorGivenMajor) < 1e-5);
  CHECK(std::abs(r.major_given_minor - 0.00168) < 1e-4);
  CHECK(std::abs(r.minor_given_major - 0.00377) < 1e-4);
  CHECK(r.major_given_minor < r.minor_given_major);
}

TEST_CASE("grid refinement converges toward the closed form") {
  double prev_major = 1.0, prev_minor = 1.0;
  for (std::size_t n : {3, 10, 100, 1000}) {
    const auto r = run_demo(n, SeverityLink::quadratic());
    const double em = std::abs(r.major_given_minor - kMajorGivenMinor);
    const double en = std::abs(r.minor_given_major - kMinorGivenMajor);
    CHECK(em < prev_major);
    CHECK(en < prev_minor);
    prev_major = em;
    prev_minor = en;
  }
}

TEST_CASE("property: severity asymmetry for grids of three or more points and valid links") {
  std::mt19937_64 rng(17);
  for (const auto& link : {SeverityLink::quadratic(), sqrt_link(), cubic_link()}) {
    REQUIRE(validate_link(link).all_passed());
    for (std::size_t n : {3, 4, 7, 25, 200}) {
      const auto r = run_demo(n, link);
      CHECK(r.major_given_minor < r.minor_given_major);
    }
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 3 + rng() % 10;
      std::vector<double> values;
      for (std::size_t i = 0; i < n; ++i) values.push_back(0.01 + 0.98 * testing::uniform01(rng));
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      GridAxis grid{values, {}};
      double total = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        grid.priors.push_back(0.05 + testing::uniform01(rng));
        total += grid.priors.back();
      }
      for (auto& w : grid.priors) w /= total;
      const auto r = run_demo(0, link, &grid);
      CHECK(r.major_given_minor < r.minor_given_major);
    }
  }
}

TEST_CASE("identity link removes the asymmetry") {
  const auto r = run_demo(50, SeverityLink::identity());
  CHECK(r.major_given_minor == Approx(r.minor_given_major).epsilon(1e-12));

  const auto fx = make_severity_fixture();
  const auto net = augment_with_severity(fx.network, fx.params, GridAxis::uniform_unit_interval(50),
                                         SeverityLink::identity());
  const auto [minor, major] = severity_posterior_demo(net, fx.params, {"init", {}}, fx);
  CHECK(minor.probability("present") == Approx(major.probability("present")).epsilon(1e-12));

  const auto qnet = augment_with_severity(fx.network, fx.params,
                                          GridAxis::uniform_unit_interval(50),
                                          SeverityLink::quadratic());
  const auto [qminor, qmajor] = severity_posterior_demo(qnet, fx.params, {"init", {}}, fx);
  CHECK(qmajor.probability("present") < qminor.probability("present"));
}

TEST_CASE("single grid point with identity link equals fixed parameters") {
  auto fx = make_severity_fixture();
  for (auto& p : fx.params) {
    p.bias = 5.0;
    p.reportability = 0.7;
  }
  const auto sev = augment_with_severity(fx.network, fx.params, GridAxis::uniform({0.7}),
                                         SeverityLink::identity());
  const auto fixed = augment_with_reports(fx.network, fx.params, "init");
  for (const auto& resp : {OpenProbeResponse{"init", {}}, OpenProbeResponse{"init", {{"Rash", "present"}}}}) {
    const auto e = open_probe_evidence(resp, fx.params);
    for (const auto& id : {"RashDisease", "HeartAttack"}) {
      CHECK(std::abs(posterior(sev, id, e).probabilities[0] -
                     posterior(fixed, id, e).probabilities[0]) < 1e-12);
    }
  }
}

TEST_CASE("all-minor severity equals learn-global with one bias point") {
  auto fx = make_severity_fixture(0.2);
  for (auto& p : fx.params) {
    p.severity = SeverityClass::Minor;
    p.bias = 5.0;
  }
  const auto grid = GridAxis::uniform_unit_interval(9);
  const auto sev = augment_with_severity(fx.network, fx.params, grid, SeverityLink::quadratic());
  const auto learn =
      augment_with_global_params(fx.network, fx.params, ParamGrid{grid, GridAxis::uniform({5.0})});
  for (const auto& resp : {OpenProbeResponse{"init", {}}, OpenProbeResponse{"init", {{"Rash", "present"}}},
                           OpenProbeResponse{"init", {{"ChestPain", "present"}}}}) {
    const auto e = open_probe_evidence(resp, fx.params);
    for (const auto& id : {"RashDisease", "HeartAttack"}) {
      CHECK(std::abs(posterior(sev, id, e).probabilities[0] -
                     posterior(learn, id, e).probabilities[0]) < 1e-12);
      CHECK(std::abs(posterior(sev, id, e).probabilities[0] -
                     testing::brute_force_posterior(sev, id, e)[0]) < 1e-12);
    }
  }
}
