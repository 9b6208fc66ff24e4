#include "unsaid/severity.hpp"

#include <cmath>

#include "unsaid/errors.hpp"
#include "unsaid/inference.hpp"

namespace unsaid {

namespace {

constexpr std::size_t kValidationIntervals = 10000;
constexpr double kOddsTolerance = 1e-12;

double simpson(const std::function<double(double)>& f, std::size_t intervals) {
  if (intervals % 2) ++intervals;
  const double step = 1.0 / static_cast<double>(intervals);
  double sum = f(0.0) + f(1.0);
  for (std::size_t i = 1; i < intervals; ++i) {
    sum += f(static_cast<double>(i) * step) * (i % 2 ? 4.0 : 2.0);
  }
  return sum * step / 3.0;
}

}  // namespace

SeverityLink SeverityLink::quadratic() {
  return {"quadratic", [](double x) { return 2.0 * x - x * x; }};
}

SeverityLink SeverityLink::identity() {
  return {"identity", [](double x) { return x; }};
}

SeverityLink SeverityLink::square() {
  return {"square", [](double x) { return x * x; }};
}

SeverityLink SeverityLink::by_name(std::string_view name) {
  if (name == "quadratic") return quadratic();
  throw Error(ErrorCode::InvalidConfig, "unknown severity link '" + std::string(name) + "'",
              "link");
}

LinkValidation validate_link(const SeverityLink& link) {
  LinkValidation out;
  auto fail = [](PropertyCheck& check, double x) {
    if (check.passed) {
      check.passed = false;
      check.first_violation = x;
    }
  };
  const auto n = static_cast<double>(kValidationIntervals);
  double prev_h = 0.0, prev_ratio = 0.0;
  for (std::size_t i = 0; i <= kValidationIntervals; ++i) {
    const double x = static_cast<double>(i) / n;
    const double hx = link(x);
    if (!(hx >= 0.0 && hx <= 1.0)) fail(out.probability, x);
    if (i == 0 || i == kValidationIntervals) continue;

    if (!(hx > x)) fail(out.increasing, x);
    const double ratio = hx / x;
    if (i > 1) {
      if (!(hx > prev_h)) fail(out.increasing, x);
      if (ratio > prev_ratio + kOddsTolerance) fail(out.decreasing_odds, x);
    }
    prev_h = hx;
    prev_ratio = ratio;
  }
  return out;
}

Network augment_with_severity(const Network& network, std::span<const ReportParams> params,
                              const GridAxis& minor_grid, const SeverityLink& link) {
  if (network.contains(kMinorReportabilityNode)) {
    throw Error(ErrorCode::DuplicateParameterNode,
                "network already has parameter node '" + std::string(kMinorReportabilityNode) + "'",
                std::string(kMinorReportabilityNode));
  }
  for (const auto& rp : params) {
    if (rp.severity == SeverityClass::None) {
      throw Error(ErrorCode::MissingSeverityClass,
                  "'" + rp.symptom_id + "' has no severity class", rp.symptom_id);
    }
  }
  ParamGrid{minor_grid, GridAxis::uniform({1.0})}.validate();

  Variable node{std::string(kMinorReportabilityNode), {}, VariableKind::Parameter};
  for (double x : minor_grid.values) node.states.push_back(grid_label(x));
  std::vector<Variable> added{std::move(node)};
  std::vector<ConditionalTable> tables{grid_prior_table(kMinorReportabilityNode, minor_grid)};

  for (const auto& rp : params) {
    const auto& symptom = network.variable(rp.symptom_id);
    const auto absent = symptom.find_state(rp.absent_state);
    if (!absent) {
      throw Error(ErrorCode::InvalidParams,
                  "'" + symptom.id + "' has no absent-like state '" + rp.absent_state + "'",
                  symptom.id);
    }
    const auto id = report_node_id(rp.question_id, rp.symptom_id);
    ConditionalTable t{id, {std::string(kMinorReportabilityNode), symptom.id}, {}};
    for (double g : minor_grid.values) {
      const double reportability = rp.severity == SeverityClass::Major ? link(g) : g;
      const auto [when_present, when_absent] = report_probabilities(reportability, rp.bias);
      for (std::size_t s = 0; s < symptom.cardinality(); ++s) {
        const double r = (s == *absent) ? when_absent : when_present;
        t.entries.push_back(r);
        t.entries.push_back(1.0 - r);
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

SeverityFixture make_severity_fixture(double disorder_prior) {
  SeverityFixture fx;
  const std::vector<std::string> binary{"present", "absent"};
  std::vector<Variable> vars{
      {fx.minor_disorder, binary, VariableKind::Disorder},
      {fx.major_disorder, binary, VariableKind::Disorder},
      {fx.minor_symptom, binary, VariableKind::Symptom},
      {fx.major_symptom, binary, VariableKind::Symptom},
  };
  const std::vector<double> deterministic{1.0, 0.0, 0.0, 1.0};
  std::vector<ConditionalTable> tables{
      {fx.minor_disorder, {}, {disorder_prior, 1.0 - disorder_prior}},
      {fx.major_disorder, {}, {disorder_prior, 1.0 - disorder_prior}},
      {fx.minor_symptom, {fx.minor_disorder}, deterministic},
      {fx.major_symptom, {fx.major_disorder}, deterministic},
  };
  fx.network = Network::build(std::move(vars), std::move(tables));
  fx.params = {
      ReportParams{fx.minor_symptom, "init", 0.5, kInfiniteBias, SeverityClass::Minor, "absent"},
      ReportParams{fx.major_symptom, "init", 0.5, kInfiniteBias, SeverityClass::Major, "absent"},
  };
  return fx;
}

std::pair<Posterior, Posterior> severity_posterior_demo(const Network& network,
                                                        std::span<const ReportParams> params,
                                                        const OpenProbeResponse& response,
                                                        const SeverityFixture& fixture) {
  const Evidence evidence = open_probe_evidence(response, params);
  return {posterior(network, fixture.minor_disorder, evidence),
          posterior(network, fixture.major_disorder, evidence)};
}

SeverityReference severity_reference(const SeverityLink& link, double prior) {
  constexpr std::size_t intervals = 20000;
  const auto& h = link.h;
  // Minor symptom reported, major unreported.
  const double a = simpson([&](double p) { return p * (1.0 - h(p)); }, intervals);
  const double b = simpson([](double p) { return p; }, intervals);
  // Major symptom reported, minor unreported.
  const double c = simpson([&](double p) { return h(p) * (1.0 - p); }, intervals);
  const double d = simpson([&](double p) { return h(p); }, intervals);
  return {prior * a / (prior * a + (1.0 - prior) * b), prior * c / (prior * c + (1.0 - prior) * d)};
}

}  // namespace unsaid
