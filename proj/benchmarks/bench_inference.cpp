#include <benchmark/benchmark.h>

#include <memory>

#include "unsaid/engine.hpp"
#include "unsaid/inference.hpp"
#include "unsaid/kb.hpp"
#include "unsaid/learning.hpp"
#include "unsaid/report.hpp"
#include "unsaid/severity.hpp"

namespace {

using namespace unsaid;

std::shared_ptr<const KnowledgeBase> synthetic(std::size_t disorders) {
  SyntheticConfig cfg;
  cfg.disorders = disorders;
  return std::make_shared<const KnowledgeBase>(generate_synthetic_ctslike(cfg));
}

std::string first_classic(const KnowledgeBase& kb) {
  return kb.classic_symptoms(kb.disorders.front()).front();
}

void BM_OpenProbeDifferential(benchmark::State& state) {
  const auto kb = synthetic(static_cast<std::size_t>(state.range(0)));
  const auto classic = kb->classic_symptoms(kb->disorders.front());
  const auto params = kb->params_for("init");
  const Network model = build_model(*kb, Mode::FixedParams);
  const auto e = open_probe_evidence({"init", {{classic[0], "present"}, {classic[1], "present"}}}, params);
  for (auto _ : state) benchmark::DoNotOptimize(posteriors(model, kb->disorders, e));
}
BENCHMARK(BM_OpenProbeDifferential)->Arg(5)->Arg(10)->Arg(20);

void BM_LearnGlobalDifferential(benchmark::State& state) {
  const auto kb = synthetic(static_cast<std::size_t>(state.range(0)));
  const auto params = kb->params_for("init");
  const Network model = build_model(*kb, Mode::LearnGlobal);
  const auto e = open_probe_evidence({"init", {{first_classic(*kb), "present"}}}, params);
  for (auto _ : state) benchmark::DoNotOptimize(posteriors(model, kb->disorders, e));
}
BENCHMARK(BM_LearnGlobalDifferential)->Arg(5)->Arg(8);

void BM_NextQuestions(benchmark::State& state) {
  const auto kb = synthetic(static_cast<std::size_t>(state.range(0)));
  Session s(kb, Mode::FixedParams);
  s.submit_open_probe({"init", {{first_classic(*kb), "present"}}});
  for (auto _ : state) benchmark::DoNotOptimize(s.next_questions(5));
}
BENCHMARK(BM_NextQuestions)->Arg(5)->Arg(10);

void BM_SeverityDemo(benchmark::State& state) {
  const auto fx = make_severity_fixture();
  const auto grid = GridAxis::uniform_unit_interval(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const auto net = augment_with_severity(fx.network, fx.params, grid, SeverityLink::quadratic());
    benchmark::DoNotOptimize(
        severity_posterior_demo(net, fx.params, {"init", {{"Rash", "present"}}}, fx));
  }
}
BENCHMARK(BM_SeverityDemo)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
