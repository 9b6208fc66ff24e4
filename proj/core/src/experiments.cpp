#include "unsaid/experiments.hpp"

#include "unsaid/engine.hpp"
#include "unsaid/errors.hpp"
#include "unsaid/inference.hpp"
#include "unsaid/learning.hpp"

namespace unsaid {

namespace {

const Probe& first_open_probe(const KnowledgeBase& kb) {
  const auto* probe = kb.open_probe();
  if (!probe) throw Error(ErrorCode::UnknownSymptom, "knowledge base has no open probe", "probes");
  return *probe;
}

DisorderTable table_of(const Network& net, const KnowledgeBase& kb, const Evidence& e) {
  DisorderTable out;
  for (const auto& p : posteriors(net, kb.disorders, e)) out[p.variable] = present_probability(p);
  return out;
}

}  // namespace

std::vector<DisorderTable> sweep_bias(const KnowledgeBase& kb,
                                      const std::map<std::string, std::string>& reported,
                                      std::span<const double> biases, double reportability) {
  if (biases.empty()) throw Error(ErrorCode::InvalidConfig, "bias list is empty", "bias");
  const Probe& probe = first_open_probe(kb);
  std::vector<DisorderTable> rows;
  for (double b : biases) {
    auto params = kb.params_for(probe.id);
    for (auto& p : params) {
      p.reportability = reportability;
      p.bias = b;
    }
    const Network net = augment_with_reports(kb.network, params, probe.id);
    const Evidence e = open_probe_evidence({probe.id, reported}, params);
    e.validate(net);
    rows.push_back(table_of(net, kb, e));
  }
  return rows;
}

DisorderTable closed_probe_only(const KnowledgeBase& kb,
                                const std::map<std::string, std::string>& findings) {
  Evidence e;
  for (const auto& [v, s] : findings) e.observe(v, s);
  e.validate(kb.network);
  return table_of(kb.network, kb, e);
}

std::vector<LearnRow> learn_demo(const KnowledgeBase& kb,
                                 std::span<const std::map<std::string, std::string>> scenarios) {
  const Network model = build_model(kb, Mode::LearnGlobal);
  const Probe& probe = first_open_probe(kb);
  const auto params = kb.params_for(probe.id);
  std::vector<LearnRow> rows;
  for (const auto& reported : scenarios) {
    const Evidence e = open_probe_evidence({probe.id, reported}, params);
    e.validate(model);
    const auto [p, b] = expected_params(global_param_posterior(model, e));
    rows.push_back({p, b});
  }
  return rows;
}

}  // namespace unsaid
