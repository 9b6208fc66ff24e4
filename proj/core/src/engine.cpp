#include "unsaid/engine.hpp"

#include <algorithm>
#include <cmath>

#include "unsaid/errors.hpp"
#include "unsaid/inference.hpp"
#include "unsaid/learning.hpp"
#include "unsaid/severity.hpp"

namespace unsaid {

std::string_view to_string(Phase phase) {
  return phase == Phase::AwaitingOpenProbe ? "awaiting-open-probe" : "refining";
}

std::string_view to_string(FindingSource source) {
  return source == FindingSource::OpenProbe ? "open-probe" : "closed-probe";
}

double present_probability(const Posterior& posterior) {
  const auto it = std::find(posterior.states.begin(), posterior.states.end(), "absent");
  if (it == posterior.states.end()) return posterior.probabilities.at(0);
  return 1.0 - posterior.probabilities[static_cast<std::size_t>(it - posterior.states.begin())];
}

double entropy_bits(const std::vector<double>& distribution) {
  double h = 0.0;
  for (double p : distribution) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

Network build_model(const KnowledgeBase& kb, Mode mode) {
  if (!kb.config.supports(mode)) {
    throw Error(ErrorCode::UnsupportedMode,
                "knowledge base does not support mode '" + std::string(to_string(mode)) + "'",
                std::string(to_string(mode)));
  }
  switch (mode) {
    case Mode::FixedParams: {
      Network net = kb.network;
      for (const auto& probe : kb.probes) {
        if (probe.kind != ProbeKind::Open) continue;
        net = augment_with_reports(net, kb.params_for(probe.id), probe.id);
      }
      return net;
    }
    case Mode::LearnGlobal:
      return augment_with_global_params(kb.network, kb.reports,
                                        kb.config.grid.value_or(ParamGrid::defaults()),
                                        kb.config.link);
    case Mode::Severity: {
      for (const auto& r : kb.reports) {
        if (r.severity == SeverityClass::None) {
          throw Error(ErrorCode::UnsupportedMode,
                      "severity mode needs a severity class on every report ('" + r.symptom_id +
                          "' has none)",
                      r.symptom_id);
        }
      }
      const SeverityConfig sev = kb.config.severity.value_or(SeverityConfig{});
      return augment_with_severity(kb.network, kb.reports,
                                   GridAxis::uniform_unit_interval(sev.grid_points),
                                   SeverityLink::by_name(sev.link));
    }
  }
  throw Error(ErrorCode::UnsupportedMode, "unknown mode");
}

Session::Session(std::shared_ptr<const KnowledgeBase> kb, Mode mode, std::string id)
    : kb_(std::move(kb)), mode_(mode), id_(std::move(id)) {
  model_ = build_model(*kb_, mode_);
  refresh();
}

Session start_session(std::shared_ptr<const KnowledgeBase> kb, Mode mode, std::string id) {
  return Session(std::move(kb), mode, std::move(id));
}

std::vector<std::pair<std::string, std::string>> Session::closed_answers() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : log_) {
    if (f.source == FindingSource::ClosedProbe) out.emplace_back(f.variable, f.state);
  }
  return out;
}

Evidence Session::evidence() const {
  Evidence e;
  for (const auto& f : log_) e.observe(f.variable, f.state);
  return e;
}

bool Session::observed(const std::string& variable) const {
  return std::any_of(log_.begin(), log_.end(),
                     [&](const Finding& f) { return f.variable == variable; });
}

std::vector<std::string> Session::observable_symptoms() const {
  std::vector<std::string> out;
  for (const auto& v : kb_->network.variables()) {
    if (v.kind == VariableKind::Symptom || v.kind == VariableKind::Other) out.push_back(v.id);
  }
  return out;
}

Differential Session::differential_for(const Evidence& evidence) const {
  Differential out = posteriors(model_, kb_->disorders, evidence);
  std::stable_sort(out.begin(), out.end(), [](const Posterior& a, const Posterior& b) {
    const double pa = present_probability(a), pb = present_probability(b);
    if (pa != pb) return pa > pb;
    return a.variable < b.variable;
  });
  return out;
}

void Session::refresh() { differential_ = differential_for(evidence()); }

const Differential& Session::submit_open_probe(const OpenProbeResponse& response) {
  if (phase_ != Phase::AwaitingOpenProbe) {
    throw Error(ErrorCode::WrongPhase, "the open probe has already been answered", "phase");
  }
  OpenProbeResponse resolved = response;
  if (resolved.question_id.empty()) {
    const auto* probe = kb_->open_probe();
    if (!probe) throw Error(ErrorCode::UnknownSymptom, "knowledge base has no open probe", "question");
    resolved.question_id = probe->id;
  }
  const auto* probe = kb_->find_probe(resolved.question_id);
  if (!probe || probe->kind != ProbeKind::Open) {
    throw Error(ErrorCode::InvalidEvidence, "unknown open probe '" + resolved.question_id + "'",
                "question");
  }
  const auto params = kb_->params_for(resolved.question_id);
  const Evidence evidence = open_probe_evidence(resolved, params);
  for (const auto& [symptom, state] : resolved.reported) {
    (void)kb_->network.variable(symptom).state_index(state);
  }

  auto saved = log_;
  for (const auto& [var, state] : evidence.hard) {
    log_.push_back(Finding{var, state, FindingSource::OpenProbe});
  }
  try {
    refresh();
  } catch (...) {
    log_ = std::move(saved);
    throw;
  }
  open_response_ = std::move(resolved);
  phase_ = Phase::Refining;
  return differential_;
}

const Differential& Session::submit_closed_probe(const std::string& symptom,
                                                 const std::string& state) {
  if (phase_ != Phase::Refining) {
    throw Error(ErrorCode::WrongPhase, "closed probes follow the open probe", "phase");
  }
  const auto idx = kb_->network.find(symptom);
  if (!idx) throw Error(ErrorCode::UnknownSymptom, "unknown symptom '" + symptom + "'", symptom);
  const auto kind = kb_->network.variable(*idx).kind;
  if (kind != VariableKind::Symptom && kind != VariableKind::Other) {
    throw Error(ErrorCode::UnknownSymptom, "'" + symptom + "' is not an observable finding",
                symptom);
  }
  if (observed(symptom)) {
    throw Error(ErrorCode::AlreadyObserved, "'" + symptom + "' is already observed", symptom);
  }
  (void)kb_->network.variable(*idx).state_index(state);

  log_.push_back(Finding{symptom, state, FindingSource::ClosedProbe});
  try {
    refresh();
  } catch (...) {
    log_.pop_back();
    throw;
  }
  return differential_;
}

std::vector<QuestionScore> Session::score_questions() const {
  const Evidence base = evidence();
  double prior_entropy = 0.0;
  for (const auto& p : posteriors(model_, kb_->disorders, base)) {
    prior_entropy += entropy_bits(p.probabilities);
  }

  std::vector<QuestionScore> scores;
  for (const auto& s : observable_symptoms()) {
    if (observed(s)) continue;
    QuestionScore q{s, 0.0, 0};
    if (!d_separated(model_, s, kb_->disorders, base)) {
      const Posterior ps = posterior(model_, s, base);
      double expected = 0.0;
      for (std::size_t i = 0; i < ps.states.size(); ++i) {
        if (!(ps.probabilities[i] > 0.0)) continue;
        Evidence e = base;
        e.observe(s, ps.states[i]);
        double h = 0.0;
        for (const auto& p : posteriors(model_, kb_->disorders, e)) h += entropy_bits(p.probabilities);
        expected += ps.probabilities[i] * h;
      }
      q.score = std::max(0.0, prior_entropy - expected);
    }
    scores.push_back(std::move(q));
  }
  std::sort(scores.begin(), scores.end(), [](const QuestionScore& a, const QuestionScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.symptom < b.symptom;
  });
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i].rank = i + 1;
  return scores;
}

std::vector<QuestionScore> Session::next_questions(std::size_t k) const {
  if (phase_ != Phase::Refining) {
    throw Error(ErrorCode::WrongPhase, "questions are ranked after the open probe", "phase");
  }
  auto scores = score_questions();
  if (scores.size() > k) scores.resize(k);
  return scores;
}

SessionParams Session::params() const {
  const Evidence e = evidence();
  switch (mode_) {
    case Mode::LearnGlobal: {
      auto p = global_param_posterior(model_, e);
      return SessionParams{std::move(p.reportability), std::move(p.bias)};
    }
    case Mode::Severity:
      return SessionParams{posterior(model_, std::string(kMinorReportabilityNode), e), std::nullopt};
    case Mode::FixedParams:
      break;
  }
  throw Error(ErrorCode::UnsupportedMode, "fixed-params sessions have no parameter posteriors",
              "mode");
}

}  // namespace unsaid
