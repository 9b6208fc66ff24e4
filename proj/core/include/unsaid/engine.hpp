#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "unsaid/kb.hpp"
#include "unsaid/network.hpp"
#include "unsaid/report.hpp"

namespace unsaid {

enum class Phase { AwaitingOpenProbe, Refining };
enum class FindingSource { OpenProbe, ClosedProbe };

std::string_view to_string(Phase phase);
std::string_view to_string(FindingSource source);

struct Finding {
  std::string variable;
  std::string state;
  FindingSource source;
};

struct QuestionScore {
  std::string symptom;
  double score = 0.0;  // expected reduction of summed disorder entropy, in bits
  std::size_t rank = 0;
};

using Differential = std::vector<Posterior>;

/// P(present) for a disorder posterior: one minus the mass on "absent" when
/// that state exists, otherwise the mass on the first state.
double present_probability(const Posterior& posterior);

/// Shannon entropy in bits.
double entropy_bits(const std::vector<double>& distribution);

struct SessionParams {
  Posterior reportability;
  std::optional<Posterior> bias;  // absent in severity mode
};

/// One hypothetico-deductive interview: a single open probe followed by any
/// number of closed-probe answers. State is the evidence log; the cached
/// differential is recomputed after every mutation. Const members are safe
/// to call concurrently; mutations need external serialization.
class Session {
 public:
  /// Throws UnsupportedMode when the KB cannot run `mode`.
  Session(std::shared_ptr<const KnowledgeBase> kb, Mode mode, std::string id = {});

  const std::string& id() const noexcept { return id_; }
  Mode mode() const noexcept { return mode_; }
  Phase phase() const noexcept { return phase_; }
  const KnowledgeBase& kb() const noexcept { return *kb_; }
  std::shared_ptr<const KnowledgeBase> kb_ptr() const noexcept { return kb_; }
  /// The KB network augmented for this session's mode.
  const Network& model() const noexcept { return model_; }
  const std::vector<Finding>& log() const noexcept { return log_; }
  const std::optional<OpenProbeResponse>& open_response() const noexcept { return open_response_; }
  std::vector<std::pair<std::string, std::string>> closed_answers() const;

  Evidence evidence() const;

  /// Applies the open probe (report nodes instantiated once) and moves to
  /// the refining phase. An empty question id selects the KB's first open
  /// probe. Throws WrongPhase, UnknownSymptom, InvalidEvidence,
  /// ImpossibleEvidence.
  const Differential& submit_open_probe(const OpenProbeResponse& response);
  /// Throws WrongPhase, UnknownSymptom, AlreadyObserved, InvalidEvidence,
  /// ImpossibleEvidence.
  const Differential& submit_closed_probe(const std::string& symptom, const std::string& state);

  /// Disorder posteriors sorted by P(present), descending.
  const Differential& differential() const noexcept { return differential_; }
  Differential differential_for(const Evidence& evidence) const;

  /// Top-k unobserved symptoms by myopic expected entropy reduction of the
  /// disorder marginals. Throws WrongPhase.
  std::vector<QuestionScore> next_questions(std::size_t k) const;
  /// Scores every unobserved symptom (unsorted by rank, sorted by score).
  std::vector<QuestionScore> score_questions() const;

  /// Throws UnsupportedMode in fixed-params mode.
  SessionParams params() const;

  std::vector<std::string> observable_symptoms() const;
  bool observed(const std::string& variable) const;

 private:
  void refresh();

  std::shared_ptr<const KnowledgeBase> kb_;
  Mode mode_;
  std::string id_;
  Network model_;
  Phase phase_ = Phase::AwaitingOpenProbe;
  std::vector<Finding> log_;
  std::optional<OpenProbeResponse> open_response_;
  Differential differential_;
};

Session start_session(std::shared_ptr<const KnowledgeBase> kb, Mode mode, std::string id = {});

/// Network for `mode` built from the KB (report nodes for every open probe,
/// plus parameter nodes in learn-global and severity modes).
Network build_model(const KnowledgeBase& kb, Mode mode);

}  // namespace unsaid
