#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unsaid/learning.hpp"
#include "unsaid/network.hpp"
#include "unsaid/report.hpp"

namespace unsaid {

enum class Mode { FixedParams, LearnGlobal, Severity };

std::string_view to_string(Mode mode);
/// Throws UnsupportedMode for an unknown name.
Mode parse_mode(std::string_view text);

enum class ProbeKind { Open, Closed };

struct Probe {
  std::string id;
  ProbeKind kind = ProbeKind::Open;
  std::vector<std::string> symptoms;
};

struct SeverityConfig {
  std::string link = "quadratic";
  std::size_t grid_points = 100;
};

struct KbConfig {
  std::vector<Mode> modes{Mode::FixedParams};
  std::optional<ParamGrid> grid;
  LinkPolicy link;
  std::optional<SeverityConfig> severity;

  bool supports(Mode mode) const;
};

struct KnowledgeBase {
  Network network;
  std::vector<ReportParams> reports;
  std::vector<Probe> probes;
  std::vector<std::string> disorders;
  KbConfig config;

  /// Throws ValidationError naming the broken invariant.
  void validate() const;

  std::vector<ReportParams> params_for(std::string_view question_id) const;
  /// First open probe, or nullptr.
  const Probe* open_probe() const;
  const Probe* find_probe(std::string_view id) const;
  /// Symptoms whose only or shared parent is `disorder`, in declaration order.
  std::vector<std::string> classic_symptoms(std::string_view disorder) const;
};

/// Parses and validates KB JSON text. Throws ParseError (with line or
/// field) or ValidationError.
KnowledgeBase parse_kb(std::string_view text);
/// Canonical serialization: sorted keys, floats with 17 significant digits.
std::string to_canonical_json(const KnowledgeBase& kb);

/// Throws IoError, ParseError or ValidationError.
KnowledgeBase load_kb(const std::filesystem::path& path);
/// Throws IoError.
void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path);

struct SyntheticConfig {
  std::uint64_t seed = 42;
  std::size_t disorders = 5;
  std::size_t symptoms_per_disorder = 4;
  double overlap_fraction = 0.25;
  double reportability = 0.9;
  double bias = 5.0;
};

inline constexpr double kDominantPrior = 0.76;
inline constexpr double kSymptomStrength = 0.85;
inline constexpr double kSymptomLeak = 0.02;

/// Deterministic bipartite disorder -> symptom KB with one dominant disorder
/// (D0, prior 0.76), noisy-OR symptoms and shared symptoms according to
/// the overlap fraction. Every symptom is bound to open probe "init".
/// Throws InvalidConfig.
KnowledgeBase generate_synthetic_ctslike(const SyntheticConfig& config);

}  // namespace unsaid
