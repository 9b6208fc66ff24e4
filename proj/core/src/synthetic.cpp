#include <algorithm>
#include <cmath>
#include <random>

#include "unsaid/errors.hpp"
#include "unsaid/kb.hpp"

namespace unsaid {

namespace {

// std::uniform_real_distribution is implementation-defined; this mapping
// keeps generated files identical across standard libraries.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t index_draw(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

std::string padded(char prefix, std::size_t i, std::size_t width) {
  auto digits = std::to_string(i);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return std::string(1, prefix) + digits;
}

}  // namespace

KnowledgeBase generate_synthetic_ctslike(const SyntheticConfig& config) {
  if (config.disorders < 2) {
    throw Error(ErrorCode::InvalidConfig, "need at least 2 disorders", "disorders");
  }
  if (config.symptoms_per_disorder < 1) {
    throw Error(ErrorCode::InvalidConfig, "need at least 1 symptom per disorder",
                "symptoms_per_disorder");
  }
  if (!(config.overlap_fraction >= 0.0 && config.overlap_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "overlap fraction must lie in [0,1)", "overlap_fraction");
  }
  try {
    (void)report_probabilities(config.reportability, config.bias);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what(), e.subject());
  }

  std::mt19937_64 rng(config.seed);
  const std::vector<std::string> binary{"present", "absent"};
  const std::size_t per = config.symptoms_per_disorder;
  const auto shared_per =
      static_cast<std::size_t>(std::lround(config.overlap_fraction * static_cast<double>(per)));

  std::vector<double> priors(config.disorders);
  priors[0] = kDominantPrior;
  for (std::size_t d = 1; d < config.disorders; ++d) priors[d] = 0.02 + 0.08 * unit_draw(rng);

  // parents_of[s] = disorder indices causing symptom s, ascending.
  std::vector<std::vector<std::size_t>> parents_of;
  for (std::size_t d = 0; d < config.disorders; ++d) {
    std::size_t shared = 0;
    if (d > 0) {
      std::vector<std::size_t> pool(parents_of.size());
      for (std::size_t s = 0; s < pool.size(); ++s) pool[s] = s;
      const auto want = std::min(shared_per, pool.size());
      for (std::size_t k = 0; k < want; ++k) {
        const auto pick = index_draw(rng, pool.size());
        parents_of[pool[pick]].push_back(d);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        ++shared;
      }
    }
    for (std::size_t k = shared; k < per; ++k) parents_of.push_back({d});
  }

  const std::size_t dwidth = std::to_string(config.disorders - 1).size();
  const std::size_t swidth = std::max<std::size_t>(2, std::to_string(parents_of.size() - 1).size());

  std::vector<Variable> vars;
  std::vector<ConditionalTable> tables;
  KnowledgeBase kb;
  for (std::size_t d = 0; d < config.disorders; ++d) {
    const auto id = padded('D', d, dwidth);
    vars.push_back({id, binary, VariableKind::Disorder});
    tables.push_back({id, {}, {priors[d], 1.0 - priors[d]}});
    kb.disorders.push_back(id);
  }

  Probe probe{"init", ProbeKind::Open, {}};
  for (std::size_t s = 0; s < parents_of.size(); ++s) {
    const auto id = padded('S', s, swidth);
    vars.push_back({id, binary, VariableKind::Symptom});
    ConditionalTable t{id, {}, {}};
    for (auto d : parents_of[s]) t.parents.push_back(kb.disorders[d]);
    // Noisy-OR: state 0 of each parent is "present".
    const std::size_t rows = std::size_t{1} << parents_of[s].size();
    for (std::size_t row = 0; row < rows; ++row) {
      double p_absent = 1.0 - kSymptomLeak;
      for (std::size_t j = 0; j < parents_of[s].size(); ++j) {
        const bool parent_present = ((row >> (parents_of[s].size() - 1 - j)) & 1U) == 0;
        if (parent_present) p_absent *= 1.0 - kSymptomStrength;
      }
      t.entries.push_back(1.0 - p_absent);
      t.entries.push_back(p_absent);
    }
    tables.push_back(std::move(t));
    probe.symptoms.push_back(id);
    kb.reports.push_back(ReportParams{id, probe.id, config.reportability, config.bias,
                                      SeverityClass::None, "absent"});
  }

  kb.network = Network::build(std::move(vars), std::move(tables));
  kb.probes.push_back(std::move(probe));
  kb.config.modes = {Mode::FixedParams, Mode::LearnGlobal};
  kb.config.grid = ParamGrid::defaults();
  kb.validate();
  return kb;
}

}  // namespace unsaid
