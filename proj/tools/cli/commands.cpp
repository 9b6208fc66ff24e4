#include "commands.hpp"

#include <pthread.h>
#include <signal.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "table.hpp"
#include "unsaid/engine.hpp"
#include "unsaid/errors.hpp"
#include "unsaid/experiments.hpp"
#include "unsaid/inference.hpp"
#include "unsaid/kb.hpp"
#include "unsaid/service.hpp"
#include "unsaid/severity.hpp"

namespace unsaid::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (text.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidConfig, "'" + text + "' is not a number", field);
}

/// "A=x,B=y" -> {A:x, B:y}; a bare "A" means A=present.
std::map<std::string, std::string> parse_assignments(const std::string& text,
                                                     const std::string& field) {
  std::map<std::string, std::string> out;
  for (const auto& term : split(text, ',')) {
    if (term.empty()) throw Error(ErrorCode::InvalidEvidence, "empty term in '" + text + "'", field);
    const auto eq = term.find('=');
    const auto var = term.substr(0, eq);
    const auto state = eq == std::string::npos ? std::string("present") : term.substr(eq + 1);
    if (var.empty() || state.empty()) {
      throw Error(ErrorCode::InvalidEvidence, "malformed term '" + term + "'", field);
    }
    if (!out.emplace(var, state).second) {
      throw Error(ErrorCode::InvalidEvidence, "'" + var + "' given twice", var);
    }
  }
  return out;
}

Evidence parse_evidence(const std::string& text) {
  Evidence e;
  for (const auto& term : split(text, ',')) {
    const auto tilde = term.find('~');
    const auto eq = term.find('=');
    if (tilde != std::string::npos && (eq == std::string::npos || tilde < eq)) {
      const auto var = term.substr(0, tilde);
      std::vector<double> weights;
      for (const auto& w : split(term.substr(tilde + 1), ':')) {
        weights.push_back(parse_double(w, var));
      }
      if (var.empty() || weights.size() < 2) {
        throw Error(ErrorCode::InvalidEvidence, "malformed virtual finding '" + term + "'", "evidence");
      }
      e.observe_likelihood(var, std::move(weights));
    } else if (eq != std::string::npos && eq > 0 && eq + 1 < term.size()) {
      e.observe(term.substr(0, eq), term.substr(eq + 1));
    } else {
      throw Error(ErrorCode::InvalidEvidence, "malformed evidence term '" + term + "'", "evidence");
    }
  }
  return e;
}

KnowledgeBase kb_or_synthetic(const Common& common) {
  if (!common.kb.empty()) return load_kb(common.kb);
  SyntheticConfig cfg;
  cfg.seed = common.seed;
  spdlog::info("no --kb given; using the synthetic KB with seed {}", common.seed);
  return generate_synthetic_ctslike(cfg);
}

KnowledgeBase required_kb(const Common& common) {
  if (common.kb.empty()) throw Error(ErrorCode::InvalidConfig, "a knowledge base is required", "kb");
  return load_kb(common.kb);
}

void emit(const Common& common, const Table& table) {
  std::ostringstream buf;
  if (common.csv || !common.out.empty()) {
    table.write_csv(buf);
  } else {
    table.write_text(buf);
  }
  if (common.out.empty()) {
    std::cout << buf.str() << std::flush;
    return;
  }
  std::ofstream out(common.out, std::ios::binary | std::ios::trunc);
  out << buf.str();
  if (!out) throw OutputError{"cannot write '" + common.out + "'"};
}

const Probe& require_open_probe(const KnowledgeBase& kb) {
  const auto* probe = kb.open_probe();
  if (!probe) throw Error(ErrorCode::InvalidConfig, "knowledge base has no open probe", "probes");
  return *probe;
}

std::string describe(const std::map<std::string, std::string>& reported) {
  if (reported.empty()) return "none";
  std::string out;
  for (const auto& [s, v] : reported) {
    if (!out.empty()) out += ' ';
    out += s + "=" + v;
  }
  return out;
}

}  // namespace

int run_infer(const Common& common, const InferOptions& options) {
  const auto kb = required_kb(common);
  Evidence evidence = parse_evidence(options.evidence);
  Network model = kb.network;
  if (options.open_probe) {
    const Mode mode = parse_mode(options.mode);
    model = build_model(kb, mode);
    const auto& probe = require_open_probe(kb);
    const auto reported = parse_assignments(*options.open_probe, "open-probe");
    const auto open = open_probe_evidence({probe.id, reported}, kb.params_for(probe.id));
    for (const auto& [v, s] : open.hard) {
      if (evidence.mentions(v)) throw Error(ErrorCode::InvalidEvidence, "'" + v + "' given twice", v);
      evidence.observe(v, s);
    }
  }
  evidence.validate(model);

  std::vector<std::string> queries;
  for (const auto& q : options.queries) {
    for (const auto& id : split(q, ',')) queries.push_back(id);
  }
  if (queries.empty()) queries = kb.disorders;
  for (const auto& q : queries) (void)model.index_of(q);

  Table table({"variable", "state", "probability"});
  for (const auto& p : posteriors(model, queries, evidence)) {
    for (std::size_t i = 0; i < p.states.size(); ++i) {
      table.add({p.variable, p.states[i], num(p.probabilities[i])});
    }
  }
  emit(common, table);
  return 0;
}

int run_sweep_bias(const Common& common, const SweepOptions& options) {
  const auto kb = kb_or_synthetic(common);
  std::map<std::string, std::string> reported;
  if (options.reported.empty()) {
    const auto classic = kb.classic_symptoms(kb.disorders.front());
    for (std::size_t i = 0; i < classic.size() && i < 3; ++i) reported[classic[i]] = "present";
  } else {
    reported = parse_assignments(options.reported, "report");
  }
  std::vector<double> biases;
  for (const auto& b : split(options.biases, ',')) biases.push_back(parse_double(b, "bias"));
  if (biases.empty()) throw Error(ErrorCode::InvalidConfig, "bias list is empty", "bias");
  spdlog::info("sweeping {} bias values with reported {}", biases.size(), describe(reported));

  const auto rows = sweep_bias(kb, reported, biases, options.reportability);
  std::vector<std::string> header{"bias"};
  for (const auto& d : kb.disorders) header.push_back(d);
  Table table(header);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::string> row{num(biases[i])};
    for (const auto& d : kb.disorders) row.push_back(num(rows[i].at(d)));
    table.add(std::move(row));
  }
  emit(common, table);
  return 0;
}

int run_learn_demo(const Common& common, const LearnOptions& options) {
  const auto kb = kb_or_synthetic(common);
  std::vector<std::map<std::string, std::string>> scenarios;
  if (options.scenarios.empty()) {
    const auto classic = kb.classic_symptoms(kb.disorders.front());
    for (const char* state : {"present", "absent"}) {
      for (std::size_t k = (state[0] == 'p' ? 0 : 1); k <= 3 && k <= classic.size(); ++k) {
        std::map<std::string, std::string> s;
        for (std::size_t i = 0; i < k; ++i) s[classic[i]] = state;
        scenarios.push_back(std::move(s));
      }
    }
  } else {
    for (const auto& text : options.scenarios) {
      scenarios.push_back(text == "none" ? std::map<std::string, std::string>{}
                                         : parse_assignments(text, "scenario"));
    }
  }

  const auto rows = learn_demo(kb, scenarios);
  Table table({"scenario", "present_reports", "absent_reports", "expected_reportability",
               "expected_bias"});
  const auto& probe = require_open_probe(kb);
  const auto params = kb.params_for(probe.id);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t present = 0, absent = 0;
    for (const auto& [sym, state] : scenarios[i]) {
      const auto it = std::find_if(params.begin(), params.end(),
                                   [&](const ReportParams& p) { return p.symptom_id == sym; });
      (state == it->absent_state ? absent : present) += 1;
    }
    table.add({describe(scenarios[i]), std::to_string(present), std::to_string(absent),
               num(rows[i].expected_reportability), num(rows[i].expected_bias)});
  }
  emit(common, table);
  return 0;
}

int run_severity_demo(const Common& common, const SeverityOptions& options) {
  if (options.grid < 1) throw Error(ErrorCode::InvalidConfig, "grid needs at least one point", "grid");
  const auto fx = make_severity_fixture(options.prior);
  const auto link = SeverityLink::quadratic();
  const auto net = augment_with_severity(fx.network, fx.params,
                                         GridAxis::uniform_unit_interval(options.grid), link);
  const auto ref = severity_reference(link, options.prior);
  const auto minor_case =
      severity_posterior_demo(net, fx.params, {"init", {{fx.minor_symptom, "present"}}}, fx);
  const auto major_case =
      severity_posterior_demo(net, fx.params, {"init", {{fx.major_symptom, "present"}}}, fx);

  Table table({"query", "grid_points", "posterior", "closed_form"});
  table.add({"P(" + fx.major_disorder + " | " + fx.minor_symptom + " reported)",
             std::to_string(options.grid), num(minor_case.second.probability("present")),
             num(ref.major_given_minor_report)});
  table.add({"P(" + fx.minor_disorder + " | " + fx.major_symptom + " reported)",
             std::to_string(options.grid), num(major_case.first.probability("present")),
             num(ref.minor_given_major_report)});
  emit(common, table);
  return 0;
}

int run_generate_kb(const Common& common, const GenerateOptions& options) {
  SyntheticConfig cfg;
  cfg.seed = common.seed;
  cfg.disorders = options.disorders;
  cfg.symptoms_per_disorder = options.symptoms_per_disorder;
  cfg.overlap_fraction = options.overlap;
  cfg.reportability = options.reportability;
  cfg.bias = options.bias;
  const auto kb = generate_synthetic_ctslike(cfg);
  if (common.out.empty()) {
    std::cout << to_canonical_json(kb) << std::flush;
    return 0;
  }
  try {
    save_kb(kb, common.out);
  } catch (const Error& e) {
    throw OutputError{e.what()};
  }
  spdlog::info("wrote {}", common.out);
  return 0;
}

int run_serve(const Common& common, const ServeOptions& options) {
  std::vector<std::string> paths = options.kbs;
  if (!common.kb.empty()) paths.push_back(common.kb);
  if (paths.empty()) throw Error(ErrorCode::InvalidConfig, "serve needs at least one KB", "kb");

  Service::KbMap kbs;
  for (const auto& p : paths) {
    const auto name = std::filesystem::path(p).stem().string();
    kbs[name] = std::make_shared<const KnowledgeBase>(load_kb(p));
    spdlog::info("loaded kb '{}' from {}", name, p);
  }

  // Signals are taken synchronously by a dedicated thread.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  ServiceOptions service_options;
  service_options.cors_origin = options.cors_origin;
  if (!options.snapshot_dir.empty()) service_options.snapshot_dir = options.snapshot_dir;
  Service service(std::move(kbs), service_options);

  int port = options.port;
  if (port == 0) {
    port = service.bind_any(options.host);
    if (port < 0) port = 0;
  } else if (!service.bind(options.host, port)) {
    port = 0;
  }
  if (port == 0) {
    spdlog::error("cannot bind {}:{}", options.host, options.port);
    std::cerr << "error: cannot bind " << options.host << ":" << options.port << "\n";
    return 3;
  }
  std::cout << "listening on http://" << options.host << ":" << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    spdlog::info("signal {} received, stopping", sig);
    service.stop();
  });
  const bool ok = service.listen();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return ok ? 0 : 3;
}

}  // namespace unsaid::cli
