// unsaid: command-line front end for the report-node diagnostic engine.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "unsaid/errors.hpp"

namespace {

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("unsaid");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("DX_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"; only honour it when asked for.
    if (level != spdlog::level::off || std::string_view(env) == "off") spdlog::set_level(level);
  }
}

void add_common(CLI::App* sub, unsaid::cli::Common& common, bool kb_positional = true) {
  if (kb_positional) {
    sub->add_option("kb,--kb", common.kb, "Knowledge base file");
  }
  sub->add_flag("--csv", common.csv, "Write CSV instead of an aligned table");
  sub->add_option("--out", common.out, "Write output to a file (CSV)");
  sub->add_option("--seed", common.seed, "Seed for generated knowledge bases");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace unsaid::cli;
  configure_logging();

  CLI::App app{"Diagnostic inference with report nodes"};
  app.require_subcommand(1);
  Common common;

  InferOptions infer;
  auto* infer_cmd = app.add_subcommand("infer", "Posterior marginals for a KB and evidence");
  add_common(infer_cmd, common);
  infer_cmd->add_option("--evidence,-e", infer.evidence,
                        "Comma-separated var=state and var~w1:w2 terms");
  infer_cmd->add_option("--query,-q", infer.queries, "Variables to report (default: disorders)");
  infer_cmd->add_option("--open-probe", infer.open_probe,
                        "Volunteered findings for the first open probe, e.g. R=present");
  infer_cmd->add_option("--mode", infer.mode, "Model used with --open-probe")
      ->check(CLI::IsMember({"fixed-params", "learn-global", "severity"}));

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep-bias", "Differential as a function of global bias");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--report", sweep.reported,
                        "Reported findings (default: three classic symptoms of the first disorder)");
  sweep_cmd->add_option("--bias", sweep.biases, "Comma-separated bias values");
  sweep_cmd->add_option("--reportability", sweep.reportability, "Reportability for every symptom");

  LearnOptions learn;
  auto* learn_cmd = app.add_subcommand("learn-demo", "Expected global parameters per scenario");
  add_common(learn_cmd, common);
  learn_cmd->add_option("--scenario", learn.scenarios,
                        "Reported findings per scenario, e.g. S00=present,S01=absent or none");

  SeverityOptions severity;
  auto* severity_cmd = app.add_subcommand("severity-demo", "Minor/major reporting asymmetry");
  add_common(severity_cmd, common, false);
  severity_cmd->add_option("--grid", severity.grid, "Points in the P_Minor grid");
  severity_cmd->add_option("--prior", severity.prior, "Prior of each disease")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));

  GenerateOptions generate;
  auto* generate_cmd = app.add_subcommand("generate-kb", "Write the synthetic benchmark KB");
  add_common(generate_cmd, common, false);
  generate_cmd->add_option("--disorders", generate.disorders);
  generate_cmd->add_option("--symptoms-per-disorder", generate.symptoms_per_disorder);
  generate_cmd->add_option("--overlap", generate.overlap);
  generate_cmd->add_option("--reportability", generate.reportability);
  generate_cmd->add_option("--bias", generate.bias);

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP session service");
  serve_cmd->add_option("kbs", serve.kbs, "Knowledge base files; each is served under its stem");
  serve_cmd->add_option("--kb", common.kb, "Knowledge base file");
  serve_cmd->add_option("--host", serve.host);
  serve_cmd->add_option("--port", serve.port, "0 picks a free port")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--snapshot-dir", serve.snapshot_dir, "Persist sessions here");
  serve_cmd->add_option("--cors-origin", serve.cors_origin);
  serve_cmd->add_option("--seed", common.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*infer_cmd) return run_infer(common, infer);
    if (*sweep_cmd) return run_sweep_bias(common, sweep);
    if (*learn_cmd) return run_learn_demo(common, learn);
    if (*severity_cmd) return run_severity_demo(common, severity);
    if (*generate_cmd) return run_generate_kb(common, generate);
    if (*serve_cmd) return run_serve(common, serve);
  } catch (const unsaid::Error& e) {
    std::cerr << "error: " << to_string(e.code());
    if (!e.subject().empty()) std::cerr << " [" << e.subject() << "]";
    std::cerr << ": " << e.what() << "\n";
    return 2;
  } catch (const OutputError& e) {
    std::cerr << "error: " << e.message << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
