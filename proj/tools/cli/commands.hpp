#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace unsaid::cli {

struct Common {
  std::string kb;
  bool csv = false;
  std::string out;
  std::uint64_t seed = 42;
};

/// Output file could not be written; reported as an environment failure.
struct OutputError {
  std::string message;
};

struct InferOptions {
  std::string evidence;
  std::vector<std::string> queries;
  std::optional<std::string> open_probe;
  std::string mode = "fixed-params";
};

struct SweepOptions {
  std::string reported;
  std::string biases = "1,2,5,10,20,50,100";
  double reportability = 0.9;
};

struct LearnOptions {
  std::vector<std::string> scenarios;
};

struct SeverityOptions {
  std::size_t grid = 1000;
  double prior = 0.01;
};

struct GenerateOptions {
  std::size_t disorders = 5;
  std::size_t symptoms_per_disorder = 4;
  double overlap = 0.25;
  double reportability = 0.9;
  double bias = 5.0;
};

struct ServeOptions {
  std::vector<std::string> kbs;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string snapshot_dir;
  std::string cors_origin = "*";
};

int run_infer(const Common& common, const InferOptions& options);
int run_sweep_bias(const Common& common, const SweepOptions& options);
int run_learn_demo(const Common& common, const LearnOptions& options);
int run_severity_demo(const Common& common, const SeverityOptions& options);
int run_generate_kb(const Common& common, const GenerateOptions& options);
int run_serve(const Common& common, const ServeOptions& options);

}  // namespace unsaid::cli
