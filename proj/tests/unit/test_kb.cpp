#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "unsaid/errors.hpp"
#include "unsaid/kb.hpp"

using namespace unsaid;
namespace fs = std::filesystem;

namespace {

const fs::path kData{UNSAID_DATA_DIR};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string replace_once(std::string text, std::string_view from, std::string_view to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, from.size(), to);
  return text;
}

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an unsaid::Error");
  return Error(ErrorCode::IoError, "unreachable");
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("unsaid-kb-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("bundled net-a fixture") {
  const auto kb = load_kb(kData / "net-a.kb");
  CHECK(kb.network.size() == 4);
  CHECK(kb.reports.size() == 2);
  CHECK(kb.disorders == std::vector<std::string>{"PI", "M"});
  CHECK(kb.network.table("R").entries == std::vector<double>{0.9, 0.1, 0.05, 0.95});
  CHECK(kb.network.table("H").entries == std::vector<double>{0.8, 0.2, 0.1, 0.9});
  CHECK(kb.reports[0].reportability == 0.9);
  CHECK(kb.reports[1].bias == 5.0);
  CHECK(kb.config.supports(Mode::LearnGlobal));
  CHECK(!kb.config.supports(Mode::Severity));
  REQUIRE(kb.open_probe() != nullptr);
  CHECK(kb.open_probe()->id == "init");
}

TEST_CASE("bundled net-s fixture") {
  const auto kb = load_kb(kData / "net-s.kb");
  CHECK(kb.network.size() == 4);
  CHECK(std::isinf(kb.reports[0].bias));
  CHECK(kb.reports[0].severity == SeverityClass::Minor);
  CHECK(kb.reports[1].severity == SeverityClass::Major);
  REQUIRE(kb.config.severity.has_value());
  CHECK(kb.config.severity->grid_points == 1000);
  CHECK(kb.network.table("RashDisease").entries == std::vector<double>{0.01, 0.99});
}

TEST_CASE("row sums are validated and the variable is named") {
  const auto text = replace_once(slurp(kData / "net-a.kb"), "[0.9, 0.1, 0.05, 0.95]",
                                 "[0.9, 0.3, 0.05, 0.95]");
  const auto e = error_of([&] { parse_kb(text); });
  CHECK(e.code() == ErrorCode::ValidationError);
  CHECK(e.subject() == "R");
}

TEST_CASE("report params must reference known symptoms") {
  const auto text = replace_once(slurp(kData / "net-a.kb"), R"("symptom": "H")", R"("symptom": "Q")");
  const auto e = error_of([&] { parse_kb(text); });
  CHECK(e.code() == ErrorCode::ValidationError);
  CHECK(e.subject() == "Q");
}

TEST_CASE("parse errors carry a line or a field path") {
  const auto broken = error_of([] { parse_kb("{\n  \"variables\": [\n  oops\n]}"); });
  CHECK(broken.code() == ErrorCode::ParseError);
  CHECK(broken.subject() == "line 3");

  const auto missing = error_of([] { parse_kb(R"({"variables": [], "tables": []})"); });
  CHECK(missing.code() == ErrorCode::ParseError);
  CHECK(missing.subject() == "kb.reports");

  const auto typed = error_of([&] {
    parse_kb(replace_once(slurp(kData / "net-a.kb"), R"("reportability": 0.9)",
                          R"("reportability": "high")"));
  });
  CHECK(typed.code() == ErrorCode::ParseError);
  CHECK(typed.subject() == "reports[0].reportability");

  const auto mode = error_of([&] {
    parse_kb(replace_once(slurp(kData / "net-a.kb"), "\"learn-global\"", "\"telepathy\""));
  });
  CHECK(mode.code() == ErrorCode::ParseError);
  CHECK(mode.subject() == "config.modes");
}

TEST_CASE("canonical round trip") {
  TempDir tmp;
  for (const auto* name : {"net-a.kb", "net-s.kb", "synthetic-42.kb"}) {
    CAPTURE(name);
    const auto kb = load_kb(kData / name);
    save_kb(kb, tmp.path / "first.kb");
    const auto again = load_kb(tmp.path / "first.kb");
    save_kb(again, tmp.path / "second.kb");
    CHECK(slurp(tmp.path / "first.kb") == slurp(tmp.path / "second.kb"));
    CHECK(to_canonical_json(kb) == to_canonical_json(again));

    REQUIRE(again.network.size() == kb.network.size());
    for (std::size_t i = 0; i < kb.network.size(); ++i) {
      CHECK(again.network.variable(i).id == kb.network.variable(i).id);
      CHECK(again.network.variable(i).states == kb.network.variable(i).states);
      CHECK(again.network.table(i).entries == kb.network.table(i).entries);
    }
    CHECK(again.reports.size() == kb.reports.size());
  }
}

TEST_CASE("canonical form sorts keys and keeps 17 significant digits") {
  auto kb = load_kb(kData / "net-a.kb");
  const auto text = to_canonical_json(kb);
  CHECK(text.find("\"config\"") < text.find("\"disorders\""));
  CHECK(text.find("\"disorders\"") < text.find("\"variables\""));
  CHECK(text.find("0.050000000000000003") != std::string::npos);
  CHECK(text.back() == '\n');

  const double third = 1.0 / 3.0;
  kb.network = kb.network.extended({}, {{"PI", {}, {third, 1.0 - third}}});
  const auto back = parse_kb(to_canonical_json(kb));
  CHECK(back.network.table("PI").entries[0] == third);
}

TEST_CASE("io failures") {
  const auto missing = error_of([] { load_kb("/nonexistent/dir/none.kb"); });
  CHECK(missing.code() == ErrorCode::IoError);
  const auto kb = load_kb(kData / "net-a.kb");
  const auto unwritable = error_of([&] { save_kb(kb, "/nonexistent/dir/out.kb"); });
  CHECK(unwritable.code() == ErrorCode::IoError);
}

TEST_CASE("synthetic generator") {
  const auto a = generate_synthetic_ctslike({});
  const auto b = generate_synthetic_ctslike({});
  CHECK(to_canonical_json(a) == to_canonical_json(b));
  CHECK(a.disorders.size() == 5);
  CHECK(a.disorders.front() == "D0");
  CHECK(a.network.table("D0").entries == std::vector<double>{0.76, 1.0 - 0.76});
  CHECK(a.network.size() == 5 + 16);
  CHECK(a.reports.size() == 16);
  for (const auto& r : a.reports) {
    CHECK(r.reportability == 0.9);
    CHECK(r.bias == 5.0);
    CHECK(r.question_id == "init");
  }
  for (std::size_t d = 1; d < 5; ++d) {
    const double p = a.network.table(a.disorders[d]).entries[0];
    CHECK(p >= 0.02);
    CHECK(p <= 0.10);
  }
  // Each later disorder shares exactly one earlier symptom at overlap 0.25.
  std::size_t shared = 0;
  for (const auto& v : a.network.variables()) {
    if (v.kind == VariableKind::Symptom && a.network.table(v.id).parents.size() > 1) {
      shared += a.network.table(v.id).parents.size() - 1;
    }
  }
  CHECK(shared == 4);
  CHECK(a.classic_symptoms("D0").size() == 4);

  SyntheticConfig other;
  other.seed = 43;
  CHECK(to_canonical_json(generate_synthetic_ctslike(other)) != to_canonical_json(a));

  SyntheticConfig bad;
  bad.disorders = 1;
  CHECK(error_of([&] { generate_synthetic_ctslike(bad); }).code() == ErrorCode::InvalidConfig);
  bad = {};
  bad.overlap_fraction = 1.0;
  CHECK(error_of([&] { generate_synthetic_ctslike(bad); }).code() == ErrorCode::InvalidConfig);
  bad = {};
  bad.bias = 0.5;
  CHECK(error_of([&] { generate_synthetic_ctslike(bad); }).code() == ErrorCode::InvalidConfig);
}

TEST_CASE("shipped synthetic KB is the seed-42 generator output") {
  CHECK(slurp(kData / "synthetic-42.kb") == to_canonical_json(generate_synthetic_ctslike({})));
}
