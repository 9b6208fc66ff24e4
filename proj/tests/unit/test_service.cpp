#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <unistd.h>

#include "unsaid/kb.hpp"
#include "unsaid/service.hpp"

using namespace unsaid;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData{UNSAID_DATA_DIR};

Service::KbMap bundled() {
  return {{"net-a", std::make_shared<const KnowledgeBase>(load_kb(kData / "net-a.kb"))},
          {"synthetic", std::make_shared<const KnowledgeBase>(generate_synthetic_ctslike({}))}};
}

// Runs a service on an ephemeral port for the lifetime of the object.
class Running {
 public:
  explicit Running(ServiceOptions options = {}) : service_(bundled(), std::move(options)) {
    port_ = service_.bind_any("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { service_.listen(); });
    for (int i = 0; i < 200 && !service_.running(); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    REQUIRE(service_.running());
  }
  ~Running() {
    service_.stop();
    thread_.join();
  }

  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }
  Service& service() { return service_; }

 private:
  Service service_;
  int port_ = -1;
  std::thread thread_;
};

struct Reply {
  int status = 0;
  json body;
  std::string raw;
};

Reply post(const Running& r, const std::string& path, const json& body) {
  auto c = r.client();
  const auto res = c.Post(path, body.dump(), "application/json");
  REQUIRE(res);
  return {res->status, res->body.empty() ? json() : json::parse(res->body), res->body};
}

Reply get(const Running& r, const std::string& path) {
  auto c = r.client();
  const auto res = c.Get(path);
  REQUIRE(res);
  return {res->status, json::parse(res->body), res->body};
}

double present(const json& view, const std::string& disorder) {
  for (const auto& d : view.at("differential")) {
    if (d.at("disorder") == disorder) return d.at("present").get<double>();
  }
  FAIL("missing disorder " << disorder);
  return -1.0;
}

std::string create(const Running& r, const std::string& kb, const std::string& mode) {
  const auto reply = post(r, "/sessions", {{"kb", kb}, {"mode", mode}});
  REQUIRE(reply.status == 201);
  return reply.body.at("id").get<std::string>();
}

}  // namespace

TEST_CASE("health and CORS") {
  Running r;
  auto c = r.client();
  const auto res = c.Get("/healthz");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).at("status") == "ok");
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");

  const auto pre = c.Options("/sessions");
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);
}

TEST_CASE("creating sessions") {
  Running r;
  const auto ok = post(r, "/sessions", {{"kb", "synthetic"}, {"mode", "fixed-params"}});
  CHECK(ok.status == 201);
  CHECK(ok.body.at("phase") == "awaiting-open-probe");
  CHECK(ok.body.at("mode") == "fixed-params");
  CHECK(ok.body.at("id").get<std::string>().size() == 16);
  CHECK(ok.body.at("symptoms").size() == 16);
  CHECK(ok.body.at("params").is_null());
  CHECK(r.service().session_count() == 1);

  const auto unknown_kb = post(r, "/sessions", {{"kb", "nope"}, {"mode", "fixed-params"}});
  CHECK(unknown_kb.status == 404);
  CHECK(unknown_kb.body.at("code") == "NotFound");
  CHECK(unknown_kb.body.at("field") == "kb");

  const auto bad_mode = post(r, "/sessions", {{"kb", "synthetic"}, {"mode", "psychic"}});
  CHECK(bad_mode.status == 400);
  CHECK(bad_mode.body.at("code") == "UnsupportedMode");

  const auto unsupported = post(r, "/sessions", {{"kb", "net-a"}, {"mode", "severity"}});
  CHECK(unsupported.status == 400);
  CHECK(unsupported.body.at("code") == "UnsupportedMode");

  auto c = r.client();
  const auto malformed = c.Post("/sessions", "{not json", "application/json");
  REQUIRE(malformed);
  CHECK(malformed->status == 400);
  CHECK(json::parse(malformed->body).at("code") == "BadRequest");

  const auto missing = post(r, "/sessions", {{"kb", "synthetic"}});
  CHECK(missing.status == 400);
  CHECK(missing.body.at("field") == "mode");
}

TEST_CASE("open probe and answers on net-a") {
  Running r;
  const auto id = create(r, "net-a", "fixed-params");
  const auto base = "/sessions/" + id;

  const auto probe = post(r, base + "/open-probe", {{"reported", {{"R", "present"}}}});
  CHECK(probe.status == 200);
  CHECK(present(probe.body, "M") == doctest::Approx(0.016878804648588822).epsilon(1e-10));
  CHECK(probe.body.at("phase") == "refining");

  const auto again = post(r, base + "/open-probe", {{"reported", json::object()}});
  CHECK(again.status == 409);
  CHECK(again.body.at("code") == "WrongPhase");

  const auto answer = post(r, base + "/answers", {{"symptom", "H"}, {"state", "absent"}});
  CHECK(answer.status == 200);
  CHECK(present(answer.body, "M") == doctest::Approx(0.011560693641618497).epsilon(1e-10));

  const auto dup = post(r, base + "/answers", {{"symptom", "H"}, {"state", "present"}});
  CHECK(dup.status == 409);
  CHECK(dup.body.at("code") == "AlreadyObserved");

  const auto unknown = post(r, base + "/answers", {{"symptom", "Z"}, {"state", "present"}});
  CHECK(unknown.status == 404);
  CHECK(unknown.body.at("field") == "Z");

  const auto bad_state = post(r, base + "/answers", {{"symptom", "R"}, {"state", 3}});
  CHECK(bad_state.status == 400);

  CHECK(post(r, "/sessions/ffff/open-probe", {{"reported", json::object()}}).status == 404);
  CHECK(get(r, "/sessions/ffff").status == 404);

  const auto params = get(r, base + "/params");
  CHECK(params.status == 409);
  CHECK(params.body.at("code") == "NoParameters");

  const auto view = get(r, base);
  CHECK(view.body.at("evidence").size() == 4);
  CHECK(view.body.at("evidence").back().at("source") == "closed-probe");
}

TEST_CASE("volunteered symptom outside the probe is rejected") {
  Running r;
  const auto id = create(r, "net-a", "fixed-params");
  const auto bad = post(r, "/sessions/" + id + "/open-probe", {{"reported", {{"PI", "present"}}}});
  CHECK(bad.status == 404);
  CHECK(bad.body.at("code") == "UnknownSymptom");
  CHECK(get(r, "/sessions/" + id).body.at("phase") == "awaiting-open-probe");
}

TEST_CASE("questions endpoint") {
  Running r;
  const auto id = create(r, "synthetic", "fixed-params");
  const auto base = "/sessions/" + id;
  CHECK(get(r, base + "/questions?k=3").status == 409);

  post(r, base + "/open-probe", {{"reported", {{"S00", "present"}}}});
  const auto three = get(r, base + "/questions?k=3");
  CHECK(three.status == 200);
  const auto& qs = three.body.at("questions");
  REQUIRE(qs.size() == 3);
  for (std::size_t i = 1; i < qs.size(); ++i) {
    CHECK(qs[i - 1].at("score").get<double>() >= qs[i].at("score").get<double>());
    CHECK(qs[i].at("rank") == i + 1);
  }
  CHECK(get(r, base + "/questions?k=0").body.at("questions").empty());
  CHECK(get(r, base + "/questions").body.at("questions").size() == 5);
  CHECK(get(r, base + "/questions?k=-1").status == 400);
  CHECK(get(r, base + "/questions?k=two").status == 400);
}

TEST_CASE("params endpoint in learn-global mode") {
  Running r;
  const auto id = create(r, "synthetic", "learn-global");
  const auto base = "/sessions/" + id;
  const auto prior = get(r, base + "/params");
  CHECK(prior.status == 200);
  for (const auto& p : prior.body.at("reportability").at("probabilities")) {
    CHECK(p.get<double>() == doctest::Approx(1.0 / 9).epsilon(1e-12));
  }
  CHECK(prior.body.at("reportability").at("expected").get<double>() ==
        doctest::Approx(0.5).epsilon(1e-12));

  post(r, base + "/open-probe",
       {{"reported", {{"S00", "present"}, {"S01", "present"}, {"S02", "present"}}}});
  const auto after = get(r, base + "/params");
  CHECK(after.body.at("reportability").at("expected").get<double>() > 0.5);
  CHECK(after.body.at("bias").at("points").size() == 5);
}

TEST_CASE("reads are byte-identical without intervening writes") {
  Running r;
  const auto id = create(r, "synthetic", "learn-global");
  const auto base = "/sessions/" + id;
  post(r, base + "/open-probe", {{"reported", {{"S03", "present"}}}});
  for (const auto& path : {base, base + "/differential", base + "/questions?k=4", base + "/params"}) {
    CHECK(get(r, path).raw == get(r, path).raw);
  }
}

TEST_CASE("numbers survive the wire exactly") {
  Running r;
  const auto id = create(r, "net-a", "fixed-params");
  const auto probe = post(r, "/sessions/" + id + "/open-probe", {{"reported", {{"R", "present"}}}});
  const auto kb = std::make_shared<const KnowledgeBase>(load_kb(kData / "net-a.kb"));
  Session local(kb, Mode::FixedParams);
  local.submit_open_probe({"init", {{"R", "present"}}});
  for (const auto& p : local.differential()) {
    CHECK(present(probe.body, p.variable) == present_probability(p));
  }
}

TEST_CASE("scripted session matches the engine") {
  Running r;
  const auto kb = std::make_shared<const KnowledgeBase>(generate_synthetic_ctslike({}));
  Session local(kb, Mode::FixedParams);
  const auto id = create(r, "synthetic", "fixed-params");
  const auto base = "/sessions/" + id;

  local.submit_open_probe({"init", {{"S00", "present"}, {"S01", "present"}}});
  post(r, base + "/open-probe", {{"reported", {{"S00", "present"}, {"S01", "present"}}}});
  for (const auto& [sym, st] : {std::pair{"S05", "absent"}, std::pair{"S09", "present"}}) {
    local.submit_closed_probe(sym, st);
    post(r, base + "/answers", {{"symptom", sym}, {"state", st}});
  }
  const auto remote = get(r, base + "/questions?k=4").body.at("questions");
  const auto want = local.next_questions(4);
  REQUIRE(remote.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(remote[i].at("symptom") == want[i].symptom);
    CHECK(remote[i].at("score").get<double>() == want[i].score);
  }
  const auto diff = get(r, base + "/differential").body;
  for (const auto& p : local.differential()) CHECK(present(diff, p.variable) == present_probability(p));
}

TEST_CASE("concurrent sessions") {
  Running r;
  std::vector<std::thread> workers;
  std::atomic<int> failures{0};
  for (int t = 0; t < 6; ++t) {
    workers.emplace_back([&, t] {
      auto c = r.client();
      const auto res = c.Post("/sessions", json{{"kb", "net-a"}, {"mode", "fixed-params"}}.dump(),
                              "application/json");
      if (!res || res->status != 201) {
        ++failures;
        return;
      }
      const auto id = json::parse(res->body).at("id").get<std::string>();
      const auto probe = c.Post("/sessions/" + id + "/open-probe",
                                json{{"reported", {{"R", t % 2 ? "present" : "absent"}}}}.dump(),
                                "application/json");
      if (!probe || probe->status != 200) ++failures;
    });
  }
  for (auto& w : workers) w.join();
  CHECK(failures == 0);
  CHECK(r.service().session_count() == 6);
}

TEST_CASE("snapshots replay on restart") {
  const auto dir = fs::temp_directory_path() / ("unsaid-snap-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  std::string id;
  json before;
  {
    Running r(ServiceOptions{"*", dir});
    id = create(r, "net-a", "fixed-params");
    post(r, "/sessions/" + id + "/open-probe", {{"reported", {{"R", "present"}}}});
    post(r, "/sessions/" + id + "/answers", {{"symptom", "H"}, {"state", "absent"}});
    before = get(r, "/sessions/" + id).body;
  }
  CHECK(fs::exists(dir / (id + ".json")));
  {
    Running r(ServiceOptions{"*", dir});
    CHECK(r.service().session_count() == 1);
    const auto after = get(r, "/sessions/" + id).body;
    CHECK(after == before);
    CHECK(present(after, "M") == doctest::Approx(0.011560693641618497).epsilon(1e-10));
  }
  fs::remove_all(dir);
}
