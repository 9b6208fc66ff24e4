#include "unsaid/service.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "unsaid/errors.hpp"

namespace unsaid {

using json = nlohmann::json;

namespace {

struct HttpError {
  int status;
  std::string code;
  std::string message;
  std::string field;
};

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSymptom:
    case ErrorCode::UnknownVariable: return 404;
    case ErrorCode::WrongPhase:
    case ErrorCode::AlreadyObserved: return 409;
    case ErrorCode::ImpossibleEvidence: return 422;
    default: return 400;
  }
}

HttpError from_error(const Error& e) {
  return {status_for(e.code()), std::string(to_string(e.code())), e.what(), e.subject()};
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json differential_json(const Differential& d) {
  json out = json::array();
  for (const auto& p : d) {
    out.push_back({{"disorder", p.variable},
                   {"present", present_probability(p)},
                   {"states", p.states},
                   {"probabilities", p.probabilities}});
  }
  return out;
}

json grid_json(const Posterior& p) {
  const auto values = grid_values(p);
  double expected = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) expected += values[i] * p.probabilities[i];
  return {{"node", p.variable},
          {"points", values},
          {"probabilities", p.probabilities},
          {"expected", expected}};
}

json params_json(const SessionParams& params) {
  return {{"reportability", grid_json(params.reportability)},
          {"bias", params.bias ? grid_json(*params.bias) : json(nullptr)}};
}

struct Entry {
  std::mutex mutex;
  Session session;
  std::string kb_name;
  std::string created_at;

  Entry(Session s, std::string kb, std::string created)
      : session(std::move(s)), kb_name(std::move(kb)), created_at(std::move(created)) {}
};

}  // namespace

struct Service::Impl {
  KbMap kbs;
  ServiceOptions options;
  httplib::Server server;

  mutable std::shared_mutex registry_mutex;
  std::unordered_map<std::string, std::shared_ptr<Entry>> sessions;
  std::mt19937_64 id_rng{std::random_device{}()};

  Impl(KbMap k, ServiceOptions o) : kbs(std::move(k)), options(std::move(o)) {
    restore_snapshots();
    routes();
  }

  // ---- registry ------------------------------------------------------------

  std::string fresh_id() {
    // Caller holds the registry write lock.
    for (;;) {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(id_rng()));
      if (!sessions.contains(buf)) return buf;
    }
  }

  std::shared_ptr<Entry> lookup(const std::string& id) const {
    std::shared_lock lock(registry_mutex);
    const auto it = sessions.find(id);
    if (it == sessions.end() || !it->second) throw HttpError{404, "NotFound", "unknown session '" + id + "'", "id"};
    return it->second;
  }

  std::shared_ptr<Entry> create(const std::string& kb_name, Mode mode) {
    const auto kb = kbs.find(kb_name);
    if (kb == kbs.end()) throw HttpError{404, "NotFound", "unknown kb '" + kb_name + "'", "kb"};
    std::string id;
    {
      std::unique_lock lock(registry_mutex);
      id = fresh_id();
      sessions.emplace(id, nullptr);  // reserve
    }
    try {
      auto entry = std::make_shared<Entry>(Session(kb->second, mode, id), kb_name, utc_timestamp());
      std::unique_lock lock(registry_mutex);
      sessions[id] = entry;
      return entry;
    } catch (...) {
      std::unique_lock lock(registry_mutex);
      sessions.erase(id);
      throw;
    }
  }

  // ---- snapshots -----------------------------------------------------------

  void snapshot(const Entry& e) const {
    if (!options.snapshot_dir) return;
    const auto& s = e.session;
    json doc{{"id", s.id()},
             {"kb", e.kb_name},
             {"mode", std::string(to_string(s.mode()))},
             {"created_at", e.created_at},
             {"open_probe", nullptr},
             {"answers", json::array()}};
    if (const auto& r = s.open_response()) {
      doc["open_probe"] = {{"question", r->question_id}, {"reported", r->reported}};
    }
    for (const auto& [sym, state] : s.closed_answers()) {
      doc["answers"].push_back({{"symptom", sym}, {"state", state}});
    }
    const auto path = *options.snapshot_dir / (s.id() + ".json");
    std::ofstream out(path, std::ios::trunc);
    out << doc.dump(2) << '\n';
    if (!out) spdlog::warn("could not write snapshot {}", path.string());
  }

  void restore_snapshots() {
    if (!options.snapshot_dir) return;
    std::filesystem::create_directories(*options.snapshot_dir);
    for (const auto& file : std::filesystem::directory_iterator(*options.snapshot_dir)) {
      if (file.path().extension() != ".json") continue;
      try {
        std::ifstream in(file.path());
        const json doc = json::parse(in);
        const auto kb_name = doc.at("kb").get<std::string>();
        const auto kb = kbs.find(kb_name);
        if (kb == kbs.end()) {
          spdlog::warn("snapshot {} references unknown kb '{}'", file.path().string(), kb_name);
          continue;
        }
        const auto id = doc.at("id").get<std::string>();
        Session session(kb->second, parse_mode(doc.at("mode").get<std::string>()), id);
        if (!doc.at("open_probe").is_null()) {
          OpenProbeResponse r;
          r.question_id = doc["open_probe"].at("question").get<std::string>();
          r.reported = doc["open_probe"].at("reported").get<std::map<std::string, std::string>>();
          session.submit_open_probe(r);
        }
        for (const auto& a : doc.at("answers")) {
          session.submit_closed_probe(a.at("symptom").get<std::string>(),
                                      a.at("state").get<std::string>());
        }
        sessions.emplace(id, std::make_shared<Entry>(std::move(session), kb_name,
                                                     doc.at("created_at").get<std::string>()));
      } catch (const std::exception& ex) {
        spdlog::warn("skipping snapshot {}: {}", file.path().string(), ex.what());
      }
    }
    if (!sessions.empty()) spdlog::info("restored {} session(s) from snapshots", sessions.size());
  }

  // ---- views ---------------------------------------------------------------

  static json symptom_catalog(const Session& s) {
    json out = json::array();
    const auto& kb = s.kb();
    for (const auto& id : s.observable_symptoms()) {
      json questions = json::array();
      for (const auto& r : kb.reports) {
        if (r.symptom_id == id) questions.push_back(r.question_id);
      }
      out.push_back({{"id", id},
                     {"states", kb.network.variable(id).states},
                     {"questions", std::move(questions)}});
    }
    return out;
  }

  static json session_json(const Entry& e) {
    const auto& s = e.session;
    json evidence = json::array();
    for (const auto& f : s.log()) {
      evidence.push_back(
          {{"variable", f.variable}, {"state", f.state}, {"source", std::string(to_string(f.source))}});
    }
    json probes = json::array();
    for (const auto& p : s.kb().probes) {
      if (p.kind == ProbeKind::Open) probes.push_back({{"id", p.id}, {"symptoms", p.symptoms}});
    }
    return {{"id", s.id()},
            {"kb", e.kb_name},
            {"mode", std::string(to_string(s.mode()))},
            {"phase", std::string(to_string(s.phase()))},
            {"created_at", e.created_at},
            {"evidence", std::move(evidence)},
            {"differential", differential_json(s.differential())},
            {"params", s.mode() == Mode::FixedParams ? json(nullptr) : params_json(s.params())},
            {"disorders", s.kb().disorders},
            {"open_probes", std::move(probes)},
            {"symptoms", symptom_catalog(s)}};
  }

  static json differential_view(const Session& s) {
    return {{"id", s.id()},
            {"phase", std::string(to_string(s.phase()))},
            {"differential", differential_json(s.differential())}};
  }

  // ---- plumbing ------------------------------------------------------------

  static json parse_body(const httplib::Request& req) {
    try {
      json body = json::parse(req.body);
      if (!body.is_object()) throw HttpError{400, "BadRequest", "request body must be an object", ""};
      return body;
    } catch (const json::parse_error& e) {
      throw HttpError{400, "BadRequest", std::string("malformed JSON: ") + e.what(), ""};
    }
  }

  static std::string string_field(const json& body, const char* key) {
    const auto it = body.find(key);
    if (it == body.end() || !it->is_string()) {
      throw HttpError{400, "BadRequest", std::string("field '") + key + "' must be a string", key};
    }
    return it->get<std::string>();
  }

  static void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  template <class F>
  void guarded(httplib::Response& res, F&& handler) {
    try {
      handler();
    } catch (const HttpError& e) {
      json body{{"code", e.code}, {"message", e.message}};
      if (!e.field.empty()) body["field"] = e.field;
      send(res, e.status, body);
    } catch (const Error& e) {
      const auto h = from_error(e);
      json body{{"code", h.code}, {"message", h.message}};
      if (!h.field.empty()) body["field"] = h.field;
      send(res, h.status, body);
    } catch (const std::exception& e) {
      spdlog::error("unhandled error: {}", e.what());
      send(res, 500, json{{"code", "Internal"}, {"message", e.what()}});
    }
  }

  void routes() {
    // No SO_REUSEPORT: a port held by another process must fail to bind.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof yes);
    });
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
      send(res, 200, json{{"status", "ok"}, {"kbs", kb_names()}});
    });

    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const json body = parse_body(req);
        const auto kb = string_field(body, "kb");
        const auto mode_name = string_field(body, "mode");
        Mode mode;
        try {
          mode = parse_mode(mode_name);
        } catch (const Error&) {
          throw HttpError{400, "UnsupportedMode", "unknown mode '" + mode_name + "'", "mode"};
        }
        if (!kbs.contains(kb)) throw HttpError{404, "NotFound", "unknown kb '" + kb + "'", "kb"};
        auto entry = create(kb, mode);
        std::lock_guard lock(entry->mutex);
        snapshot(*entry);
        send(res, 201, session_json(*entry));
      });
    });

    server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto entry = lookup(req.matches[1]);
        std::lock_guard lock(entry->mutex);
        send(res, 200, session_json(*entry));
      });
    });

    server.Get(R"(/sessions/([^/]+)/differential)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   auto entry = lookup(req.matches[1]);
                   std::lock_guard lock(entry->mutex);
                   send(res, 200, differential_view(entry->session));
                 });
               });

    server.Post(R"(/sessions/([^/]+)/open-probe)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] {
                    auto entry = lookup(req.matches[1]);
                    const json body = parse_body(req);
                    OpenProbeResponse response;
                    if (auto it = body.find("question"); it != body.end() && !it->is_null()) {
                      response.question_id = string_field(body, "question");
                    }
                    if (auto it = body.find("reported"); it != body.end()) {
                      if (!it->is_object()) {
                        throw HttpError{400, "BadRequest", "'reported' must be an object", "reported"};
                      }
                      for (const auto& [sym, state] : it->items()) {
                        if (!state.is_string()) {
                          throw HttpError{400, "BadRequest", "reported state must be a string", sym};
                        }
                        response.reported[sym] = state.get<std::string>();
                      }
                    }
                    std::lock_guard lock(entry->mutex);
                    entry->session.submit_open_probe(response);
                    snapshot(*entry);
                    send(res, 200, differential_view(entry->session));
                  });
                });

    server.Post(R"(/sessions/([^/]+)/answers)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] {
                    auto entry = lookup(req.matches[1]);
                    const json body = parse_body(req);
                    const auto symptom = string_field(body, "symptom");
                    const auto state = string_field(body, "state");
                    std::lock_guard lock(entry->mutex);
                    entry->session.submit_closed_probe(symptom, state);
                    snapshot(*entry);
                    send(res, 200, differential_view(entry->session));
                  });
                });

    server.Get(R"(/sessions/([^/]+)/questions)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   auto entry = lookup(req.matches[1]);
                   std::size_t k = 5;
                   if (req.has_param("k")) {
                     const auto text = req.get_param_value("k");
                     try {
                       std::size_t used = 0;
                       const long v = std::stol(text, &used);
                       if (used != text.size() || v < 0) throw std::invalid_argument(text);
                       k = static_cast<std::size_t>(v);
                     } catch (const std::exception&) {
                       throw HttpError{400, "BadRequest", "k must be a nonnegative integer", "k"};
                     }
                   }
                   std::lock_guard lock(entry->mutex);
                   json out = json::array();
                   for (const auto& q : entry->session.next_questions(k)) {
                     out.push_back({{"symptom", q.symptom}, {"score", q.score}, {"rank", q.rank}});
                   }
                   send(res, 200, json{{"id", entry->session.id()}, {"questions", std::move(out)}});
                 });
               });

    server.Get(R"(/sessions/([^/]+)/params)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   auto entry = lookup(req.matches[1]);
                   std::lock_guard lock(entry->mutex);
                   if (entry->session.mode() == Mode::FixedParams) {
                     throw HttpError{409, "NoParameters",
                                     "fixed-params sessions have no parameter posteriors", "mode"};
                   }
                   json out = params_json(entry->session.params());
                   out["id"] = entry->session.id();
                   send(res, 200, out);
                 });
               });
  }

  json kb_names() const {
    json out = json::array();
    for (const auto& [name, _] : kbs) out.push_back(name);
    return out;
  }
};

Service::Service(KbMap kbs, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(kbs), std::move(options))) {}

Service::~Service() { stop(); }

bool Service::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

int Service::bind_any(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool Service::listen() { return impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool Service::running() const { return impl_->server.is_running(); }

std::size_t Service::session_count() const {
  std::shared_lock lock(impl_->registry_mutex);
  return static_cast<std::size_t>(std::count_if(impl_->sessions.begin(), impl_->sessions.end(),
                                               [](const auto& kv) { return kv.second != nullptr; }));
}

}  // namespace unsaid
