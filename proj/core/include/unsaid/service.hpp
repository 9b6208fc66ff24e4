#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "unsaid/engine.hpp"
#include "unsaid/kb.hpp"

namespace unsaid {

struct ServiceOptions {
  /// Value of Access-Control-Allow-Origin.
  std::string cors_origin = "*";
  /// When set, every session is written through to <dir>/<id>.json and
  /// replayed from there at startup.
  std::optional<std::filesystem::path> snapshot_dir;
};

/// HTTP+JSON front end over dx-engine sessions.
///
///   POST /sessions                     {kb, mode}            -> 201 session
///   GET  /sessions/{id}                                      -> session
///   POST /sessions/{id}/open-probe     {question?, reported} -> differential
///   POST /sessions/{id}/answers        {symptom, state}      -> differential
///   GET  /sessions/{id}/questions?k=N                        -> ranked questions
///   GET  /sessions/{id}/differential                         -> differential
///   GET  /sessions/{id}/params                               -> grid posteriors
///   GET  /healthz                                            -> {"status":"ok"}
///
/// Errors are {code, message, field?}. Requests on one session are
/// serialized; distinct sessions proceed in parallel.
class Service {
 public:
  using KbMap = std::map<std::string, std::shared_ptr<const KnowledgeBase>>;

  explicit Service(KbMap kbs, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// False when the port cannot be bound.
  bool bind(const std::string& host, int port);
  /// Binds an ephemeral port and returns it, or -1.
  int bind_any(const std::string& host);
  /// Blocks serving requests until stop().
  bool listen();
  void stop();
  bool running() const;

  std::size_t session_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace unsaid
