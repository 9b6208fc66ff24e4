#include "unsaid/kb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "unsaid/errors.hpp"
#include "unsaid/severity.hpp"

namespace unsaid {

using json = nlohmann::json;

namespace {

// ---- reading ---------------------------------------------------------------

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw Error(ErrorCode::ParseError, path + " must be an object", path);
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::ParseError, "missing field " + path + "." + key, path + "." + key);
  }
  return *it;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw Error(ErrorCode::ParseError, path + " must be a string", path);
  return v.get<std::string>();
}

double as_number(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  throw Error(ErrorCode::ParseError, path + " must be a number", path);
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw Error(ErrorCode::ParseError, path + " must be an array", path);
  return v;
}

std::vector<std::string> string_list(const json& v, const std::string& path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  for (const auto& item : as_array(v, path)) {
    out.push_back(as_string(item, path + "[" + std::to_string(i++) + "]"));
  }
  return out;
}

std::vector<double> number_list(const json& v, const std::string& path) {
  std::vector<double> out;
  std::size_t i = 0;
  for (const auto& item : as_array(v, path)) {
    out.push_back(as_number(item, path + "[" + std::to_string(i++) + "]"));
  }
  return out;
}

GridAxis parse_axis(const json& v, const std::string& path) {
  return GridAxis{number_list(member(v, "values", path), path + ".values"),
                  number_list(member(v, "priors", path), path + ".priors")};
}

std::map<std::string, double> parse_scales(const json& v, const std::string& path) {
  std::map<std::string, double> out;
  if (!v.is_object()) throw Error(ErrorCode::ParseError, path + " must be an object", path);
  for (const auto& [k, x] : v.items()) out[k] = as_number(x, path + "." + k);
  return out;
}

KbConfig parse_config(const json& v) {
  KbConfig config;
  if (v.is_null()) return config;
  if (!v.is_object()) throw Error(ErrorCode::ParseError, "config must be an object", "config");
  if (auto it = v.find("modes"); it != v.end()) {
    config.modes.clear();
    for (const auto& m : string_list(*it, "config.modes")) {
      try {
        config.modes.push_back(parse_mode(m));
      } catch (const Error&) {
        throw Error(ErrorCode::ParseError, "unknown mode '" + m + "' in config.modes",
                    "config.modes");
      }
    }
  }
  if (auto it = v.find("grid"); it != v.end()) {
    config.grid = ParamGrid{parse_axis(member(*it, "reportability", "config.grid"),
                                       "config.grid.reportability"),
                            parse_axis(member(*it, "bias", "config.grid"), "config.grid.bias")};
  }
  if (auto it = v.find("link"); it != v.end()) {
    if (auto s = it->find("reportability_scale"); s != it->end()) {
      config.link.reportability_scale = parse_scales(*s, "config.link.reportability_scale");
    }
    if (auto s = it->find("bias_scale"); s != it->end()) {
      config.link.bias_scale = parse_scales(*s, "config.link.bias_scale");
    }
  }
  if (auto it = v.find("severity"); it != v.end()) {
    SeverityConfig sev;
    if (auto l = it->find("link"); l != it->end()) sev.link = as_string(*l, "config.severity.link");
    if (auto g = it->find("grid_points"); g != it->end()) {
      if (!g->is_number_unsigned()) {
        throw Error(ErrorCode::ParseError, "config.severity.grid_points must be a positive integer",
                    "config.severity.grid_points");
      }
      sev.grid_points = g->get<std::size_t>();
    }
    config.severity = sev;
  }
  return config;
}

KnowledgeBase from_json(const json& root) {
  KnowledgeBase kb;

  std::vector<Variable> variables;
  std::size_t i = 0;
  for (const auto& v : as_array(member(root, "variables", "kb"), "variables")) {
    const auto path = "variables[" + std::to_string(i++) + "]";
    Variable var;
    var.id = as_string(member(v, "id", path), path + ".id");
    var.states = string_list(member(v, "states", path), path + ".states");
    var.kind = parse_variable_kind(as_string(member(v, "kind", path), path + ".kind"));
    variables.push_back(std::move(var));
  }

  std::vector<ConditionalTable> tables;
  i = 0;
  for (const auto& t : as_array(member(root, "tables", "kb"), "tables")) {
    const auto path = "tables[" + std::to_string(i++) + "]";
    tables.push_back(ConditionalTable{as_string(member(t, "child", path), path + ".child"),
                                      string_list(member(t, "parents", path), path + ".parents"),
                                      number_list(member(t, "entries", path), path + ".entries")});
  }

  try {
    kb.network = Network::build(std::move(variables), std::move(tables));
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError,
                std::string(to_string(e.code())) + ": " + e.what(), e.subject());
  }

  i = 0;
  for (const auto& r : as_array(member(root, "reports", "kb"), "reports")) {
    const auto path = "reports[" + std::to_string(i++) + "]";
    ReportParams p;
    p.symptom_id = as_string(member(r, "symptom", path), path + ".symptom");
    p.question_id = as_string(member(r, "question", path), path + ".question");
    p.reportability = as_number(member(r, "reportability", path), path + ".reportability");
    p.bias = as_number(member(r, "bias", path), path + ".bias");
    if (auto it = r.find("severity"); it != r.end()) {
      p.severity = parse_severity_class(as_string(*it, path + ".severity"));
    }
    if (auto it = r.find("absent_state"); it != r.end()) {
      p.absent_state = as_string(*it, path + ".absent_state");
    }
    kb.reports.push_back(std::move(p));
  }

  i = 0;
  for (const auto& p : as_array(member(root, "probes", "kb"), "probes")) {
    const auto path = "probes[" + std::to_string(i++) + "]";
    Probe probe;
    probe.id = as_string(member(p, "id", path), path + ".id");
    const auto kind = as_string(member(p, "kind", path), path + ".kind");
    if (kind == "open") {
      probe.kind = ProbeKind::Open;
    } else if (kind == "closed") {
      probe.kind = ProbeKind::Closed;
    } else {
      throw Error(ErrorCode::ParseError, "unknown probe kind '" + kind + "'", path + ".kind");
    }
    if (auto it = p.find("symptoms"); it != p.end()) {
      probe.symptoms = string_list(*it, path + ".symptoms");
    }
    kb.probes.push_back(std::move(probe));
  }

  kb.disorders = string_list(member(root, "disorders", "kb"), "disorders");
  if (auto it = root.find("config"); it != root.end()) kb.config = parse_config(*it);
  return kb;
}

// ---- writing ---------------------------------------------------------------

json axis_json(const GridAxis& axis) {
  return json{{"values", axis.values}, {"priors", axis.priors}};
}

json number_json(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

json to_json(const KnowledgeBase& kb) {
  json root;
  json vars = json::array();
  for (const auto& v : kb.network.variables()) {
    vars.push_back({{"id", v.id}, {"states", v.states}, {"kind", std::string(to_string(v.kind))}});
  }
  root["variables"] = std::move(vars);

  json tables = json::array();
  for (const auto& t : kb.network.tables()) {
    tables.push_back({{"child", t.child}, {"parents", t.parents}, {"entries", t.entries}});
  }
  root["tables"] = std::move(tables);

  json reports = json::array();
  for (const auto& r : kb.reports) {
    reports.push_back({{"symptom", r.symptom_id},
                       {"question", r.question_id},
                       {"reportability", number_json(r.reportability)},
                       {"bias", number_json(r.bias)},
                       {"severity", std::string(to_string(r.severity))},
                       {"absent_state", r.absent_state}});
  }
  root["reports"] = std::move(reports);

  json probes = json::array();
  for (const auto& p : kb.probes) {
    probes.push_back({{"id", p.id},
                      {"kind", p.kind == ProbeKind::Open ? "open" : "closed"},
                      {"symptoms", p.symptoms}});
  }
  root["probes"] = std::move(probes);
  root["disorders"] = kb.disorders;

  json config = json::object();
  json modes = json::array();
  for (auto m : kb.config.modes) modes.push_back(std::string(to_string(m)));
  config["modes"] = std::move(modes);
  if (kb.config.grid) {
    config["grid"] = {{"reportability", axis_json(kb.config.grid->reportability)},
                      {"bias", axis_json(kb.config.grid->bias)}};
  }
  if (!kb.config.link.reportability_scale.empty() || !kb.config.link.bias_scale.empty()) {
    config["link"] = {{"reportability_scale", kb.config.link.reportability_scale},
                      {"bias_scale", kb.config.link.bias_scale}};
  }
  if (kb.config.severity) {
    config["severity"] = {{"link", kb.config.severity->link},
                          {"grid_points", kb.config.severity->grid_points}};
  }
  root["config"] = std::move(config);
  return root;
}

bool is_scalar(const json& v) { return !v.is_object() && !v.is_array(); }

void write_canonical(const json& v, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, x] : v.items()) {  // std::map: keys already sorted
        if (!first) out += ",\n";
        first = false;
        out += inner + json(k).dump() + ": ";
        write_canonical(x, out, indent + 2);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(v.begin(), v.end(), is_scalar);
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) out += ", ";
          write_canonical(v[i], out, indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        write_canonical(v[i], out, indent + 2);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
      out += buf;
      return;
    }
    default:
      out += v.dump();
  }
}

void check(bool ok, const std::string& message, const std::string& subject) {
  if (!ok) throw Error(ErrorCode::ValidationError, message, subject);
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::FixedParams: return "fixed-params";
    case Mode::LearnGlobal: return "learn-global";
    case Mode::Severity: return "severity";
  }
  return "fixed-params";
}

Mode parse_mode(std::string_view text) {
  if (text == "fixed-params") return Mode::FixedParams;
  if (text == "learn-global") return Mode::LearnGlobal;
  if (text == "severity") return Mode::Severity;
  throw Error(ErrorCode::UnsupportedMode, "unknown mode '" + std::string(text) + "'", "mode");
}

bool KbConfig::supports(Mode mode) const {
  return std::find(modes.begin(), modes.end(), mode) != modes.end();
}

void KnowledgeBase::validate() const {
  check(!disorders.empty(), "disorder set is empty", "disorders");
  std::set<std::string> seen_disorders;
  for (const auto& d : disorders) {
    check(network.contains(d), "disorder '" + d + "' is not a variable", d);
    check(seen_disorders.insert(d).second, "disorder '" + d + "' listed twice", d);
  }

  std::set<std::string> probe_ids;
  for (const auto& p : probes) {
    check(probe_ids.insert(p.id).second, "probe '" + p.id + "' defined twice", p.id);
    for (const auto& s : p.symptoms) {
      check(network.contains(s), "probe '" + p.id + "' binds unknown symptom '" + s + "'", s);
    }
  }

  std::set<std::pair<std::string, std::string>> bound;
  for (const auto& r : reports) {
    check(network.contains(r.symptom_id),
          "report params reference unknown symptom '" + r.symptom_id + "'", r.symptom_id);
    const auto* probe = find_probe(r.question_id);
    check(probe != nullptr, "report params reference unknown probe '" + r.question_id + "'",
          r.question_id);
    check(probe->kind == ProbeKind::Open,
          "report params bound to closed probe '" + r.question_id + "'", r.question_id);
    check(bound.emplace(r.symptom_id, r.question_id).second,
          "duplicate report params for '" + r.symptom_id + "' on '" + r.question_id + "'",
          r.symptom_id);
    try {
      r.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::ValidationError,
                  "report params for '" + r.symptom_id + "': " + e.what(), r.symptom_id);
    }
    check(network.variable(r.symptom_id).find_state(r.absent_state).has_value(),
          "'" + r.symptom_id + "' has no absent-like state '" + r.absent_state + "'",
          r.symptom_id);
    check(!network.contains(report_node_id(r.question_id, r.symptom_id)),
          "network already defines report node for '" + r.symptom_id + "'", r.symptom_id);
  }
  for (const auto& p : probes) {
    if (p.kind != ProbeKind::Open) continue;
    for (const auto& s : p.symptoms) {
      check(bound.contains({s, p.id}),
            "symptom '" + s + "' bound to probe '" + p.id + "' has no report params", s);
    }
    for (const auto& r : reports) {
      if (r.question_id != p.id) continue;
      check(std::find(p.symptoms.begin(), p.symptoms.end(), r.symptom_id) != p.symptoms.end(),
            "report params for '" + r.symptom_id + "' not listed by probe '" + p.id + "'",
            r.symptom_id);
    }
  }

  if (config.grid) {
    try {
      config.grid->validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::ValidationError, e.what(), "config.grid");
    }
  }
  if (config.severity) {
    check(config.severity->link == "quadratic",
          "unknown severity link '" + config.severity->link + "'", "config.severity.link");
    check(config.severity->grid_points >= 1, "severity grid needs at least one point",
          "config.severity.grid_points");
  }
  check(!config.modes.empty(), "no supported modes", "config.modes");
}

std::vector<ReportParams> KnowledgeBase::params_for(std::string_view question_id) const {
  std::vector<ReportParams> out;
  for (const auto& r : reports) {
    if (r.question_id == question_id) out.push_back(r);
  }
  return out;
}

const Probe* KnowledgeBase::open_probe() const {
  for (const auto& p : probes) {
    if (p.kind == ProbeKind::Open) return &p;
  }
  return nullptr;
}

const Probe* KnowledgeBase::find_probe(std::string_view id) const {
  for (const auto& p : probes) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::vector<std::string> KnowledgeBase::classic_symptoms(std::string_view disorder) const {
  std::vector<std::string> out;
  const auto d = network.index_of(disorder);
  for (auto c : network.children(d)) {
    if (network.variable(c).kind == VariableKind::Symptom) out.push_back(network.variable(c).id);
  }
  return out;
}

KnowledgeBase parse_kb(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what(),
                "line " + std::to_string(line));
  }
  KnowledgeBase kb;
  try {
    kb = from_json(root);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  kb.validate();
  return kb;
}

std::string to_canonical_json(const KnowledgeBase& kb) {
  std::string out;
  write_canonical(to_json(kb), out, 0);
  out += '\n';
  return out;
}

KnowledgeBase load_kb(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kb(buf.str());
}

void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path) {
  const auto text = to_canonical_json(kb);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'", path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'", path.string());
}

}  // namespace unsaid
