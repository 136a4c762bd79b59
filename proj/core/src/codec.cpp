#include "fdi/codec.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fdi/errors.hpp"

namespace fdi::io {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- CSV

struct CsvLine {
  std::size_t number;  // 1-based
  std::vector<std::string_view> fields;
  std::vector<std::size_t> columns;  // 1-based start column of each field
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<CsvLine> split_csv(std::string_view text) {
  std::vector<CsvLine> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    auto end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text.remove_prefix(end == std::string_view::npos ? text.size() : end + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) {
      if (text.empty()) break;  // trailing newline
      throw ParseError("empty line", number);
    }
    CsvLine out{number, {}, {}};
    std::size_t pos = 0;
    for (;;) {
      auto comma = line.find(',', pos);
      auto field = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      if (field.find('"') != std::string_view::npos) throw ParseError("quoted fields are not supported", number, pos + 1);
      out.fields.push_back(trim(field));
      out.columns.push_back(pos + 1);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    lines.push_back(std::move(out));
  }
  return lines;
}

void check_csv_id(const Id& id) {
  if (id.find_first_of(",\"\r\n") != Id::npos || trim(id) != id) {
    throw ValidationError("identifier '" + id + "' cannot be written to CSV");
  }
}

struct Grid {
  std::string corner;
  std::vector<Id> columns;
  std::vector<Id> rows;
  std::vector<SignatureRow> cells;
};

Grid parse_grid(std::string_view text) {
  auto lines = split_csv(text);
  if (lines.empty()) throw ParseError("missing header row", 1);
  Grid g;
  const auto& header = lines.front();
  g.corner = std::string(header.fields.front());
  for (std::size_t k = 1; k < header.fields.size(); ++k) {
    if (header.fields[k].empty()) throw ParseError("empty column id", header.number, header.columns[k]);
    g.columns.emplace_back(header.fields[k]);
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const std::string row_id(line.fields.front());
    if (line.fields.size() != header.fields.size()) {
      throw ParseError("row '" + row_id + "' has " + std::to_string(line.fields.size()) + " fields, expected " +
                           std::to_string(header.fields.size()),
                       line.number);
    }
    if (row_id.empty()) throw ParseError("empty row id", line.number, 1);
    SignatureRow row;
    for (std::size_t k = 1; k < line.fields.size(); ++k) {
      const auto cell = line.fields[k];
      if (cell != "0" && cell != "1") {
        throw ParseError("cell '" + std::string(cell) + "' in row '" + row_id + "' is not 0 or 1", line.number,
                         line.columns[k]);
      }
      row.push_back(cell == "1");
    }
    g.rows.push_back(row_id);
    g.cells.push_back(std::move(row));
  }
  return g;
}

std::string write_grid(std::string_view corner, const std::vector<Id>& columns, const std::vector<Id>& rows,
                       const std::vector<SignatureRow>& cells) {
  std::string out(corner);
  for (const auto& c : columns) {
    check_csv_id(c);
    out += ',' + c;
  }
  out += '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    check_csv_id(rows[r]);
    out += rows[r];
    for (bool b : cells[r]) out += b ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------- JSON

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(e.what(), line, col);
  }
}

const json& member(const json& obj, const char* key) {
  if (!obj.is_object()) throw ParseError("expected a JSON object", 0);
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing key '") + key + "'", 0);
  return *it;
}

std::vector<Id> id_list(const json& value, const char* what) {
  if (!value.is_array()) throw ParseError(std::string(what) + " must be an array of strings", 0);
  std::vector<Id> out;
  for (const auto& v : value) {
    if (!v.is_string()) throw ParseError(std::string(what) + " must be an array of strings", 0);
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::set<Id> id_set(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) return {};
  auto list = id_list(*it, key);
  return {list.begin(), list.end()};
}

std::vector<SignatureRow> cell_rows(const json& value) {
  if (!value.is_array()) throw ParseError("cells must be an array of rows", 0);
  std::vector<SignatureRow> rows;
  for (std::size_t r = 0; r < value.size(); ++r) {
    const auto& row = value[r];
    if (!row.is_array()) throw ParseError("cells row " + std::to_string(r) + " is not an array", 0);
    SignatureRow out;
    for (const auto& c : row) {
      if (!c.is_number_integer() || (c.get<long long>() != 0 && c.get<long long>() != 1)) {
        throw ParseError("cells row " + std::to_string(r) + " holds '" + c.dump() + "', expected 0 or 1", 0);
      }
      out.push_back(c.get<long long>() == 1);
    }
    rows.push_back(std::move(out));
  }
  return rows;
}

std::string quoted(const Id& id) { return json(id).dump(); }

std::string json_id_array(const std::vector<Id>& ids) {
  std::string out = "[";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += quoted(ids[i]);
  }
  return out + "]";
}

std::string json_cells(const std::vector<SignatureRow>& rows) {
  if (rows.empty()) return "[]";
  std::string out = "[\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += "    [";
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c) out += ", ";
      out += rows[r][c] ? '1' : '0';
    }
    out += r + 1 == rows.size() ? "]\n" : "],\n";
  }
  return out + "  ]";
}

}  // namespace

std::string fsm_to_csv(const Fsm& fsm) {
  return write_grid("residual", fsm.fault_ids(), fsm.residual_ids(), fsm.rows());
}

Fsm fsm_from_csv(std::string_view text) {
  auto g = parse_grid(text);
  return Fsm(std::move(g.rows), std::move(g.columns), g.cells);
}

std::string fsm_to_json(const Fsm& fsm) {
  return "{\n  \"residuals\": " + json_id_array(fsm.residual_ids()) + ",\n  \"faults\": " +
         json_id_array(fsm.fault_ids()) + ",\n  \"cells\": " + json_cells(fsm.rows()) + "\n}\n";
}

Fsm fsm_from_json(std::string_view text) {
  const auto doc = parse_json(text);
  return Fsm(id_list(member(doc, "residuals"), "residuals"), id_list(member(doc, "faults"), "faults"),
             cell_rows(member(doc, "cells")));
}

std::string fim_to_csv(const Fim& fim) { return write_grid("fault", fim.fault_ids(), fim.fault_ids(), fim.rows()); }

Fim fim_from_csv(std::string_view text) {
  auto g = parse_grid(text);
  if (g.rows != g.columns) throw ParseError("FIM row ids must repeat the header ids in order", 0);
  return Fim(std::move(g.columns), g.cells);
}

std::string fim_to_json(const Fim& fim) {
  return "{\n  \"faults\": " + json_id_array(fim.fault_ids()) + ",\n  \"cells\": " + json_cells(fim.rows()) +
         "\n}\n";
}

Fim fim_from_json(std::string_view text) {
  const auto doc = parse_json(text);
  return Fim(id_list(member(doc, "faults"), "faults"), cell_rows(member(doc, "cells")));
}

// ---------------------------------------------------------------- models

namespace {

EquationKind kind_from(const std::string& s) {
  if (s == "dynamic") return EquationKind::kDynamic;
  if (s == "static") return EquationKind::kStatic;
  if (s == "measurement") return EquationKind::kMeasurement;
  throw ParseError("unknown equation kind '" + s + "'", 0);
}

std::string str(const json& obj, const char* key) {
  const auto& v = member(obj, key);
  if (!v.is_string()) throw ParseError(std::string("'") + key + "' must be a string", 0);
  return v.get<std::string>();
}

double num(const json& obj, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ParseError(std::string("'") + key + "' must be a number", 0);
  return it->get<double>();
}

ordered_json sorted_array(const std::set<Id>& ids) { return ordered_json(std::vector<Id>(ids.begin(), ids.end())); }

}  // namespace

std::string model_to_json(const StructuralModel& model) {
  ordered_json doc;
  doc["knowns"] = sorted_array(model.knowns);
  doc["unknowns"] = sorted_array(model.unknowns);
  doc["faults"] = model.faults;
  doc["equations"] = ordered_json::array();
  for (const auto& e : model.equations) {
    ordered_json eq;
    eq["id"] = e.id;
    eq["kind"] = to_string(e.kind);
    eq["solves"] = e.solves ? ordered_json(*e.solves) : ordered_json(nullptr);
    eq["depends_on"] = sorted_array(e.depends_on);
    eq["faults"] = sorted_array(e.faults);
    doc["equations"].push_back(std::move(eq));
  }
  doc["sensors"] = ordered_json::array();
  for (const auto& s : model.sensors) {
    doc["sensors"].push_back(ordered_json{{"id", s.id}, {"equation", s.equation}, {"measures", s.measures}});
  }
  if (!model.substitutions.empty()) {
    doc["substitutions"] = ordered_json::array();
    for (const auto& s : model.substitutions) {
      doc["substitutions"].push_back(
          ordered_json{{"sensor", s.sensor}, {"variable", s.variable}, {"faults", sorted_array(s.faults)}});
    }
  }
  return doc.dump(2) + "\n";
}

namespace {

StructuralModel model_from(const json& doc) {
  StructuralModel m;
  m.knowns = id_set(doc, "knowns");
  m.unknowns = id_set(doc, "unknowns");
  m.faults = id_list(member(doc, "faults"), "faults");
  const auto& eqs = member(doc, "equations");
  if (!eqs.is_array()) throw ParseError("'equations' must be an array", 0);
  for (const auto& e : eqs) {
    Equation eq;
    eq.id = str(e, "id");
    eq.kind = kind_from(str(e, "kind"));
    if (auto it = e.find("solves"); it != e.end() && !it->is_null()) {
      if (!it->is_string()) throw ParseError("'solves' must be a string or null", 0);
      eq.solves = it->get<std::string>();
    }
    eq.depends_on = id_set(e, "depends_on");
    eq.faults = id_set(e, "faults");
    m.equations.push_back(std::move(eq));
  }
  const auto& sensors = member(doc, "sensors");
  if (!sensors.is_array()) throw ParseError("'sensors' must be an array", 0);
  for (const auto& s : sensors) m.sensors.push_back({str(s, "id"), str(s, "equation"), str(s, "measures")});
  if (auto it = doc.find("substitutions"); it != doc.end()) {
    for (const auto& s : *it) m.substitutions.push_back({str(s, "sensor"), str(s, "variable"), id_set(s, "faults")});
  }
  require_unique_ids(m.faults, "fault");
  return m;
}

}  // namespace

StructuralModel model_from_json(std::string_view text) {
  const auto doc = parse_json(text);
  try {
    return model_from(doc);
  } catch (const json::exception& e) {
    throw ParseError(e.what(), 0);
  }
}

// ---------------------------------------------------------------- scenarios

namespace {

std::map<Id, double> coefficients(const json& rule, const char* key) {
  std::map<Id, double> out;
  auto it = rule.find(key);
  if (it == rule.end()) return out;
  if (!it->is_object()) throw ParseError(std::string("'") + key + "' must map names to coefficients", 0);
  for (const auto& [name, v] : it->items()) {
    if (!v.is_number()) throw ParseError("coefficient of '" + name + "' must be a number", 0);
    out[name] = v.get<double>();
  }
  return out;
}

sim::DynamicSystem system_from(const json& doc) {
  sim::DynamicSystem sys;
  for (const auto& s : member(doc, "states")) {
    sim::StateRule rule;
    rule.state = str(s, "name");
    rule.equation = str(s, "equation");
    rule.initial = num(s, "initial", 0.0);
    const auto& d = member(s, "derivative");
    rule.derivative.states = coefficients(d, "states");
    rule.derivative.inputs = coefficients(d, "inputs");
    rule.derivative.faults = coefficients(d, "faults");
    rule.derivative.constant = num(d, "constant", 0.0);
    sys.states.push_back(std::move(rule));
  }
  sys.inputs = id_list(member(doc, "inputs"), "inputs");
  sys.faults = id_list(member(doc, "faults"), "faults");
  for (const auto& o : member(doc, "outputs")) {
    sim::OutputRule rule{str(o, "sensor"), str(o, "equation"), str(o, "state"), {}};
    if (auto it = o.find("fault"); it != o.end() && !it->is_null()) rule.fault = it->get<std::string>();
    sys.outputs.push_back(std::move(rule));
  }
  return sys;
}

sim::Waveform waveform_from(const json& w) {
  sim::Waveform out;
  const auto kind = str(w, "kind");
  if (kind == "constant") {
    out.kind = sim::Waveform::Kind::kConstant;
  } else if (kind == "step") {
    out.kind = sim::Waveform::Kind::kStep;
  } else if (kind == "sinusoid") {
    out.kind = sim::Waveform::Kind::kSinusoid;
  } else {
    throw ParseError("unknown waveform kind '" + kind + "'", 0);
  }
  out.value = num(w, "value", 0.0);
  out.start = num(w, "start", 0.0);
  out.frequency = num(w, "frequency", 0.0);
  out.phase = num(w, "phase", 0.0);
  out.offset = num(w, "offset", 0.0);
  return out;
}

sim::FaultProfile profile_from(const json& p) {
  sim::FaultProfile out;
  out.fault = str(p, "fault");
  if (auto it = p.find("shape"); it != p.end()) {
    const auto kind = str(*it, "kind");
    if (kind == "none") {
      out.shape.kind = sim::FaultShape::Kind::kNone;
    } else if (kind == "sinusoid") {
      out.shape.kind = sim::FaultShape::Kind::kSinusoid;
    } else if (kind == "step") {
      out.shape.kind = sim::FaultShape::Kind::kStep;
    } else {
      throw ParseError("unknown fault shape '" + kind + "'", 0);
    }
    out.shape.amplitude = num(*it, "amplitude", 0.0);
    out.shape.frequency = num(*it, "frequency", 0.0);
    out.shape.phase = num(*it, "phase", 0.0);
  }
  if (auto it = p.find("windows"); it != p.end()) {
    for (const auto& w : *it) {
      if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
        throw ParseError("fault windows are [start, end] pairs", 0);
      }
      out.windows.push_back({w[0].get<double>(), w[1].get<double>()});
    }
  }
  return out;
}

ordered_json coefficients_to(const std::map<Id, double>& terms) {
  ordered_json out = ordered_json::object();
  for (const auto& [n, c] : terms) out[n] = c;
  return out;
}

const char* waveform_kind(sim::Waveform::Kind k) {
  switch (k) {
    case sim::Waveform::Kind::kConstant: return "constant";
    case sim::Waveform::Kind::kStep: return "step";
    case sim::Waveform::Kind::kSinusoid: return "sinusoid";
  }
  return "constant";
}

const char* shape_kind(sim::FaultShape::Kind k) {
  switch (k) {
    case sim::FaultShape::Kind::kNone: return "none";
    case sim::FaultShape::Kind::kSinusoid: return "sinusoid";
    case sim::FaultShape::Kind::kStep: return "step";
  }
  return "none";
}

ordered_json profile_to(const sim::FaultProfile& p) {
  ordered_json windows = ordered_json::array();
  for (const auto& w : p.windows) windows.push_back({w.start, w.end});
  return ordered_json{{"fault", p.fault},
                      {"shape",
                       {{"kind", shape_kind(p.shape.kind)},
                        {"amplitude", p.shape.amplitude},
                        {"frequency", p.shape.frequency},
                        {"phase", p.shape.phase}}},
                      {"windows", windows}};
}

}  // namespace

ScenarioFile scenario_from_json(std::string_view text, const std::filesystem::path& base_dir) {
  const auto doc = parse_json(text);
  ScenarioFile out;
  auto& nominal = out.campaign.nominal;
  try {
    nominal.system = system_from(member(doc, "system"));
    if (auto it = doc.find("inputs"); it != doc.end()) {
      for (const auto& [name, w] : it->items()) nominal.inputs[name] = waveform_from(w);
    }
    nominal.horizon = num(doc, "horizon", 30.0);
    nominal.step = num(doc, "step", 0.01);
    if (auto it = doc.find("noise"); it != doc.end()) {
      nominal.noise.seed = it->value("seed", std::uint64_t{0});
      nominal.noise.stddev = coefficients(*it, "stddev");
    }
    if (auto it = doc.find("profiles"); it != doc.end()) {
      for (const auto& p : *it) nominal.profiles.push_back(profile_from(p));
    }
    if (auto it = doc.find("faults"); it != doc.end()) {
      for (const auto& p : *it) out.campaign.faults.push_back(profile_from(p));
    }
    if (auto it = doc.find("detection"); it != doc.end()) {
      out.detection.threshold = num(*it, "threshold", out.detection.threshold);
      out.detection.dwell_fraction = num(*it, "dwell_fraction", out.detection.dwell_fraction);
      out.detection.epsilon = num(*it, "epsilon", out.detection.epsilon);
      out.detection.thresholds = coefficients(*it, "thresholds");
    }
    if (auto it = doc.find("model"); it != doc.end()) {
      if (it->is_string()) {
        out.model = read_model(base_dir / it->get<std::string>());
      } else {
        out.model = model_from(*it);
      }
    }
    if (auto it = doc.find("residuals"); it != doc.end()) {
      for (const auto& r : *it) out.residuals.push_back({str(r, "target"), id_list(member(r, "inputs"), "inputs")});
    }
  } catch (const json::exception& e) {
    throw ParseError(e.what(), 0);
  }
  return out;
}

std::string scenario_to_json(const ScenarioFile& scenario) {
  const auto& nominal = scenario.campaign.nominal;
  ordered_json sys;
  sys["states"] = ordered_json::array();
  for (const auto& s : nominal.system.states) {
    sys["states"].push_back(ordered_json{{"name", s.state},
                                         {"equation", s.equation},
                                         {"initial", s.initial},
                                         {"derivative",
                                          {{"states", coefficients_to(s.derivative.states)},
                                           {"inputs", coefficients_to(s.derivative.inputs)},
                                           {"faults", coefficients_to(s.derivative.faults)},
                                           {"constant", s.derivative.constant}}}});
  }
  sys["inputs"] = nominal.system.inputs;
  sys["faults"] = nominal.system.faults;
  sys["outputs"] = ordered_json::array();
  for (const auto& o : nominal.system.outputs) {
    sys["outputs"].push_back(ordered_json{{"sensor", o.sensor},
                                          {"equation", o.equation},
                                          {"state", o.state},
                                          {"fault", o.fault.empty() ? ordered_json(nullptr) : ordered_json(o.fault)}});
  }

  ordered_json doc;
  doc["system"] = std::move(sys);
  doc["inputs"] = ordered_json::object();
  for (const auto& [name, w] : nominal.inputs) {
    doc["inputs"][name] = ordered_json{{"kind", waveform_kind(w.kind)}, {"value", w.value},   {"start", w.start},
                                       {"frequency", w.frequency},      {"phase", w.phase}, {"offset", w.offset}};
  }
  doc["horizon"] = nominal.horizon;
  doc["step"] = nominal.step;
  doc["noise"] = ordered_json{{"seed", nominal.noise.seed}, {"stddev", coefficients_to(nominal.noise.stddev)}};
  doc["profiles"] = ordered_json::array();
  for (const auto& p : nominal.profiles) doc["profiles"].push_back(profile_to(p));
  doc["faults"] = ordered_json::array();
  for (const auto& p : scenario.campaign.faults) doc["faults"].push_back(profile_to(p));
  doc["detection"] = ordered_json{{"threshold", scenario.detection.threshold},
                                  {"dwell_fraction", scenario.detection.dwell_fraction},
                                  {"epsilon", scenario.detection.epsilon},
                                  {"thresholds", coefficients_to(scenario.detection.thresholds)}};
  if (scenario.model) doc["model"] = ordered_json::parse(model_to_json(*scenario.model));
  doc["residuals"] = ordered_json::array();
  for (const auto& r : scenario.residuals) doc["residuals"].push_back(ordered_json{{"target", r.target}, {"inputs", r.inputs}});
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- traces

std::string traces_to_csv(const sim::Traces& traces) {
  std::string out = "time";
  for (const auto& n : traces.names) {
    check_csv_id(n);
    out += ',' + n;
  }
  out += '\n';
  std::array<char, 32> buf{};
  auto put = [&](double v) {
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    out.append(buf.data(), end);
  };
  for (std::size_t i = 0; i < traces.time.size(); ++i) {
    put(traces.time[i]);
    for (const auto& col : traces.values) {
      out += ',';
      put(col[i]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------- files

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

namespace {
bool is_json(const std::filesystem::path& path) { return path.extension() == ".json"; }
}  // namespace

Fsm read_fsm(const std::filesystem::path& path) {
  const auto text = read_text(path);
  return is_json(path) ? fsm_from_json(text) : fsm_from_csv(text);
}

void write_fsm(const std::filesystem::path& path, const Fsm& fsm) {
  write_text(path, is_json(path) ? fsm_to_json(fsm) : fsm_to_csv(fsm));
}

Fim read_fim(const std::filesystem::path& path) {
  const auto text = read_text(path);
  return is_json(path) ? fim_from_json(text) : fim_from_csv(text);
}

void write_fim(const std::filesystem::path& path, const Fim& fim) {
  write_text(path, is_json(path) ? fim_to_json(fim) : fim_to_csv(fim));
}

StructuralModel read_model(const std::filesystem::path& path) { return model_from_json(read_text(path)); }

void write_model(const std::filesystem::path& path, const StructuralModel& model) {
  write_text(path, model_to_json(model));
}

ScenarioFile read_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_text(path), path.parent_path());
}

}  // namespace fdi::io
