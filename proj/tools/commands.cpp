#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include <fdi/bundled.hpp>
#include <fdi/codec.hpp>
#include <fdi/detection.hpp>
#include <fdi/errors.hpp>
#include <fdi/isolation.hpp>
#include <fdi/selection.hpp>
#include <fdi/simkit.hpp>
#include <fdi/structural.hpp>

#include "render.hpp"

namespace fdi::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::vector<Id> sorted(std::vector<Id> ids) {
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::size_t parse_count(const std::string& text, const std::string& what) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ValidationError("invalid " + what + " '" + text + "'");
  }
  return value;
}

ordered_json cells_json(const std::vector<SignatureRow>& rows) {
  auto out = ordered_json::array();
  for (const auto& row : rows) {
    auto cells = ordered_json::array();
    for (bool b : row) cells.push_back(b ? 1 : 0);
    out.push_back(std::move(cells));
  }
  return out;
}

ordered_json fsm_json(const Fsm& fsm) {
  return {{"residuals", fsm.residual_ids()}, {"faults", fsm.fault_ids()}, {"cells", cells_json(fsm.rows())}};
}

ordered_json fim_json(const Fim& fim) { return {{"faults", fim.fault_ids()}, {"cells", cells_json(fim.rows())}}; }

void print_json(const ordered_json& doc) { std::cout << doc.dump(2) << '\n'; }

fs::path output_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return fs::path(dir) / name;
}

void require_one_source(bool file, bool bundled, const char* what) {
  if (file && bundled) throw ValidationError(std::string("give either ") + what + " or --bundled, not both");
  if (!file && !bundled) throw ValidationError(std::string("no input: pass ") + what + " or --bundled");
}

io::BundledFsm load_fsm(const std::string& file, const std::string& bundled) {
  require_one_source(!file.empty(), !bundled.empty(), "an FSM file");
  if (!file.empty()) {
    auto fsm = io::read_fsm(file);
    const auto rows = fsm.num_residuals();
    return {std::move(fsm), rows};
  }
  const auto bundle = io::Bundle::locate();
  if (bundled == "engine") return bundle.engine_fsm();
  if (bundled == "example") return bundle.example_fsm();
  throw ValidationError("unknown bundled set '" + bundled + "'");
}

// "all", "original", "original<N>" (N must match the bundled split) or a row count.
Fsm pick_rows(const io::BundledFsm& source, const std::string& rows) {
  if (rows == "all") return source.fsm;
  if (rows.rfind("original", 0) == 0) {
    const auto suffix = rows.substr(8);
    if (!suffix.empty() && parse_count(suffix, "row selection") != source.original_rows) {
      throw ValidationError("this FSM has " + std::to_string(source.original_rows) + " original rows, not " + suffix);
    }
    return source.originals();
  }
  const auto count = parse_count(rows, "row selection");
  if (count == 0 || count > source.fsm.num_residuals()) {
    throw ValidationError("row count must lie in 1.." + std::to_string(source.fsm.num_residuals()));
  }
  return source.fsm.head(count);
}

// Reorders the fault columns of `fsm` to `faults`.
Fsm align_columns(const Fsm& fsm, const std::vector<Id>& faults) {
  std::vector<std::size_t> index;
  for (const auto& f : faults) {
    auto k = fsm.fault_index(f);
    if (!k) throw ConfigurationError("fault '" + f + "' is missing from the structural model");
    index.push_back(*k);
  }
  if (faults.size() != fsm.num_faults()) throw ConfigurationError("model and system declare different faults");
  std::vector<SignatureRow> rows(fsm.num_residuals(), SignatureRow(faults.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t j = 0; j < faults.size(); ++j) rows[r][j] = fsm.at(r, index[j]);
  }
  return Fsm(fsm.residual_ids(), faults, rows);
}

StructuralModel checked(StructuralModel model) {
  const auto report = validate_model(model);
  for (const auto& issue : report.issues) {
    std::cerr << (issue.severity == Severity::kError ? "error: " : "warning: ") << issue.message << '\n';
  }
  if (!report.ok()) throw ValidationError("structural model is invalid");
  return model;
}

std::string join_set(const std::set<Id>& ids) { return join(std::vector<Id>(ids.begin(), ids.end()), ","); }

}  // namespace

int run_fim(const GlobalOptions& global, const FimOptions& options) {
  const auto source = load_fsm(options.file, options.bundled);
  const Fsm fsm = pick_rows(source, options.rows);
  const Fim fim = fsm_to_fim(fsm);
  const auto isolated = sorted(isolated_faults(fim));

  if (!global.csv_dir.empty()) {
    io::write_fsm(output_path(global.csv_dir, "fsm.csv"), fsm);
    io::write_fim(output_path(global.csv_dir, "fim.csv"), fim);
  }
  if (global.json) {
    print_json({{"command", "fim"},
                {"residuals", fsm.residual_ids()},
                {"faults", fsm.fault_ids()},
                {"fim", cells_json(fim.rows())},
                {"isolated", isolated}});
    return kExitOk;
  }
  std::cout << "FIM of " << fsm.num_residuals() << " residuals over " << fsm.num_faults() << " faults\n"
            << render_fim(fim) << "isolated: " << join(isolated) << '\n';
  return kExitOk;
}

int run_enumerate(const GlobalOptions& global, const EnumerateOptions& options) {
  const int sources = !options.file.empty() + !options.bundled.empty() + options.chain.has_value();
  if (sources != 1) throw ValidationError("pass exactly one of a model file, --bundled or --chain");

  StructuralModel model;
  if (options.chain) {
    model = chain_model(*options.chain);
  } else if (!options.file.empty()) {
    model = io::read_model(options.file);
  } else if (options.bundled == "example") {
    model = io::Bundle::locate().example_model();
  } else {
    throw ValidationError("no bundled model named '" + options.bundled + "'");
  }
  model = checked(std::move(model));

  const auto enumeration = enumerate_candidates(model);
  const auto candidates = enumeration.candidates();
  const Fsm predicted = predicted_fsm(model, candidates);

  if (!global.csv_dir.empty() && !candidates.empty()) {
    io::write_fsm(output_path(global.csv_dir, "candidates_fsm.csv"), predicted);
  }

  if (global.json) {
    auto attempts = ordered_json::array();
    std::size_t row = 0;
    for (const auto& d : enumeration.attempts) {
      if (const auto* spec = std::get_if<ResidualSpec>(&d)) {
        auto assignments = ordered_json::array();
        for (const auto& a : spec->assignments) {
          assignments.push_back({{"equation", a.equation}, {"solves", a.solves}, {"reoriented", a.reoriented}});
        }
        attempts.push_back({{"id", spec->id},
                            {"target", spec->target},
                            {"inputs", spec->inputs},
                            {"feasible", true},
                            {"support", spec->support},
                            {"assignments", std::move(assignments)},
                            {"signature", cells_json({predicted.row(row++)}).front()}});
      } else {
        const auto& inf = std::get<Infeasible>(d);
        attempts.push_back({{"target", inf.target},
                            {"inputs", inf.inputs},
                            {"feasible", false},
                            {"blocking_unknown", inf.blocking_unknown}});
      }
    }
    print_json({{"command", "enumerate"},
                {"faults", model.faults},
                {"attempted", enumeration.attempted()},
                {"feasible", enumeration.feasible()},
                {"attempts", std::move(attempts)}});
  } else {
    std::size_t row = 0;
    for (const auto& d : enumeration.attempts) {
      std::ostringstream line;
      if (const auto* spec = std::get_if<ResidualSpec>(&d)) {
        line << std::left << std::setw(24) << spec->id << " signature " << bits(predicted.row(row++))
             << "  support " << join_set(spec->support);
      } else {
        const auto& inf = std::get<Infeasible>(d);
        line << std::left << std::setw(24) << residual_id(inf.target, inf.inputs) << " infeasible, nothing solves "
             << inf.blocking_unknown;
      }
      std::cout << line.str() << '\n';
    }
    if (!candidates.empty()) std::cout << "faults: " << join(model.faults) << '\n';
    std::cout << "attempted " << enumeration.attempted() << ", feasible " << enumeration.feasible() << '\n';
  }
  return enumeration.attempted() > 0 && enumeration.feasible() == 0 ? kExitEmpty : kExitOk;
}

namespace {

struct SelectionInput {
  Fsm original;
  Fsm pool;
};

SelectionInput load_selection(const SelectOptions& options) {
  const bool files = !options.original.empty() || !options.pool.empty();
  require_one_source(files, !options.bundled.empty(), "--original/--pool");
  if (files) {
    if (options.original.empty()) throw ValidationError("--pool needs --original");
    Fsm original = io::read_fsm(options.original);
    Fsm pool = options.pool.empty() ? Fsm::without_rows(original.fault_ids()) : io::read_fsm(options.pool);
    return {std::move(original), std::move(pool)};
  }
  const auto bundle = io::Bundle::locate();
  if (options.bundled == "engine") {
    const auto engine = bundle.engine_fsm();
    return {engine.originals(), engine.additional()};
  }
  if (options.bundled == "example") {
    // The example pool is r3 plus the reverse-direction residual estimating y1 from y2.
    const auto example = bundle.example_fsm();
    const auto model = bundle.example_model();
    const std::vector<Id> inputs{"y2"};
    const auto spec = std::get<ResidualSpec>(derive_residual(model, "y1", inputs));
    const Fsm reverse = align_columns(predicted_fsm(model, std::span(&spec, 1)), example.fsm.fault_ids());
    return {example.originals(), example.additional().with_row("r4", reverse.row(0))};
  }
  throw ValidationError("unknown bundled set '" + options.bundled + "'");
}

Fsm with_chosen(const Fsm& original, const Fsm& pool, const std::vector<Id>& chosen) {
  std::vector<std::size_t> index;
  for (const auto& id : chosen) index.push_back(*pool.residual_index(id));
  return original.stacked(pool.select_rows(index));
}

}  // namespace

int run_select(const GlobalOptions& global, const SelectOptions& options) {
  const auto input = load_selection(options);
  const auto original_isolated = sorted(isolated_faults(fsm_to_fim(input.original)));

  std::vector<Id> chosen;
  Fim final_fim;
  ordered_json doc = {{"command", "select"},
                      {"mode", options.exact ? "exact" : "greedy"},
                      {"original", input.original.residual_ids()},
                      {"pool", input.pool.residual_ids()},
                      {"original_isolated", original_isolated}};
  std::ostringstream text;
  text << "original: " << input.original.num_residuals() << " residuals, isolated: " << join(original_isolated)
       << '\n'
       << "pool: " << input.pool.num_residuals() << " residuals\n";

  if (options.exact) {
    const auto result = select_exact(input.original, input.pool);
    chosen = result.chosen;
    final_fim = result.final_fim;
    doc["subsets_examined"] = result.subsets_examined;
    text << "smallest subset: " << chosen.size() << " residuals (" << result.subsets_examined
         << " subsets examined)\n";
  } else {
    const auto result = select_minimal(input.original, input.pool);
    chosen = result.chosen;
    final_fim = result.final_fim;
    auto rounds = ordered_json::array();
    for (std::size_t k = 0; k < result.rounds.size(); ++k) {
      const auto& r = result.rounds[k];
      const auto isolated = sorted(r.isolated);
      rounds.push_back(
          {{"residual", r.residual}, {"pool_index", r.pool_index}, {"score", r.score}, {"isolated", isolated}});
      text << "round " << k + 1 << ": " << r.residual << " (pool #" << r.pool_index << ") score " << r.score
           << ", isolated: " << join(isolated) << '\n';
    }
    doc["iterations"] = result.iterations;
    doc["rounds"] = std::move(rounds);
    text << "iterations: " << result.iterations << '\n';
  }

  const auto isolated = sorted(isolated_faults(final_fim));
  doc["chosen"] = chosen;
  doc["fim"] = fim_json(final_fim);
  doc["isolated"] = isolated;

  if (!global.csv_dir.empty()) {
    io::write_fim(output_path(global.csv_dir, "final_fim.csv"), final_fim);
    io::write_fsm(output_path(global.csv_dir, "selected_fsm.csv"), with_chosen(input.original, input.pool, chosen));
  }
  if (global.json) {
    print_json(doc);
  } else {
    std::cout << text.str() << "chosen: " << join(chosen) << '\n'
              << render_fim(final_fim) << "isolated: " << join(isolated) << '\n';
  }
  return kExitOk;
}

namespace {

std::vector<ResidualSpec> resolve_residuals(const StructuralModel& model,
                                            const std::vector<io::ResidualRequest>& requests) {
  if (requests.empty()) return original_residuals(model);
  std::vector<ResidualSpec> specs;
  for (const auto& req : requests) {
    auto d = derive_residual(model, req.target, req.inputs);
    if (const auto* inf = std::get_if<Infeasible>(&d)) {
      throw ConfigurationError("residual " + residual_id(req.target, req.inputs) +
                               " is infeasible: nothing solves " + inf->blocking_unknown);
    }
    specs.push_back(std::get<ResidualSpec>(std::move(d)));
  }
  return specs;
}

sim::Traces pick_columns(const sim::Traces& traces, const std::vector<Id>& names) {
  sim::Traces out;
  out.time = traces.time;
  for (const auto& n : names) {
    out.names.push_back(n);
    out.values.push_back(traces.column(n));
  }
  return out;
}

void write_plot_data(const std::string& dir, const std::string& tag, const sim::Traces& residuals,
                     std::span<const ResidualSpec> specs) {
  std::vector<Id> originals, all;
  for (const auto& s : specs) {
    all.push_back(s.id);
    if (s.is_original()) originals.push_back(s.id);
  }
  io::write_text(output_path(dir, "sim1_" + tag + ".csv"), io::traces_to_csv(pick_columns(residuals, originals)));
  io::write_text(output_path(dir, "sim2_" + tag + ".csv"), io::traces_to_csv(pick_columns(residuals, all)));
}

std::string number(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

int simulate_single(const GlobalOptions& global, const SimulateOptions& options, const io::ScenarioFile& file,
                    std::span<const ResidualSpec> specs) {
  const auto& scenario = file.campaign.nominal;
  const auto run = sim::run_residuals(scenario, specs);
  const auto* profile = scenario.active_profile();

  sim::DetectionConfig config = file.detection;
  std::vector<sim::TimeWindow> windows;
  if (profile != nullptr) {
    windows = profile->windows;
  } else {
    config = sim::calibrate(run.residuals, config).config;
    windows.push_back({0.0, scenario.horizon + scenario.step});
  }
  std::vector<Id> triggered;
  for (const auto& s : specs) {
    if (sim::detect(run.residuals, s.id, config, windows)) triggered.push_back(s.id);
  }
  const std::string tag = profile != nullptr ? profile->fault : "nominal";

  if (!global.csv_dir.empty()) {
    io::write_text(output_path(global.csv_dir, tag + ".csv"),
                   io::traces_to_csv(run.plant.outputs.merged(run.residuals)));
  }
  if (!options.plot_data.empty()) write_plot_data(options.plot_data, tag, run.residuals, specs);

  if (global.json) {
    std::vector<Id> ids;
    for (const auto& s : specs) ids.push_back(s.id);
    print_json({{"command", "simulate"},
                {"horizon", scenario.horizon},
                {"step", scenario.step},
                {"seed", scenario.noise.seed},
                {"sign_convention", std::string(run.sign_convention)},
                {"fault", profile != nullptr ? ordered_json(profile->fault) : ordered_json(nullptr)},
                {"residuals", ids},
                {"triggered", triggered}});
  } else {
    std::cout << (profile != nullptr ? "fault " + profile->fault : std::string("fault-free run")) << ", horizon "
              << number(scenario.horizon) << " s, step " << number(scenario.step) << " s\n"
              << "triggered: " << join(triggered) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_simulate(const GlobalOptions& global, const SimulateOptions& options) {
  require_one_source(!options.file.empty(), !options.bundled.empty(), "a scenario file");
  io::ScenarioFile file;
  if (!options.file.empty()) {
    file = io::read_scenario(options.file);
  } else if (options.bundled == "example") {
    file = io::Bundle::locate().example_scenario();
  } else {
    throw ValidationError("no bundled scenario named '" + options.bundled + "'");
  }
  if (!options.model.empty()) file.model = io::read_model(options.model);
  if (!file.model) throw ValidationError("the scenario names no structural model; pass --model");
  if (options.step) {
    if (!(*options.step > 0.0)) throw ValidationError("--step must be positive");
    file.campaign.nominal.step = *options.step;
  }
  if (global.seed) file.campaign.nominal.noise.seed = *global.seed;

  const StructuralModel model = checked(*file.model);
  const auto specs = resolve_residuals(model, file.residuals);
  if (file.campaign.faults.empty()) return simulate_single(global, options, file, specs);

  const auto result = sim::run_campaign(file.campaign, specs, file.detection);
  const auto& nominal = file.campaign.nominal;
  const Fsm structural = align_columns(predicted_fsm(model, specs), result.fsm.fault_ids());
  const bool matches = structural == result.fsm;

  if (!global.csv_dir.empty()) {
    io::write_fsm(output_path(global.csv_dir, "empirical_fsm.csv"), result.fsm);
    io::write_fsm(output_path(global.csv_dir, "structural_fsm.csv"), structural);
    io::write_text(output_path(global.csv_dir, "nominal.csv"),
                   io::traces_to_csv(result.nominal.plant.outputs.merged(result.nominal.residuals)));
    for (std::size_t k = 0; k < result.runs.size(); ++k) {
      const auto& run = result.runs[k];
      io::write_text(output_path(global.csv_dir, "run_" + file.campaign.faults[k].fault + ".csv"),
                     io::traces_to_csv(run.plant.outputs.merged(run.residuals)));
    }
  }
  if (!options.plot_data.empty()) {
    for (std::size_t k = 0; k < result.runs.size(); ++k) {
      write_plot_data(options.plot_data, file.campaign.faults[k].fault, result.runs[k].residuals, specs);
    }
  }

  // Faults are FSM columns; the triggered residuals of a fault are its support.
  std::map<Id, std::vector<Id>> triggered;
  for (std::size_t j = 0; j < result.fsm.num_faults(); ++j) {
    triggered[result.fsm.fault_ids()[j]] = result.fsm.support(j).residuals;
  }

  if (global.json) {
    auto calibration = ordered_json::array();
    for (const auto& s : specs) {
      calibration.push_back({{"residual", s.id},
                             {"rms", result.calibration.rms.at(s.id)},
                             {"scale", result.calibration.config.scale_for(s.id)},
                             {"false_trigger_rate", result.calibration.false_trigger_rate.at(s.id)}});
    }
    auto per_fault = ordered_json::object();
    for (const auto& f : result.fsm.fault_ids()) per_fault[f] = triggered[f];
    print_json({{"command", "simulate"},
                {"horizon", nominal.horizon},
                {"step", nominal.step},
                {"seed", nominal.noise.seed},
                {"sign_convention", std::string(sim::kResidualSignConvention)},
                {"calibration", std::move(calibration)},
                {"triggered", std::move(per_fault)},
                {"empirical", fsm_json(result.fsm)},
                {"structural", fsm_json(structural)},
                {"matches_structural", matches}});
    return kExitOk;
  }

  std::cout << "simulated " << result.runs.size() << " fault scenarios, horizon " << number(nominal.horizon)
            << " s, step " << number(nominal.step) << " s, " << sim::kResidualSignConvention << '\n'
            << "calibration on the fault-free run:\n";
  for (const auto& s : specs) {
    std::cout << "  " << std::left << std::setw(14) << truncate_label(s.id) << " rms "
              << std::setw(12) << number(result.calibration.rms.at(s.id)) << " scale " << std::setw(12)
              << number(result.calibration.config.scale_for(s.id)) << " false triggers "
              << number(result.calibration.false_trigger_rate.at(s.id)) << '\n';
  }
  for (const auto& f : result.fsm.fault_ids()) std::cout << "fault " << f << ": triggered " << join(triggered[f]) << '\n';
  std::cout << "empirical FSM:\n"
            << render_fsm(result.fsm) << "structural FSM:\n"
            << render_fsm(structural) << "empirical FSM matches structural prediction: " << (matches ? "yes" : "no")
            << '\n';
  return kExitOk;
}

int run_diagnose(const GlobalOptions& global, const DiagnoseOptions& options) {
  const auto source = load_fsm(options.file, options.bundled);
  const auto mode = options.exoneration ? Exoneration::kOn : Exoneration::kOff;
  const auto candidates = sorted(diagnose(options.triggered, source.fsm, mode));

  if (global.json) {
    print_json({{"command", "diagnose"},
                {"triggered", options.triggered},
                {"exoneration", options.exoneration},
                {"candidates", candidates}});
  } else {
    std::cout << "triggered: " << join(options.triggered) << '\n'
              << "candidates: " << join(candidates) << '\n';
  }
  return candidates.empty() ? kExitEmpty : kExitOk;
}

}  // namespace fdi::cli
