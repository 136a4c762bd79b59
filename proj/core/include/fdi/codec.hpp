#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdi/detection.hpp"
#include "fdi/fsm.hpp"
#include "fdi/simkit.hpp"
#include "fdi/structural.hpp"

namespace fdi::io {

// Matrix text formats.
//
// CSV: the header row holds a corner label followed by the column ids; each
// further row holds a row id followed by 0/1 cells. JSON:
//   {"residuals": [...], "faults": [...], "cells": [[0, 1, ...], ...]}
// for an FSM and {"faults": [...], "cells": [...]} for a FIM. Writers emit a
// single canonical form, so write(read(text)) == text for writer output.

std::string fsm_to_csv(const Fsm& fsm);
Fsm fsm_from_csv(std::string_view text);
std::string fsm_to_json(const Fsm& fsm);
Fsm fsm_from_json(std::string_view text);

std::string fim_to_csv(const Fim& fim);
Fim fim_from_csv(std::string_view text);
std::string fim_to_json(const Fim& fim);
Fim fim_from_json(std::string_view text);

std::string model_to_json(const StructuralModel& model);
StructuralModel model_from_json(std::string_view text);

/// Residual requested in a scenario file, by target and input sensors.
struct ResidualRequest {
  Id target;
  std::vector<Id> inputs;
};

/// A simulation set-up as stored on disk.
struct ScenarioFile {
  sim::FaultCampaign campaign;  ///< `faults` empty for a single scenario run
  sim::DetectionConfig detection;
  std::optional<StructuralModel> model;
  std::vector<ResidualRequest> residuals;  ///< empty: original residuals of the model
};

/// `base_dir` resolves a model given as a relative path.
ScenarioFile scenario_from_json(std::string_view text, const std::filesystem::path& base_dir = {});
std::string scenario_to_json(const ScenarioFile& scenario);

/// Time column followed by one column per trace, shortest round-trip decimals.
std::string traces_to_csv(const sim::Traces& traces);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Dispatch on extension: `.json` uses JSON, anything else CSV.
Fsm read_fsm(const std::filesystem::path& path);
void write_fsm(const std::filesystem::path& path, const Fsm& fsm);
Fim read_fim(const std::filesystem::path& path);
void write_fim(const std::filesystem::path& path, const Fim& fim);
StructuralModel read_model(const std::filesystem::path& path);
void write_model(const std::filesystem::path& path, const StructuralModel& model);
ScenarioFile read_scenario(const std::filesystem::path& path);

}  // namespace fdi::io
