#include "fdi/detection.hpp"

#include <algorithm>
#include <cmath>

#include "fdi/errors.hpp"

namespace fdi::sim {

double DetectionConfig::threshold_for(const Id& residual) const {
  auto it = thresholds.find(residual);
  return it == thresholds.end() ? threshold : it->second;
}

double DetectionConfig::scale_for(const Id& residual) const {
  auto it = scales.find(residual);
  return it == scales.end() ? 1.0 : it->second;
}

void DetectionConfig::validate() const {
  if (!(threshold > 0.0)) throw ValidationError("threshold J must be positive");
  for (const auto& [id, j] : thresholds) {
    if (!(j > 0.0)) throw ValidationError("threshold for '" + id + "' must be positive");
  }
  if (!(dwell_fraction > 0.0 && dwell_fraction <= 1.0)) throw ValidationError("dwell fraction must lie in (0, 1]");
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  for (const auto& [id, s] : scales) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("scale for '" + id + "' must be positive");
  }
}

Calibration calibrate(const Traces& fault_free, DetectionConfig base) {
  base.validate();
  if (fault_free.time.empty() || fault_free.names.empty()) throw ValidationError("calibration needs non-empty traces");

  Calibration cal;
  cal.config = std::move(base);
  for (std::size_t k = 0; k < fault_free.names.size(); ++k) {
    const auto& id = fault_free.names[k];
    const auto& r = fault_free.values[k];
    if (r.empty()) throw ValidationError("calibration trace '" + id + "' is empty");
    double sum_sq = 0.0;
    for (double v : r) sum_sq += v * v;
    const double rms = std::sqrt(sum_sq / static_cast<double>(r.size()));
    const double scale = std::max(rms, cal.config.epsilon);
    cal.rms[id] = rms;
    cal.config.scales[id] = scale;

    const double j = cal.config.threshold_for(id);
    const auto over = std::count_if(r.begin(), r.end(), [&](double v) { return std::abs(v / scale) > j; });
    cal.false_trigger_rate[id] = static_cast<double>(over) / static_cast<double>(r.size());
  }
  return cal;
}

bool detect(std::span<const double> time, std::span<const double> residual, double scale, double threshold,
            double dwell_fraction, std::span<const TimeWindow> windows) {
  if (time.size() != residual.size()) throw ValidationError("time and residual traces differ in length");
  std::size_t inside = 0;
  std::size_t over = 0;
  for (std::size_t i = 0; i < time.size(); ++i) {
    const bool in_window =
        std::any_of(windows.begin(), windows.end(), [&](const TimeWindow& w) { return w.contains(time[i]); });
    if (!in_window) continue;
    ++inside;
    if (std::abs(residual[i] / scale) > threshold) ++over;
  }
  if (inside == 0) return false;
  return static_cast<double>(over) >= dwell_fraction * static_cast<double>(inside);
}

bool detect(const Traces& residuals, const Id& residual, const DetectionConfig& config,
            std::span<const TimeWindow> windows) {
  return detect(residuals.time, residuals.column(residual), config.scale_for(residual),
                config.threshold_for(residual), config.dwell_fraction, windows);
}

namespace {

struct FaultRun {
  Id fault;
  const FaultProfile* profile;
  ResidualRun run;
};

Fsm assemble(const std::vector<Id>& fault_order, const std::vector<FaultRun>& runs,
             std::span<const ResidualSpec> specs, const DetectionConfig& config) {
  std::vector<Id> residual_ids;
  for (const auto& s : specs) residual_ids.push_back(s.id);
  std::vector<SignatureRow> rows(specs.size(), SignatureRow(fault_order.size(), false));
  for (std::size_t f = 0; f < fault_order.size(); ++f) {
    auto it = std::find_if(runs.begin(), runs.end(), [&](const FaultRun& r) { return r.fault == fault_order[f]; });
    if (it == runs.end()) throw ValidationError("no scenario injects fault '" + fault_order[f] + "'");
    for (std::size_t r = 0; r < specs.size(); ++r) {
      rows[r][f] = detect(it->run.residuals, specs[r].id, config, it->profile->windows);
    }
  }
  return Fsm(std::move(residual_ids), fault_order, rows);
}

std::vector<FaultRun> run_all(std::span<const SimScenario> per_fault, std::span<const ResidualSpec> specs) {
  std::vector<FaultRun> runs;
  for (const auto& sc : per_fault) {
    const FaultProfile* profile = sc.active_profile();
    if (profile == nullptr) throw ValidationError("fault scenario does not inject any fault");
    if (std::any_of(runs.begin(), runs.end(), [&](const FaultRun& r) { return r.fault == profile->fault; })) {
      throw ValidationError("fault '" + profile->fault + "' is injected by more than one scenario");
    }
    try {
      runs.push_back({profile->fault, profile, run_residuals(sc, specs)});
    } catch (const SimulationError& e) {
      throw SimulationError("simulation diverged", e.time(), profile->fault);
    }
  }
  return runs;
}

}  // namespace

Fsm empirical_fsm(std::span<const SimScenario> per_fault, std::span<const ResidualSpec> specs,
                  const DetectionConfig& config) {
  config.validate();
  if (per_fault.empty()) throw ValidationError("empirical FSM needs at least one fault scenario");
  const auto& faults = per_fault.front().system.faults;
  if (per_fault.size() != faults.size()) {
    throw ValidationError("expected one scenario per fault (" + std::to_string(faults.size()) + "), got " +
                          std::to_string(per_fault.size()));
  }
  for (const auto& sc : per_fault) {
    if (sc.horizon != per_fault.front().horizon || sc.step != per_fault.front().step) {
      throw ValidationError("fault scenarios must share horizon and step");
    }
  }
  return assemble(faults, run_all(per_fault, specs), specs, config);
}

std::vector<SimScenario> FaultCampaign::scenarios() const {
  std::vector<SimScenario> out;
  for (const auto& profile : faults) {
    SimScenario sc = nominal;
    std::erase_if(sc.profiles, [&](const FaultProfile& p) { return p.fault == profile.fault; });
    sc.profiles.push_back(profile);
    out.push_back(std::move(sc));
  }
  return out;
}

CampaignResult run_campaign(const FaultCampaign& campaign, std::span<const ResidualSpec> specs,
                            const DetectionConfig& base) {
  if (campaign.nominal.active_profile() != nullptr) {
    throw ValidationError("nominal scenario must be fault-free");
  }
  CampaignResult result;
  result.nominal = run_residuals(campaign.nominal, specs);
  result.calibration = calibrate(result.nominal.residuals, base);

  const auto scenarios = campaign.scenarios();
  const auto fault_runs = run_all(scenarios, specs);
  result.fsm = assemble(campaign.nominal.system.faults, fault_runs, specs, result.calibration.config);
  for (const auto& r : fault_runs) result.runs.push_back(r.run);
  return result;
}

}  // namespace fdi::sim
