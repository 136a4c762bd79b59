#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "fdi/fsm.hpp"
#include "fdi/simkit.hpp"

namespace fdi::sim {

/// Threshold test on normalized residuals: a residual triggers when at least
/// `dwell_fraction` of the in-window samples satisfy |r / scale| > J.
struct DetectionConfig {
  double threshold = 5.0;               ///< default J
  std::map<Id, double> thresholds;      ///< per-residual J overrides
  std::map<Id, double> scales;          ///< normalization; 1 when absent
  double dwell_fraction = 0.3;
  double epsilon = 1e-9;                ///< floor for calibrated scales

  double threshold_for(const Id& residual) const;
  double scale_for(const Id& residual) const;
  /// Throws ValidationError unless J > 0, 0 < dwell <= 1, epsilon > 0 and
  /// every scale is positive.
  void validate() const;
};

struct Calibration {
  DetectionConfig config;
  std::map<Id, double> rms;
  /// Fraction of fault-free samples that would trigger under `config`.
  std::map<Id, double> false_trigger_rate;
};

/// Sets each residual's scale to max(fault-free RMS, epsilon), keeping the
/// thresholds and dwell of `base`. Throws ValidationError on empty traces.
Calibration calibrate(const Traces& fault_free, DetectionConfig base = {});

bool detect(std::span<const double> time, std::span<const double> residual, double scale, double threshold,
            double dwell_fraction, std::span<const TimeWindow> windows);

bool detect(const Traces& residuals, const Id& residual, const DetectionConfig& config,
            std::span<const TimeWindow> windows);

/// Runs every single-fault scenario and records which residuals trigger inside
/// the fault's active windows. Columns follow the system fault order; exactly
/// one scenario per fault is required.
Fsm empirical_fsm(std::span<const SimScenario> per_fault, std::span<const ResidualSpec> specs,
                  const DetectionConfig& config);

/// A fault-free nominal scenario plus the profile injected for each fault.
struct FaultCampaign {
  SimScenario nominal;
  std::vector<FaultProfile> faults;

  std::vector<SimScenario> scenarios() const;
};

struct CampaignResult {
  Calibration calibration;
  ResidualRun nominal;
  std::vector<ResidualRun> runs;  ///< one per fault, campaign order
  Fsm fsm;
};

/// Calibrates on the nominal run, then builds the empirical FSM.
CampaignResult run_campaign(const FaultCampaign& campaign, std::span<const ResidualSpec> specs,
                            const DetectionConfig& base = {});

}  // namespace fdi::sim
