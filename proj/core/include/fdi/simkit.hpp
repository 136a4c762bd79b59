#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "fdi/fsm.hpp"
#include "fdi/structural.hpp"

namespace fdi::sim {

/// Affine combination of named states, inputs and fault signals.
struct LinearRule {
  std::map<Id, double> states;
  std::map<Id, double> inputs;
  std::map<Id, double> faults;
  double constant = 0.0;
};

/// x' = derivative, tied to the structural equation that solves `state`.
struct StateRule {
  Id state;
  Id equation;
  double initial = 0.0;
  LinearRule derivative;
};

/// y = state + fault, tied to the sensor's measurement equation.
struct OutputRule {
  Id sensor;
  Id equation;
  Id state;
  Id fault;  ///< empty when the sensor has no measurement fault
};

struct DynamicSystem {
  std::vector<StateRule> states;
  std::vector<Id> inputs;
  std::vector<Id> faults;
  std::vector<OutputRule> outputs;

  /// Throws ValidationError on duplicate names or references to undeclared
  /// states, inputs or faults.
  void validate() const;
};

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;  ///< exclusive
  bool contains(double t) const noexcept { return t >= start && t < end; }
};

/// Input waveform u(t).
struct Waveform {
  enum class Kind { kConstant, kStep, kSinusoid };
  Kind kind = Kind::kConstant;
  double value = 0.0;      ///< level (constant/step) or amplitude (sinusoid)
  double start = 0.0;      ///< step time, s
  double frequency = 0.0;  ///< rad/s
  double phase = 0.0;      ///< rad
  double offset = 0.0;     ///< added to the sinusoid

  double at(double t) const { return at(t, t); }
  /// Value at `t` with any switching decided at `gate_time`.
  double at(double t, double gate_time) const;
};

struct FaultShape {
  enum class Kind { kNone, kSinusoid, kStep };
  Kind kind = Kind::kNone;
  double amplitude = 0.0;  ///< sinusoid amplitude or step magnitude
  double frequency = 0.0;  ///< rad/s
  double phase = 0.0;      ///< rad
};

struct FaultProfile {
  Id fault;
  FaultShape shape;
  std::vector<TimeWindow> windows;

  bool injects() const noexcept { return shape.kind != FaultShape::Kind::kNone && !windows.empty(); }
  bool active_at(double t) const;
  double at(double t) const { return at(t, t); }
  double at(double t, double gate_time) const;
};

/// Zero-order-hold Gaussian measurement noise, redrawn every step.
struct MeasurementNoise {
  std::map<Id, double> stddev;  ///< per sensor
  std::uint64_t seed = 0;
};

struct SimScenario {
  DynamicSystem system;
  std::map<Id, Waveform> inputs;
  std::vector<FaultProfile> profiles;
  double horizon = 30.0;  ///< s
  double step = 0.01;     ///< s
  MeasurementNoise noise;

  /// Throws ValidationError; enforces the single-fault discipline.
  void validate() const;
  /// The injected fault, or nullptr for a fault-free scenario.
  const FaultProfile* active_profile() const;
};

/// Time-indexed signals sharing one time axis.
struct Traces {
  std::vector<double> time;
  std::vector<Id> names;
  std::vector<std::vector<double>> values;  ///< values[k] is the column of names[k]

  const std::vector<double>& column(std::string_view name) const;
  /// Columns of `other` appended; time axes must match.
  Traces merged(const Traces& other) const;
};

struct SimulationResult {
  Traces states;
  Traces outputs;  ///< measured, faults and noise included
  Traces faults;   ///< realized fault signals
};

inline constexpr std::string_view kResidualSignConvention = "r = y - y_hat";

struct ResidualRun {
  SimulationResult plant;
  Traces residuals;
  std::string_view sign_convention = kResidualSignConvention;
};

/// Fixed-step RK4 over [0, horizon]. The horizon is split at fault-window and
/// input-step boundaries so no step straddles a switch. Throws SimulationError
/// carrying the first time with a non-finite state.
SimulationResult simulate(const SimScenario& scenario);

/// Integrates the plant together with one open-loop observer per spec and
/// emits r = y - y_hat for each. Throws ConfigurationError when a spec uses an
/// equation without a dynamic rule, a re-oriented equation, or a state that is
/// neither estimated nor measured by an input sensor.
ResidualRun run_residuals(const SimScenario& scenario, std::span<const ResidualSpec> specs);

}  // namespace fdi::sim
