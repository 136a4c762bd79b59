#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fdi/fsm.hpp"

namespace fdi {

enum class EquationKind { kDynamic, kStatic, kMeasurement };

/// One model relation with its causal assignment.
///
/// Dynamic equations are read with integral causality: `solves` is the state
/// being integrated and does not appear in `depends_on`. A measurement
/// equation solves the output estimate named after its sensor and depends on
/// exactly one unknown.
struct Equation {
  Id id;
  std::optional<Id> solves;
  std::set<Id> depends_on;
  std::set<Id> faults;
  EquationKind kind = EquationKind::kStatic;

  friend bool operator==(const Equation&, const Equation&) = default;
};

struct Sensor {
  Id id;
  Id equation;  ///< measurement equation
  Id measures;  ///< measured unknown

  friend bool operator==(const Sensor&, const Sensor&) = default;
};

/// Record left behind when a sensor signal replaces its measured unknown.
/// Any derivation consuming `variable` inherits `faults`.
struct SensorSubstitution {
  Id sensor;
  Id variable;
  std::set<Id> faults;

  friend bool operator==(const SensorSubstitution&, const SensorSubstitution&) = default;
};

struct StructuralModel {
  std::vector<Equation> equations;
  std::set<Id> unknowns;
  std::set<Id> knowns;
  std::vector<Sensor> sensors;
  std::vector<Id> faults;
  std::vector<SensorSubstitution> substitutions;

  const Equation* find_equation(const Id& id) const;
  const Sensor* find_sensor(const Id& id) const;
  /// Non-measurement equation causally assigned to `variable`, if any.
  const Equation* solver_of(const Id& variable) const;

  friend bool operator==(const StructuralModel&, const StructuralModel&) = default;
};

enum class IssueKind {
  kDuplicateId,
  kDuplicateAssignment,
  kUnsolvedUnknown,
  kUnreachableUnknown,
  kUndeclaredVariable,
  kSelfDependency,
  kUndeclaredFault,
  kUnusedFault,
  kMalformedMeasurement,
  kMalformedSensor,
};

enum class Severity { kError, kWarning };

struct Issue {
  IssueKind kind;
  Severity severity;
  Id subject;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool ok() const;
  bool has(IssueKind kind) const;
};

std::string to_string(IssueKind kind);
std::string to_string(EquationKind kind);

/// Checks the model invariants. Never throws; every finding goes into the report.
ValidationReport validate_model(const StructuralModel& model);

/// Treats the listed sensors as known signals: their measurement equations are
/// dropped, their measured unknowns move to the known set, and a substitution
/// record keeps the sensor's measurement faults. Throws ValidationError on an
/// unknown sensor id.
StructuralModel reroute_sensors(const StructuralModel& model, std::span<const Id> inputs);

/// How a support equation is used in a derivation. `reoriented` marks an
/// equation that was freed by rerouting and now solves a different unknown.
struct Assignment {
  Id equation;
  Id solves;
  bool reoriented = false;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct ResidualSpec {
  Id id;
  Id target;
  std::vector<Id> inputs;  ///< in model sensor order
  std::set<Id> support;
  /// Solving order from the target outwards; excludes the target's
  /// measurement equation.
  std::vector<Assignment> assignments;

  bool is_original() const noexcept { return inputs.empty(); }

  friend bool operator==(const ResidualSpec&, const ResidualSpec&) = default;
};

struct Infeasible {
  Id target;
  std::vector<Id> inputs;
  Id blocking_unknown;

  friend bool operator==(const Infeasible&, const Infeasible&) = default;
};

using Derivation = std::variant<ResidualSpec, Infeasible>;

/// `r_<target>` for an original residual, `<target>_<in1>.<in2>...` otherwise.
Id residual_id(const Id& target, std::span<const Id> inputs);

/// Backward-chains from the target's measured unknown through the rerouted
/// model until every leaf is a known signal.
///
/// Equations freed by rerouting (their assigned unknown is now measured) are
/// tried first and may be re-oriented onto another unknown they contain; the
/// causal assignment is the fallback. Returns Infeasible naming the first
/// unknown that has no usable equation. Throws ValidationError when the target
/// is unknown or listed among the inputs.
Derivation derive_residual(const StructuralModel& model, const Id& target, std::span<const Id> inputs);

/// Fault vector in model fault order: a fault is set when it enters a support
/// equation, the target's measurement, or the measurement of a consumed sensor.
SignatureRow structural_signature(const StructuralModel& model, const ResidualSpec& spec);

/// Where each fault of a structural signature comes from. Origins read
/// `equation:<id>` or `sensor:<id>`.
struct SignatureOrigin {
  Id fault;
  std::vector<std::string> origins;
};
std::vector<SignatureOrigin> signature_origins(const StructuralModel& model, const ResidualSpec& spec);

struct Enumeration {
  /// One entry per attempted (target, input subset) pair, in attempt order.
  std::vector<Derivation> attempts;

  std::size_t attempted() const noexcept { return attempts.size(); }
  std::size_t feasible() const;
  std::vector<ResidualSpec> candidates() const;
};

/// Tries every target sensor against every non-empty subset of the remaining
/// sensors. Targets follow sensor order; subsets follow a binary counter over
/// the remaining sensors (lowest bit = first remaining sensor).
Enumeration enumerate_candidates(const StructuralModel& model);

/// The original residual of every sensor, in sensor order.
std::vector<ResidualSpec> original_residuals(const StructuralModel& model);

Fsm predicted_fsm(const StructuralModel& model, std::span<const ResidualSpec> specs);

/// Synthetic cascade x_k' = -x_k + x_{k-1} (x_0 = u) with one sensor per state.
StructuralModel chain_model(unsigned sensors);

}  // namespace fdi
