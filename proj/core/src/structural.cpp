#include "fdi/structural.hpp"

#include <algorithm>
#include <map>

#include "fdi/errors.hpp"

namespace fdi {

const Equation* StructuralModel::find_equation(const Id& id) const {
  auto it = std::find_if(equations.begin(), equations.end(), [&](const Equation& e) { return e.id == id; });
  return it == equations.end() ? nullptr : &*it;
}

const Sensor* StructuralModel::find_sensor(const Id& id) const {
  auto it = std::find_if(sensors.begin(), sensors.end(), [&](const Sensor& s) { return s.id == id; });
  return it == sensors.end() ? nullptr : &*it;
}

const Equation* StructuralModel::solver_of(const Id& variable) const {
  for (const auto& e : equations) {
    if (e.kind != EquationKind::kMeasurement && e.solves == variable) return &e;
  }
  return nullptr;
}

bool ValidationReport::ok() const {
  return std::none_of(issues.begin(), issues.end(), [](const Issue& i) { return i.severity == Severity::kError; });
}

bool ValidationReport::has(IssueKind kind) const {
  return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.kind == kind; });
}

std::string to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::kDuplicateId: return "duplicate-id";
    case IssueKind::kDuplicateAssignment: return "duplicate-assignment";
    case IssueKind::kUnsolvedUnknown: return "unsolved-unknown";
    case IssueKind::kUnreachableUnknown: return "unreachable-unknown";
    case IssueKind::kUndeclaredVariable: return "undeclared-variable";
    case IssueKind::kSelfDependency: return "self-dependency";
    case IssueKind::kUndeclaredFault: return "undeclared-fault";
    case IssueKind::kUnusedFault: return "unused-fault";
    case IssueKind::kMalformedMeasurement: return "malformed-measurement";
    case IssueKind::kMalformedSensor: return "malformed-sensor";
  }
  return "unknown";
}

std::string to_string(EquationKind kind) {
  switch (kind) {
    case EquationKind::kDynamic: return "dynamic";
    case EquationKind::kStatic: return "static";
    case EquationKind::kMeasurement: return "measurement";
  }
  return "unknown";
}

namespace {

class Reporter {
 public:
  void error(IssueKind kind, const Id& subject, std::string message) {
    report_.issues.push_back({kind, Severity::kError, subject, std::move(message)});
  }
  void warning(IssueKind kind, const Id& subject, std::string message) {
    report_.issues.push_back({kind, Severity::kWarning, subject, std::move(message)});
  }
  ValidationReport take() { return std::move(report_); }

 private:
  ValidationReport report_;
};

template <typename Range, typename Key>
void check_unique(Reporter& out, const Range& items, Key key, const char* what) {
  std::set<Id> seen;
  for (const auto& item : items) {
    const Id& id = key(item);
    if (!seen.insert(id).second) out.error(IssueKind::kDuplicateId, id, std::string("duplicate ") + what + " id");
  }
}

}  // namespace

ValidationReport validate_model(const StructuralModel& model) {
  Reporter out;
  check_unique(out, model.equations, [](const Equation& e) -> const Id& { return e.id; }, "equation");
  check_unique(out, model.sensors, [](const Sensor& s) -> const Id& { return s.id; }, "sensor");
  check_unique(out, model.faults, [](const Id& f) -> const Id& { return f; }, "fault");
  for (const auto& v : model.unknowns) {
    if (model.knowns.count(v)) out.error(IssueKind::kDuplicateId, v, "variable is both known and unknown");
  }

  const std::set<Id> fault_set(model.faults.begin(), model.faults.end());
  std::map<Id, Id> assigned;  // unknown -> equation
  std::set<Id> required;
  std::set<Id> used_faults;

  for (const auto& e : model.equations) {
    for (const auto& f : e.faults) {
      used_faults.insert(f);
      if (!fault_set.count(f)) out.error(IssueKind::kUndeclaredFault, e.id, "fault '" + f + "' is not declared");
    }
    for (const auto& v : e.depends_on) {
      if (model.unknowns.count(v)) {
        required.insert(v);
      } else if (!model.knowns.count(v)) {
        out.error(IssueKind::kUndeclaredVariable, e.id, "variable '" + v + "' is neither known nor unknown");
      }
    }
    if (e.solves && e.depends_on.count(*e.solves)) {
      out.error(IssueKind::kSelfDependency, e.id, "equation depends on the variable it solves");
    }

    if (e.kind == EquationKind::kMeasurement) {
      const Sensor* owner = e.solves ? model.find_sensor(*e.solves) : nullptr;
      if (owner == nullptr || owner->equation != e.id) {
        out.error(IssueKind::kMalformedMeasurement, e.id, "measurement equation must solve its sensor's output");
      }
      const auto unknown_deps =
          std::count_if(e.depends_on.begin(), e.depends_on.end(), [&](const Id& v) { return model.unknowns.count(v) > 0; });
      if (unknown_deps != 1) {
        out.error(IssueKind::kMalformedMeasurement, e.id, "measurement equation must depend on exactly one unknown");
      }
      continue;
    }
    if (!e.solves) continue;
    if (!model.unknowns.count(*e.solves)) {
      out.error(IssueKind::kUndeclaredVariable, e.id, "solves '" + *e.solves + "', which is not an unknown");
      continue;
    }
    auto [it, fresh] = assigned.emplace(*e.solves, e.id);
    if (!fresh) {
      out.error(IssueKind::kDuplicateAssignment, *e.solves,
                "solved by both '" + it->second + "' and '" + e.id + "'");
    }
  }

  for (const auto& s : model.sensors) {
    const Equation* e = model.find_equation(s.equation);
    if (e == nullptr || e->kind != EquationKind::kMeasurement) {
      out.error(IssueKind::kMalformedSensor, s.id, "sensor equation '" + s.equation + "' is not a measurement");
    } else if (!e->depends_on.count(s.measures)) {
      out.error(IssueKind::kMalformedSensor, s.id, "measurement equation does not involve '" + s.measures + "'");
    }
    if (!model.unknowns.count(s.measures)) {
      out.error(IssueKind::kMalformedSensor, s.id, "measured variable '" + s.measures + "' is not an unknown");
    }
    required.insert(s.measures);
  }
  for (const auto& sub : model.substitutions) used_faults.insert(sub.faults.begin(), sub.faults.end());

  for (const auto& f : model.faults) {
    if (!used_faults.count(f)) out.error(IssueKind::kUnusedFault, f, "fault does not enter any equation");
  }

  // Unknowns reachable by backward chaining from the sensors.
  std::set<Id> reached;
  std::vector<Id> stack;
  for (const auto& s : model.sensors) stack.push_back(s.measures);
  while (!stack.empty()) {
    Id v = stack.back();
    stack.pop_back();
    if (!model.unknowns.count(v) || !reached.insert(v).second) continue;
    if (const Equation* e = model.solver_of(v)) {
      for (const auto& d : e->depends_on) stack.push_back(d);
    }
  }

  for (const auto& v : model.unknowns) {
    if (!assigned.count(v)) {
      if (required.count(v)) {
        out.error(IssueKind::kUnsolvedUnknown, v, "no equation is assigned to solve this unknown");
      } else {
        out.warning(IssueKind::kUnsolvedUnknown, v, "unknown is never solved (and never used)");
      }
    }
    if (!reached.count(v)) {
      out.warning(IssueKind::kUnreachableUnknown, v, "unknown does not influence any sensor");
    }
  }
  return out.take();
}

namespace {

std::vector<Id> canonical_inputs(const StructuralModel& model, std::span<const Id> inputs) {
  for (const auto& id : inputs) {
    if (model.find_sensor(id) == nullptr) throw ValidationError("unknown sensor '" + id + "'");
  }
  std::vector<Id> ordered;
  for (const auto& s : model.sensors) {
    if (std::find(inputs.begin(), inputs.end(), s.id) != inputs.end()) ordered.push_back(s.id);
  }
  return ordered;
}

}  // namespace

StructuralModel reroute_sensors(const StructuralModel& model, std::span<const Id> inputs) {
  const auto rerouted = canonical_inputs(model, inputs);
  StructuralModel out = model;
  for (const auto& sensor_id : rerouted) {
    const Sensor sensor = *out.find_sensor(sensor_id);
    std::set<Id> faults;
    if (const Equation* e = out.find_equation(sensor.equation)) faults = e->faults;
    std::erase_if(out.equations, [&](const Equation& e) { return e.id == sensor.equation; });
    std::erase_if(out.sensors, [&](const Sensor& s) { return s.id == sensor.id; });
    if (out.unknowns.erase(sensor.measures) > 0) out.knowns.insert(sensor.measures);
    out.substitutions.push_back({sensor.id, sensor.measures, std::move(faults)});
  }
  return out;
}

Id residual_id(const Id& target, std::span<const Id> inputs) {
  if (inputs.empty()) return "r_" + target;
  Id id = target + "_";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i) id += '.';
    id += inputs[i];
  }
  return id;
}

namespace {

/// Backtracking search for an assignment covering every unknown the target
/// estimate needs.
class Deriver {
 public:
  Deriver(const StructuralModel& original, const StructuralModel& rerouted) : model_(rerouted) {
    for (const auto& e : rerouted.equations) {
      if (e.kind == EquationKind::kMeasurement || !e.solves) continue;
      if (rerouted.knowns.count(*e.solves) && !original.knowns.count(*e.solves)) freed_.push_back(&e);
    }
  }

  bool solve(const Id& variable) {
    if (model_.knowns.count(variable) || state_.assigned.count(variable)) return true;
    if (!model_.unknowns.count(variable)) return fail(variable);

    struct Option {
      const Equation* eq;
      bool reoriented;
    };
    std::vector<Option> options;
    for (const Equation* e : freed_) {
      if (!state_.used.count(e->id) && e->depends_on.count(variable)) options.push_back({e, true});
    }
    if (const Equation* e = model_.solver_of(variable); e && !state_.used.count(e->id)) {
      options.push_back({e, false});
    }
    if (options.empty()) return fail(variable);

    for (const auto& opt : options) {
      const State saved = state_;
      state_.used.insert(opt.eq->id);
      state_.assigned.insert(variable);
      state_.order.push_back({opt.eq->id, variable, opt.reoriented});

      std::set<Id> deps = opt.eq->depends_on;
      if (opt.reoriented) {
        deps.erase(variable);
        deps.insert(*opt.eq->solves);
      }
      const bool ok = std::all_of(deps.begin(), deps.end(), [&](const Id& d) { return solve(d); });
      if (ok) return true;
      state_ = saved;
    }
    return false;
  }

  const std::vector<Assignment>& assignments() const { return state_.order; }
  const Id& blocking() const { return blocking_; }

 private:
  struct State {
    std::set<Id> used;
    std::set<Id> assigned;
    std::vector<Assignment> order;
  };

  bool fail(const Id& variable) {
    if (blocking_.empty()) blocking_ = variable;
    return false;
  }

  const StructuralModel& model_;
  std::vector<const Equation*> freed_;
  State state_;
  Id blocking_;
};

}  // namespace

Derivation derive_residual(const StructuralModel& model, const Id& target, std::span<const Id> inputs) {
  const Sensor* sensor = model.find_sensor(target);
  if (sensor == nullptr) throw ValidationError("unknown target sensor '" + target + "'");
  if (std::find(inputs.begin(), inputs.end(), target) != inputs.end()) {
    throw ValidationError("target sensor '" + target + "' cannot also be an input");
  }
  auto ordered = canonical_inputs(model, inputs);
  const auto rerouted = reroute_sensors(model, ordered);

  Deriver deriver(model, rerouted);
  if (!deriver.solve(sensor->measures)) return Infeasible{target, ordered, deriver.blocking()};

  ResidualSpec spec;
  spec.id = residual_id(target, ordered);
  spec.target = target;
  spec.inputs = std::move(ordered);
  spec.assignments = deriver.assignments();
  spec.support.insert(sensor->equation);
  for (const auto& a : spec.assignments) spec.support.insert(a.equation);
  return spec;
}

std::vector<SignatureOrigin> signature_origins(const StructuralModel& model, const ResidualSpec& spec) {
  std::map<Id, std::vector<std::string>> origins;
  for (const auto& eq_id : spec.support) {
    const Equation* e = model.find_equation(eq_id);
    if (e == nullptr) throw ValidationError("support equation '" + eq_id + "' is not in the model");
    for (const auto& f : e->faults) origins[f].push_back("equation:" + eq_id);
  }
  for (const auto& in : spec.inputs) {
    const Sensor* s = model.find_sensor(in);
    if (s == nullptr) throw ValidationError("input sensor '" + in + "' is not in the model");
    if (const Equation* e = model.find_equation(s->equation)) {
      for (const auto& f : e->faults) origins[f].push_back("sensor:" + in);
    }
  }
  std::vector<SignatureOrigin> out;
  for (const auto& f : model.faults) {
    if (auto it = origins.find(f); it != origins.end()) out.push_back({f, it->second});
  }
  return out;
}

SignatureRow structural_signature(const StructuralModel& model, const ResidualSpec& spec) {
  SignatureRow row(model.faults.size(), false);
  for (const auto& origin : signature_origins(model, spec)) {
    auto it = std::find(model.faults.begin(), model.faults.end(), origin.fault);
    row[static_cast<std::size_t>(it - model.faults.begin())] = true;
  }
  return row;
}

std::size_t Enumeration::feasible() const {
  return static_cast<std::size_t>(std::count_if(attempts.begin(), attempts.end(), [](const Derivation& d) {
    return std::holds_alternative<ResidualSpec>(d);
  }));
}

std::vector<ResidualSpec> Enumeration::candidates() const {
  std::vector<ResidualSpec> out;
  for (const auto& d : attempts) {
    if (const auto* spec = std::get_if<ResidualSpec>(&d)) out.push_back(*spec);
  }
  return out;
}

inline constexpr std::size_t kMaxEnumeratedSensors = 20;

Enumeration enumerate_candidates(const StructuralModel& model) {
  const std::size_t n = model.sensors.size();
  if (n > kMaxEnumeratedSensors) {
    throw DomainError("candidate enumeration is limited to " + std::to_string(kMaxEnumeratedSensors) + " sensors");
  }
  Enumeration out;
  if (n < 2) return out;
  out.attempts.reserve(n * ((std::size_t{1} << (n - 1)) - 1));
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<Id> others;
    for (std::size_t s = 0; s < n; ++s) {
      if (s != t) others.push_back(model.sensors[s].id);
    }
    const std::uint64_t combos = std::uint64_t{1} << others.size();
    for (std::uint64_t mask = 1; mask < combos; ++mask) {
      std::vector<Id> inputs;
      for (std::size_t b = 0; b < others.size(); ++b) {
        if (mask & (std::uint64_t{1} << b)) inputs.push_back(others[b]);
      }
      out.attempts.push_back(derive_residual(model, model.sensors[t].id, inputs));
    }
  }
  return out;
}

std::vector<ResidualSpec> original_residuals(const StructuralModel& model) {
  std::vector<ResidualSpec> out;
  for (const auto& s : model.sensors) {
    auto d = derive_residual(model, s.id, {});
    if (const auto* bad = std::get_if<Infeasible>(&d)) {
      throw ValidationError("original residual for '" + s.id + "' is infeasible: '" + bad->blocking_unknown +
                            "' has no solving equation");
    }
    out.push_back(std::get<ResidualSpec>(std::move(d)));
  }
  return out;
}

Fsm predicted_fsm(const StructuralModel& model, std::span<const ResidualSpec> specs) {
  std::vector<Id> ids;
  std::vector<SignatureRow> rows;
  for (const auto& spec : specs) {
    ids.push_back(spec.id);
    rows.push_back(structural_signature(model, spec));
  }
  return Fsm(std::move(ids), model.faults, rows);
}

StructuralModel chain_model(unsigned sensors) {
  if (sensors == 0) throw DomainError("chain model needs at least one sensor");
  StructuralModel m;
  m.knowns = {"u"};
  m.faults.push_back("fu");
  for (unsigned k = 1; k <= sensors; ++k) {
    const auto x = "x" + std::to_string(k);
    const auto y = "y" + std::to_string(k);
    const Id upstream = k == 1 ? Id("u") : "x" + std::to_string(k - 1);
    m.unknowns.insert(x);
    Equation dyn{"dx" + std::to_string(k), x, {upstream}, {}, EquationKind::kDynamic};
    if (k == 1) dyn.faults.insert("fu");
    m.equations.push_back(std::move(dyn));
    m.faults.push_back("f" + y);
    m.equations.push_back({"m" + y, y, {x}, {"f" + y}, EquationKind::kMeasurement});
    m.sensors.push_back({y, "m" + y, x});
  }
  return m;
}

}  // namespace fdi
