#include "fdi/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "fdi/errors.hpp"

namespace fdi::sim {

namespace {

template <typename Container>
void require_declared(const std::map<Id, double>& terms, const Container& declared, const Id& owner,
                      const char* what) {
  for (const auto& [name, coef] : terms) {
    (void)coef;
    if (std::find(declared.begin(), declared.end(), name) == declared.end()) {
      throw ValidationError("rule for '" + owner + "' references undeclared " + what + " '" + name + "'");
    }
  }
}

}  // namespace

void DynamicSystem::validate() const {
  std::vector<Id> state_names;
  for (const auto& s : states) state_names.push_back(s.state);
  require_unique_ids(state_names, "state");
  require_unique_ids(inputs, "input");
  require_unique_ids(faults, "fault");
  for (const auto& s : states) {
    require_declared(s.derivative.states, state_names, s.state, "state");
    require_declared(s.derivative.inputs, inputs, s.state, "input");
    require_declared(s.derivative.faults, faults, s.state, "fault");
    if (!std::isfinite(s.initial)) throw ValidationError("initial value of '" + s.state + "' is not finite");
  }
  std::vector<Id> sensors;
  for (const auto& o : outputs) {
    sensors.push_back(o.sensor);
    if (std::find(state_names.begin(), state_names.end(), o.state) == state_names.end()) {
      throw ValidationError("output '" + o.sensor + "' measures undeclared state '" + o.state + "'");
    }
    if (!o.fault.empty() && std::find(faults.begin(), faults.end(), o.fault) == faults.end()) {
      throw ValidationError("output '" + o.sensor + "' references undeclared fault '" + o.fault + "'");
    }
  }
  require_unique_ids(sensors, "sensor");
}

double Waveform::at(double t, double gate_time) const {
  switch (kind) {
    case Kind::kConstant: return value;
    case Kind::kStep: return gate_time >= start ? value : 0.0;
    case Kind::kSinusoid: return offset + value * std::sin(frequency * t + phase);
  }
  return 0.0;
}

bool FaultProfile::active_at(double t) const {
  return std::any_of(windows.begin(), windows.end(), [&](const TimeWindow& w) { return w.contains(t); });
}

double FaultProfile::at(double t, double gate_time) const {
  if (!active_at(gate_time)) return 0.0;
  switch (shape.kind) {
    case FaultShape::Kind::kNone: return 0.0;
    case FaultShape::Kind::kStep: return shape.amplitude;
    case FaultShape::Kind::kSinusoid: return shape.amplitude * std::sin(shape.frequency * t + shape.phase);
  }
  return 0.0;
}

void SimScenario::validate() const {
  system.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon must be positive");
  if (!(step > 0.0) || step > horizon) throw ValidationError("step must be positive and no larger than the horizon");
  for (const auto& in : system.inputs) {
    if (!inputs.count(in)) throw ValidationError("no waveform given for input '" + in + "'");
  }
  for (const auto& [name, w] : inputs) {
    (void)w;
    if (std::find(system.inputs.begin(), system.inputs.end(), name) == system.inputs.end()) {
      throw ValidationError("waveform given for undeclared input '" + name + "'");
    }
  }
  std::set<Id> seen;
  std::size_t injecting = 0;
  for (const auto& p : profiles) {
    if (std::find(system.faults.begin(), system.faults.end(), p.fault) == system.faults.end()) {
      throw ValidationError("profile for undeclared fault '" + p.fault + "'");
    }
    if (!seen.insert(p.fault).second) throw ValidationError("two profiles for fault '" + p.fault + "'");
    auto windows = p.windows;
    std::sort(windows.begin(), windows.end(), [](auto& a, auto& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const auto& w = windows[i];
      if (!(w.start < w.end) || w.start < 0.0 || w.end > horizon) {
        throw ValidationError("fault window for '" + p.fault + "' must satisfy 0 <= start < end <= horizon");
      }
      if (i > 0 && w.start < windows[i - 1].end) {
        throw ValidationError("fault windows for '" + p.fault + "' overlap");
      }
    }
    if (p.injects()) ++injecting;
  }
  if (injecting > 1) throw ValidationError("scenario injects more than one fault; only single faults are supported");
  for (const auto& [sensor, sd] : noise.stddev) {
    if (!(sd >= 0.0)) throw ValidationError("noise level for '" + sensor + "' must be non-negative");
  }
}

const FaultProfile* SimScenario::active_profile() const {
  for (const auto& p : profiles) {
    if (p.injects()) return &p;
  }
  return nullptr;
}

const std::vector<double>& Traces::column(std::string_view name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return values[k];
  }
  throw ValidationError("no trace named '" + std::string(name) + "'");
}

Traces Traces::merged(const Traces& other) const {
  if (other.time != time) throw ValidationError("cannot merge traces with different time axes");
  Traces out = *this;
  out.names.insert(out.names.end(), other.names.begin(), other.names.end());
  out.values.insert(out.values.end(), other.values.begin(), other.values.end());
  return out;
}

namespace {

struct Term {
  enum class Source { kState, kOutput, kInput, kFault };
  Source source;
  std::size_t index;
  double coef;
};

/// Derivative of one integrated variable as a sum of linear terms.
struct Rhs {
  std::vector<Term> terms;
  double constant = 0.0;
};

struct Segment {
  double start;
  double end;
  std::size_t steps;
};

std::vector<Segment> segments_for(const SimScenario& sc) {
  std::vector<double> cuts{0.0, sc.horizon};
  for (const auto& p : sc.profiles) {
    for (const auto& w : p.windows) {
      cuts.push_back(w.start);
      cuts.push_back(w.end);
    }
  }
  for (const auto& [name, w] : sc.inputs) {
    (void)name;
    if (w.kind == Waveform::Kind::kStep && w.start > 0.0 && w.start < sc.horizon) cuts.push_back(w.start);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Segment> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(len / sc.step)));
    out.push_back({cuts[i], cuts[i + 1], steps});
  }
  return out;
}

/// Plant plus any number of observers, integrated as one vector.
class Engine {
 public:
  explicit Engine(const SimScenario& sc) : sc_(sc) {
    const auto& sys = sc.system;
    for (std::size_t i = 0; i < sys.states.size(); ++i) state_index_[sys.states[i].state] = i;
    for (std::size_t i = 0; i < sys.inputs.size(); ++i) input_index_[sys.inputs[i]] = i;
    for (std::size_t i = 0; i < sys.faults.size(); ++i) fault_index_[sys.faults[i]] = i;
    for (const auto& f : sys.faults) {
      auto it = std::find_if(sc.profiles.begin(), sc.profiles.end(), [&](const FaultProfile& p) { return p.fault == f; });
      profiles_.push_back(it == sc.profiles.end() ? nullptr : &*it);
    }
    for (const auto& in : sys.inputs) waveforms_.push_back(&sc.inputs.at(in));
    for (const auto& s : sys.states) {
      Rhs rhs;
      rhs.constant = s.derivative.constant;
      for (const auto& [n, c] : s.derivative.states) rhs.terms.push_back({Term::Source::kState, state_index_.at(n), c});
      for (const auto& [n, c] : s.derivative.inputs) rhs.terms.push_back({Term::Source::kInput, input_index_.at(n), c});
      for (const auto& [n, c] : s.derivative.faults) rhs.terms.push_back({Term::Source::kFault, fault_index_.at(n), c});
      rhs_.push_back(std::move(rhs));
      initial_.push_back(s.initial);
    }
    for (const auto& o : sys.outputs) {
      output_state_.push_back(state_index_.at(o.state));
      output_fault_.push_back(o.fault.empty() ? kNoFault : fault_index_.at(o.fault));
      auto it = sc.noise.stddev.find(o.sensor);
      noise_sd_.push_back(it == sc.noise.stddev.end() ? 0.0 : it->second);
    }
  }

  std::size_t plant_size() const { return sc_.system.states.size(); }
  std::size_t size() const { return rhs_.size(); }

  std::size_t add_variable(Rhs rhs, double initial) {
    rhs_.push_back(std::move(rhs));
    initial_.push_back(initial);
    return rhs_.size() - 1;
  }

  /// Calls `sample(t, z, y)` at t = 0 and after every step.
  void run(const std::function<void(double, const std::vector<double>&, const std::vector<double>&)>& sample) {
    std::vector<double> z = initial_;
    std::mt19937_64 rng(sc_.noise.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> noise(noise_sd_.size(), 0.0);
    auto draw = [&] {
      for (std::size_t k = 0; k < noise.size(); ++k) noise[k] = noise_sd_[k] > 0.0 ? noise_sd_[k] * normal(rng) : 0.0;
    };

    draw();
    std::vector<double> y(output_state_.size());
    measure(0.0, 0.0, z, noise, y);
    sample(0.0, z, y);

    std::vector<double> k1(z.size()), k2(z.size()), k3(z.size()), k4(z.size()), tmp(z.size());
    for (const auto& seg : segments_for(sc_)) {
      const double h = (seg.end - seg.start) / static_cast<double>(seg.steps);
      const double gate = 0.5 * (seg.start + seg.end);
      for (std::size_t i = 0; i < seg.steps; ++i) {
        const double t = seg.start + static_cast<double>(i) * h;
        derivative(t, gate, z, noise, k1);
        for (std::size_t j = 0; j < z.size(); ++j) tmp[j] = z[j] + 0.5 * h * k1[j];
        derivative(t + 0.5 * h, gate, tmp, noise, k2);
        for (std::size_t j = 0; j < z.size(); ++j) tmp[j] = z[j] + 0.5 * h * k2[j];
        derivative(t + 0.5 * h, gate, tmp, noise, k3);
        for (std::size_t j = 0; j < z.size(); ++j) tmp[j] = z[j] + h * k3[j];
        derivative(t + h, gate, tmp, noise, k4);
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

        const double t_next = i + 1 == seg.steps ? seg.end : seg.start + static_cast<double>(i + 1) * h;
        if (!std::all_of(z.begin(), z.end(), [](double v) { return std::isfinite(v); })) {
          throw SimulationError("state became non-finite", t_next);
        }
        draw();
        measure(t_next, t_next, z, noise, y);
        sample(t_next, z, y);
      }
    }
  }

  double fault_value(std::size_t f, double t, double gate) const {
    return profiles_[f] ? profiles_[f]->at(t, gate) : 0.0;
  }

  static constexpr std::size_t kNoFault = static_cast<std::size_t>(-1);

 private:
  void measure(double t, double gate, const std::vector<double>& z, const std::vector<double>& noise,
               std::vector<double>& y) const {
    for (std::size_t k = 0; k < y.size(); ++k) {
      y[k] = z[output_state_[k]] + noise[k];
      if (output_fault_[k] != kNoFault) y[k] += fault_value(output_fault_[k], t, gate);
    }
  }

  void derivative(double t, double gate, const std::vector<double>& z, const std::vector<double>& noise,
                  std::vector<double>& dz) const {
    std::vector<double> y(output_state_.size());
    measure(t, gate, z, noise, y);
    for (std::size_t v = 0; v < rhs_.size(); ++v) {
      double acc = rhs_[v].constant;
      for (const auto& term : rhs_[v].terms) {
        switch (term.source) {
          case Term::Source::kState: acc += term.coef * z[term.index]; break;
          case Term::Source::kOutput: acc += term.coef * y[term.index]; break;
          case Term::Source::kInput: acc += term.coef * waveforms_[term.index]->at(t, gate); break;
          case Term::Source::kFault: acc += term.coef * fault_value(term.index, t, gate); break;
        }
      }
      dz[v] = acc;
    }
  }

  const SimScenario& sc_;
  std::map<Id, std::size_t> state_index_;
  std::map<Id, std::size_t> input_index_;
  std::map<Id, std::size_t> fault_index_;
  std::vector<const FaultProfile*> profiles_;
  std::vector<const Waveform*> waveforms_;
  std::vector<Rhs> rhs_;
  std::vector<double> initial_;
  std::vector<std::size_t> output_state_;
  std::vector<std::size_t> output_fault_;
  std::vector<double> noise_sd_;
};

/// Where an observer takes its target estimate from.
struct CompiledObserver {
  std::size_t target_output;
  bool estimate_from_output;  ///< target state is itself measured by an input sensor
  std::size_t estimate_index;
};

std::size_t output_index(const DynamicSystem& sys, const Id& sensor) {
  for (std::size_t k = 0; k < sys.outputs.size(); ++k) {
    if (sys.outputs[k].sensor == sensor) return k;
  }
  throw ConfigurationError("no output rule for sensor '" + sensor + "'");
}

CompiledObserver compile(Engine& engine, const DynamicSystem& sys, const ResidualSpec& spec) {
  std::map<Id, std::size_t> estimated;  // state -> rule index in sys.states
  for (const auto& a : spec.assignments) {
    if (a.reoriented) {
      throw ConfigurationError("residual '" + spec.id + "' re-orients equation '" + a.equation +
                               "' (derivative causality), which the simulator cannot run");
    }
    auto it = std::find_if(sys.states.begin(), sys.states.end(), [&](const StateRule& r) { return r.equation == a.equation; });
    if (it == sys.states.end()) {
      throw ConfigurationError("residual '" + spec.id + "' needs equation '" + a.equation +
                               "', which has no dynamic rule in the system");
    }
    if (it->state != a.solves) {
      throw ConfigurationError("equation '" + a.equation + "' integrates '" + it->state + "' but the residual '" +
                               spec.id + "' uses it to solve '" + a.solves + "'");
    }
    estimated[a.solves] = static_cast<std::size_t>(it - sys.states.begin());
  }

  std::map<Id, std::size_t> measured;  // state -> output index of an input sensor
  for (const auto& in : spec.inputs) {
    const auto k = output_index(sys, in);
    measured.emplace(sys.outputs[k].state, k);
  }

  // Observer variables are appended in map order right after whatever the
  // engine already integrates.
  std::map<Id, std::size_t> var_of;
  std::size_t slot = engine.size();
  for (const auto& entry : estimated) var_of[entry.first] = slot++;

  for (const auto& [state, rule_index] : estimated) {
    const auto& rule = sys.states[rule_index];
    Rhs rhs;
    rhs.constant = rule.derivative.constant;
    for (const auto& [name, coef] : rule.derivative.states) {
      if (auto v = var_of.find(name); v != var_of.end()) {
        rhs.terms.push_back({Term::Source::kState, v->second, coef});
      } else if (auto m = measured.find(name); m != measured.end()) {
        rhs.terms.push_back({Term::Source::kOutput, m->second, coef});
      } else {
        throw ConfigurationError("residual '" + spec.id + "': state '" + name +
                                 "' is neither estimated nor measured by an input sensor");
      }
    }
    for (const auto& [name, coef] : rule.derivative.inputs) {
      auto pos = std::find(sys.inputs.begin(), sys.inputs.end(), name) - sys.inputs.begin();
      rhs.terms.push_back({Term::Source::kInput, static_cast<std::size_t>(pos), coef});
    }
    // Observers never see fault signals.
    engine.add_variable(std::move(rhs), rule.initial);
  }

  const auto target = output_index(sys, spec.target);
  const Id& target_state = sys.outputs[target].state;
  if (auto v = var_of.find(target_state); v != var_of.end()) return {target, false, v->second};
  if (auto m = measured.find(target_state); m != measured.end()) return {target, true, m->second};
  throw ConfigurationError("residual '" + spec.id + "' does not estimate the state measured by '" + spec.target + "'");
}

Traces make_traces(const std::vector<Id>& names) {
  Traces t;
  t.names = names;
  t.values.resize(names.size());
  return t;
}

}  // namespace

SimulationResult simulate(const SimScenario& scenario) {
  scenario.validate();
  Engine engine(scenario);
  const auto& sys = scenario.system;

  std::vector<Id> state_names, output_names;
  for (const auto& s : sys.states) state_names.push_back(s.state);
  for (const auto& o : sys.outputs) output_names.push_back(o.sensor);
  SimulationResult out{make_traces(state_names), make_traces(output_names), make_traces(sys.faults)};

  engine.run([&](double t, const std::vector<double>& z, const std::vector<double>& y) {
    for (auto* tr : {&out.states, &out.outputs, &out.faults}) tr->time.push_back(t);
    for (std::size_t k = 0; k < state_names.size(); ++k) out.states.values[k].push_back(z[k]);
    for (std::size_t k = 0; k < y.size(); ++k) out.outputs.values[k].push_back(y[k]);
    for (std::size_t f = 0; f < sys.faults.size(); ++f) out.faults.values[f].push_back(engine.fault_value(f, t, t));
  });
  return out;
}

ResidualRun run_residuals(const SimScenario& scenario, std::span<const ResidualSpec> specs) {
  scenario.validate();
  Engine engine(scenario);
  const auto& sys = scenario.system;

  std::vector<CompiledObserver> observers;
  std::vector<Id> residual_names;
  for (const auto& spec : specs) {
    observers.push_back(compile(engine, sys, spec));
    residual_names.push_back(spec.id);
  }
  require_unique_ids(residual_names, "residual");

  std::vector<Id> state_names, output_names;
  for (const auto& s : sys.states) state_names.push_back(s.state);
  for (const auto& o : sys.outputs) output_names.push_back(o.sensor);
  ResidualRun run;
  run.plant = {make_traces(state_names), make_traces(output_names), make_traces(sys.faults)};
  run.residuals = make_traces(residual_names);

  engine.run([&](double t, const std::vector<double>& z, const std::vector<double>& y) {
    auto& p = run.plant;
    for (auto* tr : {&p.states, &p.outputs, &p.faults, &run.residuals}) tr->time.push_back(t);
    for (std::size_t k = 0; k < state_names.size(); ++k) p.states.values[k].push_back(z[k]);
    for (std::size_t k = 0; k < y.size(); ++k) p.outputs.values[k].push_back(y[k]);
    for (std::size_t f = 0; f < sys.faults.size(); ++f) p.faults.values[f].push_back(engine.fault_value(f, t, t));
    for (std::size_t r = 0; r < observers.size(); ++r) {
      const auto& ob = observers[r];
      const double estimate = ob.estimate_from_output ? y[ob.estimate_index] : z[ob.estimate_index];
      run.residuals.values[r].push_back(y[ob.target_output] - estimate);
    }
  });
  return run;
}

}  // namespace fdi::sim
