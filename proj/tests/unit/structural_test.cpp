#include <gtest/gtest.h>

#include <fdi/errors.hpp>
#include <fdi/isolation.hpp>
#include <fdi/structural.hpp>

#include "reference_tables.hpp"

namespace fdi {
namespace {

StructuralModel example_model() {
  StructuralModel m;
  m.knowns = {"u"};
  m.unknowns = {"x1", "x2"};
  m.faults = {"f1", "f2", "fu"};
  m.equations = {
      {"e1", "x1", {"u"}, {"fu"}, EquationKind::kDynamic},
      {"e2", "x2", {"x1"}, {}, EquationKind::kDynamic},
      {"e3", "y1", {"x1"}, {"f1"}, EquationKind::kMeasurement},
      {"e4", "y2", {"x2"}, {"f2"}, EquationKind::kMeasurement},
  };
  m.sensors = {{"y1", "e3", "x1"}, {"y2", "e4", "x2"}};
  return m;
}

ResidualSpec derive(const StructuralModel& m, const Id& target, std::vector<Id> inputs) {
  auto d = derive_residual(m, target, inputs);
  EXPECT_TRUE(std::holds_alternative<ResidualSpec>(d)) << target;
  return std::get<ResidualSpec>(d);
}

TEST(ResidualId, Scheme) {
  EXPECT_EQ(residual_id("y1", {}), "r_y1");
  const std::vector<Id> inputs{"Tic", "pic"};
  EXPECT_EQ(residual_id("Waf", inputs), "Waf_Tic.pic");
}

TEST(ValidateModel, ExampleIsClean) {
  const auto report = validate_model(example_model());
  EXPECT_TRUE(report.ok());
  EXPECT_TRUE(report.issues.empty());
}

TEST(ValidateModel, DuplicateEquationId) {
  auto m = example_model();
  m.equations.push_back(m.equations[1]);
  EXPECT_TRUE(validate_model(m).has(IssueKind::kDuplicateId));
  EXPECT_FALSE(validate_model(m).ok());
}

TEST(ValidateModel, UndeclaredFault) {
  auto m = example_model();
  m.equations[1].faults.insert("f9");
  EXPECT_TRUE(validate_model(m).has(IssueKind::kUndeclaredFault));
}

TEST(ValidateModel, UnusedFault) {
  auto m = example_model();
  m.faults.push_back("f9");
  EXPECT_TRUE(validate_model(m).has(IssueKind::kUnusedFault));
}

TEST(ValidateModel, SelfDependency) {
  auto m = example_model();
  m.equations[1].depends_on.insert("x2");
  EXPECT_TRUE(validate_model(m).has(IssueKind::kSelfDependency));
}

TEST(ValidateModel, UndeclaredVariable) {
  auto m = example_model();
  m.equations[1].depends_on.insert("z");
  EXPECT_TRUE(validate_model(m).has(IssueKind::kUndeclaredVariable));
}

TEST(ValidateModel, MeasurementOfTwoUnknowns) {
  auto m = example_model();
  m.equations[2].depends_on.insert("x2");
  EXPECT_TRUE(validate_model(m).has(IssueKind::kMalformedMeasurement));
}

TEST(ValidateModel, DuplicateAssignment) {
  auto m = example_model();
  m.equations.push_back({"e5", "x2", {"u"}, {}, EquationKind::kStatic});
  EXPECT_TRUE(validate_model(m).has(IssueKind::kDuplicateAssignment));
}

TEST(ValidateModel, UnsolvedUnknownIsError) {
  auto m = example_model();
  m.equations.erase(m.equations.begin());
  const auto report = validate_model(m);
  EXPECT_TRUE(report.has(IssueKind::kUnsolvedUnknown));
  EXPECT_FALSE(report.ok());
}

TEST(ValidateModel, UnreachableUnknownIsWarning) {
  auto m = example_model();
  m.unknowns.insert("x3");
  m.equations.push_back({"e5", "x3", {"u"}, {}, EquationKind::kDynamic});
  const auto report = validate_model(m);
  EXPECT_TRUE(report.has(IssueKind::kUnreachableUnknown));
  EXPECT_TRUE(report.ok());
}

TEST(ValidateModel, SensorOnNonMeasurement) {
  auto m = example_model();
  m.sensors[0].equation = "e1";
  EXPECT_TRUE(validate_model(m).has(IssueKind::kMalformedSensor));
}

TEST(Reroute, SensorBecomesKnownSignal) {
  const std::vector<Id> inputs{"y1"};
  const auto m = reroute_sensors(example_model(), inputs);
  EXPECT_TRUE(m.knowns.count("x1"));
  EXPECT_FALSE(m.unknowns.count("x1"));
  EXPECT_EQ(m.find_equation("e3"), nullptr);
  EXPECT_EQ(m.find_sensor("y1"), nullptr);
  ASSERT_EQ(m.substitutions.size(), 1u);
  EXPECT_EQ(m.substitutions[0].sensor, "y1");
  EXPECT_EQ(m.substitutions[0].variable, "x1");
  EXPECT_EQ(m.substitutions[0].faults, (std::set<Id>{"f1"}));
}

TEST(Reroute, UnknownSensorRejected) {
  const std::vector<Id> inputs{"y9"};
  EXPECT_THROW(reroute_sensors(example_model(), inputs), ValidationError);
}

TEST(Derive, OriginalResiduals) {
  const auto m = example_model();
  const auto specs = original_residuals(m);
  ASSERT_EQ(specs.size(), 2u);
  EXPECT_EQ(specs[0].id, "r_y1");
  EXPECT_EQ(specs[0].support, (std::set<Id>{"e1", "e3"}));
  EXPECT_EQ(specs[1].id, "r_y2");
  EXPECT_EQ(specs[1].support, (std::set<Id>{"e1", "e2", "e4"}));
  EXPECT_TRUE(specs[0].is_original());
}

TEST(Derive, ForwardDirectionUsesCausalAssignment) {
  const auto spec = derive(example_model(), "y2", {"y1"});
  EXPECT_EQ(spec.id, "y2_y1");
  EXPECT_EQ(spec.support, (std::set<Id>{"e2", "e4"}));
  ASSERT_EQ(spec.assignments.size(), 1u);
  EXPECT_EQ(spec.assignments[0], (Assignment{"e2", "x2", false}));
}

TEST(Derive, ReverseDirectionReorientsFreedEquation) {
  const auto m = example_model();
  const auto spec = derive(m, "y1", {"y2"});
  EXPECT_EQ(spec.id, "y1_y2");
  EXPECT_EQ(spec.support, (std::set<Id>{"e2", "e3"}));
  ASSERT_EQ(spec.assignments.size(), 1u);
  EXPECT_EQ(spec.assignments[0], (Assignment{"e2", "x1", true}));
  EXPECT_EQ(structural_signature(m, spec), (SignatureRow{true, true, false}));
}

TEST(Derive, TargetAmongInputsRejected) {
  const std::vector<Id> inputs{"y1"};
  EXPECT_THROW(derive_residual(example_model(), "y1", inputs), ValidationError);
}

TEST(Derive, UnknownTargetRejected) {
  EXPECT_THROW(derive_residual(example_model(), "y7", {}), ValidationError);
}

TEST(Derive, MissingEquationIsInfeasible) {
  auto m = example_model();
  m.equations.erase(m.equations.begin());
  const auto d = derive_residual(m, "y1", {});
  ASSERT_TRUE(std::holds_alternative<Infeasible>(d));
  EXPECT_EQ(std::get<Infeasible>(d).blocking_unknown, "x1");
}

TEST(Signature, ExampleMatchesReferenceTable) {
  const auto m = example_model();
  std::vector<ResidualSpec> specs = original_residuals(m);
  specs.push_back(derive(m, "y2", {"y1"}));
  const auto predicted = predicted_fsm(m, specs);
  EXPECT_EQ(predicted.fault_ids(), reference::example().fault_ids());
  EXPECT_EQ(predicted.rows(), reference::example().rows());
}

TEST(Signature, OriginsNameEquationsAndSensors) {
  const auto m = example_model();
  const auto origins = signature_origins(m, derive(m, "y2", {"y1"}));
  ASSERT_EQ(origins.size(), 2u);
  EXPECT_EQ(origins[0].fault, "f1");
  EXPECT_EQ(origins[0].origins, (std::vector<std::string>{"sensor:y1"}));
  EXPECT_EQ(origins[1].fault, "f2");
  EXPECT_EQ(origins[1].origins, (std::vector<std::string>{"equation:e4"}));
}

TEST(Enumerate, ExampleAttemptsTwo) {
  const auto en = enumerate_candidates(example_model());
  EXPECT_EQ(en.attempted(), 2u);
  EXPECT_EQ(en.feasible(), 2u);
  const auto c = en.candidates();
  EXPECT_EQ(c[0].id, "y1_y2");
  EXPECT_EQ(c[1].id, "y2_y1");
}

TEST(Enumerate, ChainCountsFollowFormula) {
  for (unsigned n = 1; n <= 7; ++n) {
    const auto en = enumerate_candidates(chain_model(n));
    EXPECT_EQ(en.attempted(), candidate_count(n)) << n;
  }
  EXPECT_EQ(enumerate_candidates(chain_model(7)).attempted(), 441u);
}

TEST(Enumerate, SubsetOrderIsBinaryCounter) {
  const auto c = enumerate_candidates(chain_model(3)).candidates();
  ASSERT_GE(c.size(), 3u);
  EXPECT_EQ(c[0].id, "y1_y2");
  EXPECT_EQ(c[1].id, "y1_y3");
  EXPECT_EQ(c[2].id, "y1_y2.y3");
}

TEST(Enumerate, ChainDownstreamSignature) {
  const auto m = chain_model(3);
  const auto spec = derive(m, "y3", {"y1"});
  EXPECT_EQ(spec.support, (std::set<Id>{"dx2", "dx3", "my3"}));
  // Faults: fu, fy1, fy2, fy3.
  EXPECT_EQ(structural_signature(m, spec), (SignatureRow{false, true, false, true}));
}

TEST(Enumerate, TooManySensors) { EXPECT_THROW(enumerate_candidates(chain_model(21)), DomainError); }

TEST(ChainModel, ZeroSensorsRejected) { EXPECT_THROW(chain_model(0), DomainError); }

}  // namespace
}  // namespace fdi
