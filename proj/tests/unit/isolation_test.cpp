#include <gtest/gtest.h>

#include <fdi/errors.hpp>
#include <fdi/isolation.hpp>

#include "oracles.hpp"
#include "reference_tables.hpp"

namespace fdi {
namespace {

std::vector<Id> sorted(std::vector<Id> v) {
  std::sort(v.begin(), v.end());
  return v;
}

TEST(Isolation, OriginalEngineResidualsIsolateOnlyThrottleFault) {
  const auto fim = fsm_to_fim(reference::engine().head(reference::kEngineOriginalRows));
  EXPECT_EQ(isolated_faults(fim), (std::vector<Id>{"f_xth"}));
}

TEST(Isolation, AllEngineResidualsIsolateFiveFaults) {
  const auto fim = fsm_to_fim(reference::engine());
  EXPECT_EQ(sorted(isolated_faults(fim)), sorted(reference::engine_enhanced_isolated()));
}

TEST(Isolation, ExampleFimIsIdentity) {
  const auto fim = fsm_to_fim(reference::example());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(fim.at(i, j), i == j);
  }
}

TEST(Isolation, OriginalExampleResidualsCannotSeparateInputFault) {
  // r1 and r2 alone: supp(f1) and supp(f2) both sit inside supp(fu).
  const auto fim = fsm_to_fim(reference::example().head(2));
  EXPECT_TRUE(fim.at(0, 2));
  EXPECT_TRUE(fim.at(1, 2));
  EXPECT_FALSE(fim.at(2, 0));
  EXPECT_EQ(isolated_faults(fim), (std::vector<Id>{"f1", "f2"}));
}

TEST(Isolation, FimMatchesSubsetOracleOnEngine) {
  const auto fsm = reference::engine();
  EXPECT_EQ(fsm_to_fim(fsm).rows(), oracle::fim_cells(fsm));
}

TEST(Isolation, EmptySupportFaultIsDominatedByEveryFault) {
  const Fsm fsm({"r1"}, {"a", "b"}, {{true, false}});
  const auto fim = fsm_to_fim(fsm);
  EXPECT_TRUE(fim.at(1, 0));
  EXPECT_FALSE(fim.at(0, 1));
}

TEST(Diagnose, ExampleDiagnosisTable) {
  const auto fsm = reference::example();
  const std::vector<Id> r12{"r1", "r2"}, r13{"r1", "r3"}, r23{"r2", "r3"};
  EXPECT_EQ(diagnose(r12, fsm), (std::vector<Id>{"fu"}));
  EXPECT_EQ(diagnose(r13, fsm), (std::vector<Id>{"f1"}));
  EXPECT_EQ(diagnose(r23, fsm), (std::vector<Id>{"f2"}));
}

TEST(Diagnose, NoExonerationKeepsSupersets) {
  const auto fsm = reference::example();
  const std::vector<Id> r1{"r1"};
  EXPECT_EQ(diagnose(r1, fsm, Exoneration::kOff), (std::vector<Id>{"f1", "fu"}));
  EXPECT_TRUE(diagnose(r1, fsm, Exoneration::kOn).empty());
}

TEST(Diagnose, ExonerationRequiresExactSignature) {
  const auto fsm = reference::example();
  const std::vector<Id> r13{"r1", "r3"};
  EXPECT_EQ(diagnose(r13, fsm, Exoneration::kOn), (std::vector<Id>{"f1"}));
}

TEST(Diagnose, AllTriggeredLeavesNoSingleFault) {
  const std::vector<Id> all{"r1", "r2", "r3"};
  EXPECT_TRUE(diagnose(all, reference::example()).empty());
}

TEST(Diagnose, UnknownResidualRejected) {
  const std::vector<Id> bad{"r9"};
  EXPECT_THROW(diagnose(bad, reference::example()), ValidationError);
}

TEST(CandidateCount, MatchesFormula) {
  EXPECT_EQ(candidate_count(1), 0u);
  EXPECT_EQ(candidate_count(2), 2u);
  EXPECT_EQ(candidate_count(3), 9u);
  EXPECT_EQ(candidate_count(7), 441u);
}

TEST(CandidateCount, DomainLimits) {
  EXPECT_THROW(candidate_count(0), DomainError);
  EXPECT_NO_THROW(candidate_count(58));
  EXPECT_THROW(candidate_count(59), DomainError);
}

TEST(ImprovementScore, CountsSeparatedPairs) {
  const auto original = reference::example().head(2);
  const auto fim = fsm_to_fim(original);
  // r3 responds to f1, f2 and ignores fu: clears (f1, fu) and (f2, fu).
  EXPECT_EQ(improvement_score(fim, {true, true, false}), 2u);
  EXPECT_EQ(improvement_score(fim, {true, true, true}), 0u);
  EXPECT_EQ(improvement_score(fim, {false, false, false}), 0u);
}

TEST(ImprovementScore, LengthMismatch) {
  const auto fim = fsm_to_fim(reference::example());
  EXPECT_THROW(improvement_score(fim, {true}), ValidationError);
}

}  // namespace
}  // namespace fdi
