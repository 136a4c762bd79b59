#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include <fdi/bundled.hpp>
#include <fdi/errors.hpp>

#include "example_system.hpp"
#include "reference_tables.hpp"

namespace fdi::io {
namespace {

namespace fs = std::filesystem;

class TempBundle : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fdi_bundle_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::copy(Bundle::default_dir(), dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

TEST(Bundle, EngineFsmIsReferenceTable) {
  const auto engine = Bundle::locate().engine_fsm();
  EXPECT_EQ(engine.fsm, reference::engine());
  EXPECT_EQ(engine.original_rows, reference::kEngineOriginalRows);
  EXPECT_EQ(engine.additional().num_residuals(), 14u);
}

TEST(Bundle, EngineRowsSpotCheck) {
  const auto fsm = load_engine_fsm();
  EXPECT_EQ(fsm.row(*fsm.residual_index("r_Waf")),
            (SignatureRow{true, true, true, true, true, true, false, false, false, false, true}));
  EXPECT_EQ(fsm.row(*fsm.residual_index("pim_Waf")),
            (SignatureRow{false, true, false, true, false, true, false, false, true, false, true}));
}

TEST(Bundle, ExampleFsmAndModel) {
  EXPECT_EQ(load_example_fsm(), reference::example());
  EXPECT_EQ(load_example_model(), example::model());
  EXPECT_EQ(Bundle::locate().example_fsm().original_rows, 2u);
}

TEST(Bundle, ExampleScenarioMatchesCodeBuiltCampaign) {
  const auto file = Bundle::locate().example_scenario();
  ScenarioFile expected;
  expected.campaign = example::campaign();
  expected.model = example::model();
  expected.residuals = {{"y1", {}}, {"y2", {}}, {"y2", {"y1"}}};
  EXPECT_EQ(scenario_to_json(file), scenario_to_json(expected));
}

TEST(Bundle, Catalog) {
  const auto c = Bundle::locate().catalog();
  EXPECT_EQ(c.faults.size(), 11u);
  EXPECT_EQ(c.sensors.size(), 7u);
  EXPECT_EQ(c.residuals.size(), 7u);
  EXPECT_EQ(c.display("no-such-id"), "no-such-id");
  for (const auto& f : c.faults) EXPECT_TRUE(reference::engine().fault_index(f.id).has_value()) << f.id;
  for (const auto& r : c.residuals) EXPECT_TRUE(reference::engine().residual_index(r.id).has_value()) << r.id;
}

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(TempBundle, CopyVerifies) { EXPECT_EQ(Bundle(dir_).engine_fsm().fsm, reference::engine()); }

TEST_F(TempBundle, TamperedFileRejected) {
  auto text = read_text(dir_ / "engine_fsm.csv");
  text[text.find("r_Tc,1") + 5] = '0';
  write_text(dir_ / "engine_fsm.csv", text);
  EXPECT_THROW(Bundle(dir_).engine_fsm(), IntegrityError);
  EXPECT_NO_THROW(Bundle(dir_).example_fsm());
}

TEST_F(TempBundle, MissingManifestRejected) {
  fs::remove(dir_ / "SHA256SUMS");
  EXPECT_THROW(Bundle(dir_).example_fsm(), IntegrityError);
}

TEST_F(TempBundle, MissingFileRejected) {
  fs::remove(dir_ / "example_model.json");
  EXPECT_THROW(Bundle(dir_).example_model(), IntegrityError);
}

TEST_F(TempBundle, EnvironmentOverride) {
  ::setenv(kDataDirEnv, dir_.c_str(), 1);
  EXPECT_EQ(Bundle::default_dir(), dir_);
  auto text = read_text(dir_ / "example_fsm.csv");
  text += "\n";
  write_text(dir_ / "example_fsm.csv", text);
  EXPECT_THROW(load_example_fsm(), IntegrityError);
  ::unsetenv(kDataDirEnv);
  EXPECT_NO_THROW(load_example_fsm());
}

}  // namespace
}  // namespace fdi::io
