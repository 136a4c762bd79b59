#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include <fdi/codec.hpp>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string command = std::string(FDI_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool contains(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("fdi_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Cli, FimOriginalRows) {
  const auto r = run("fim --bundled engine --rows original7");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "isolated: f_xth\n"));
}

TEST(Cli, FimAllRows) {
  const auto r = run("fim --bundled engine");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "isolated: f_Waf f_xth f_yTic f_ypic f_ypim\n"));
}

TEST(Cli, FimExampleIdentity) {
  const auto r = run("fim --bundled example");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "f1 X  .  .\nf2 .  X  .\nfu .  .  X\n"));
  EXPECT_TRUE(contains(r.out, "isolated: f1 f2 fu"));
}

TEST(Cli, FimRowCountAndBadSelection) {
  EXPECT_EQ(run("fim --bundled engine --rows 7").out, run("fim --bundled engine --rows original").out);
  EXPECT_EQ(run("fim --bundled engine --rows 0").code, 2);
  EXPECT_EQ(run("fim --bundled engine --rows original5").code, 2);
}

TEST(Cli, FimJsonIsDeterministic) {
  const auto a = run("--json fim --bundled engine");
  const auto b = run("fim --bundled engine --json");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(contains(a.out, "\"isolated\": ["));
}

TEST(Cli, FimCsvOutput) {
  const auto dir = scratch("fim_csv");
  EXPECT_EQ(run("--csv " + dir.string() + " fim --bundled example").code, 0);
  EXPECT_EQ(fdi::io::read_fim(dir / "fim.csv").size(), 3u);
  EXPECT_EQ(fdi::io::read_fsm(dir / "fsm.csv").num_residuals(), 3u);
  fs::remove_all(dir);
}

TEST(Cli, MalformedFileIsInputError) {
  const auto dir = scratch("malformed");
  fdi::io::write_text(dir / "bad.csv", "residual,f1,f2\nr1,1,0\nr2,1\n");
  EXPECT_EQ(run("fim " + (dir / "bad.csv").string()).code, 2);
  fdi::io::write_text(dir / "bad2.csv", "residual,f1\nr1,7\n");
  EXPECT_EQ(run("fim " + (dir / "bad2.csv").string()).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, UsageErrorsAreInputErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("fim").code, 2);
  EXPECT_EQ(run("fim --bundled nothing").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, TamperedBundleIsInputError) {
  const auto dir = scratch("tamper");
  fs::copy(FDI_DATA_SOURCE, dir);
  fdi::io::write_text(dir / "engine_fsm.csv", fdi::io::read_text(dir / "engine_fsm.csv") + "\n");
  const std::string command =
      "FDI_DATA_DIR=" + dir.string() + " " + FDI_CLI_PATH + " fim --bundled engine >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_EQ(run("fim --bundled engine").code, 0);
  fs::remove_all(dir);
}

TEST(Cli, EnumerateExample) {
  const auto r = run("enumerate --bundled example");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "attempted 2, feasible 2"));
  EXPECT_TRUE(contains(r.out, "y1_y2"));
  EXPECT_TRUE(contains(r.out, "y2_y1"));
}

TEST(Cli, EnumerateChain) {
  EXPECT_TRUE(contains(run("enumerate --chain 7").out, "attempted 441"));
  const auto one = run("enumerate --chain 1");
  EXPECT_TRUE(contains(one.out, "attempted 0"));
  EXPECT_EQ(one.code, 0);
}

TEST(Cli, EnumerateJson) {
  const auto a = run("--json enumerate --bundled example");
  EXPECT_EQ(a.out, run("--json enumerate --bundled example").out);
  EXPECT_TRUE(contains(a.out, "\"attempted\": 2"));
  EXPECT_TRUE(contains(a.out, "\"reoriented\": true"));
}

TEST(Cli, EnumerateInvalidModelIsInputError) {
  const auto dir = scratch("invalid_model");
  // x2 is measured but no equation solves it.
  fdi::io::write_text(dir / "m.json", R"({
  "knowns": ["u"], "unknowns": ["x1", "x2"], "faults": ["f1", "f2"],
  "equations": [
    {"id": "e1", "kind": "dynamic", "solves": "x1", "depends_on": ["u"], "faults": []},
    {"id": "e2", "kind": "static", "solves": null, "depends_on": ["x1", "u"], "faults": []},
    {"id": "e3", "kind": "measurement", "solves": "y1", "depends_on": ["x1"], "faults": ["f1"]},
    {"id": "e4", "kind": "measurement", "solves": "y2", "depends_on": ["x2"], "faults": ["f2"]}
  ],
  "sensors": [{"id": "y1", "equation": "e3", "measures": "x1"}, {"id": "y2", "equation": "e4", "measures": "x2"}]
})");
  EXPECT_EQ(run("enumerate " + (dir / "m.json").string()).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, SelectExampleChoosesR3) {
  const auto r = run("select --bundled example");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "chosen: r3\n"));
  EXPECT_TRUE(contains(r.out, "isolated: f1 f2 fu\n"));
}

TEST(Cli, SelectEngineEndState) {
  const auto r = run("select --bundled engine");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "isolated: f_Waf f_xth f_yTic f_ypic f_ypim\n"));
  const auto exact = run("select --bundled engine --exact");
  EXPECT_EQ(exact.code, 0);
  EXPECT_TRUE(contains(exact.out, "isolated: f_Waf f_xth f_yTic f_ypic f_ypim\n"));
}

TEST(Cli, SelectEmptyPool) {
  const auto dir = scratch("empty_pool");
  fdi::io::write_text(dir / "orig.csv", "residual,f1,f2,fu\nr1,1,0,1\nr2,0,1,1\n");
  const auto r = run("select --original " + (dir / "orig.csv").string());
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "chosen: (none)"));
  EXPECT_TRUE(contains(r.out, "isolated: f1 f2\n"));
  fs::remove_all(dir);
}

TEST(Cli, SimulateExampleMatchesStructure) {
  const auto r = run("simulate --bundled example");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "empirical FSM matches structural prediction: yes"));
  EXPECT_TRUE(contains(r.out, "fault fu: triggered r_y1 r_y2\n"));
}

TEST(Cli, SimulateHalvedStep) {
  const auto a = run("--json simulate --bundled example");
  const auto b = run("--json simulate --bundled example --step 0.005");
  EXPECT_EQ(b.code, 0);
  const auto cells = [](const std::string& s) { return s.substr(s.find("\"empirical\"")); };
  EXPECT_EQ(cells(a.out), cells(b.out));
}

TEST(Cli, SimulateJsonDeterministic) {
  EXPECT_EQ(run("--json --seed 5 simulate --bundled example").out,
            run("--json --seed 5 simulate --bundled example").out);
}

TEST(Cli, SimulatePlotData) {
  const auto dir = scratch("plot");
  EXPECT_EQ(run("simulate --bundled example --plot-data " + dir.string()).code, 0);
  for (const char* f : {"f1", "f2", "fu"}) {
    EXPECT_TRUE(fs::exists(dir / ("sim1_" + std::string(f) + ".csv")));
    EXPECT_TRUE(fs::exists(dir / ("sim2_" + std::string(f) + ".csv")));
  }
  const auto header = fdi::io::read_text(dir / "sim2_f1.csv").substr(0, 25);
  EXPECT_EQ(header.substr(0, header.find('\n')), "time,r_y1,r_y2,y2_y1");
  fs::remove_all(dir);
}

TEST(Cli, SimulateFaultFreeScenario) {
  const auto dir = scratch("fault_free");
  auto text = fdi::io::read_text(fs::path(FDI_DATA_SOURCE) / "example_scenario.json");
  const auto begin = text.find("\"faults\": [\n    {");
  const auto end = text.find("\"detection\"");
  text.replace(begin, end - begin, "\"faults\": [],\n  ");
  fdi::io::write_text(dir / "scenario.json", text);
  fs::copy(fs::path(FDI_DATA_SOURCE) / "example_model.json",
           dir / "model.json");
  const auto r = run("simulate " + (dir / "scenario.json").string() + " --model " + (dir / "model.json").string());
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "fault-free run"));
  EXPECT_TRUE(contains(r.out, "triggered: (none)"));
  fs::remove_all(dir);
}

TEST(Cli, SimulateDivergenceExitsOne) {
  const auto dir = scratch("diverge");
  auto text = fdi::io::read_text(fs::path(FDI_DATA_SOURCE) / "example_scenario.json");
  text.replace(text.find("\"x1\": -1.0"), 11, "\"x1\": 60.0");
  fdi::io::write_text(dir / "scenario.json", text);
  fs::copy(fs::path(FDI_DATA_SOURCE) / "example_model.json", dir / "model.json");
  const auto r = run("simulate " + (dir / "scenario.json").string() + " --model " + (dir / "model.json").string());
  EXPECT_EQ(r.code, 1);
  fs::remove_all(dir);
}

TEST(Cli, DiagnoseTable) {
  EXPECT_TRUE(contains(run("diagnose --bundled example --triggered r1,r2").out, "candidates: fu\n"));
  EXPECT_TRUE(contains(run("diagnose --bundled example --triggered r1,r3").out, "candidates: f1\n"));
  EXPECT_TRUE(contains(run("diagnose --bundled example --triggered r2,r3").out, "candidates: f2\n"));
}

TEST(Cli, DiagnoseEmptyAndUnknown) {
  const auto empty = run("diagnose --bundled example --triggered r1,r2,r3");
  EXPECT_EQ(empty.code, 1);
  EXPECT_TRUE(contains(empty.out, "candidates: (none)"));
  EXPECT_EQ(run("diagnose --bundled example --triggered r1 --exoneration").code, 1);
  EXPECT_EQ(run("diagnose --bundled example --triggered r1").code, 0);
  EXPECT_EQ(run("diagnose --bundled example --triggered r7").code, 2);
}

}  // namespace
