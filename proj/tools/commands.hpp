#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fdi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitEmpty = 1;
inline constexpr int kExitInput = 2;

struct GlobalOptions {
  bool json = false;
  std::string csv_dir;
  std::optional<std::uint64_t> seed;
};

struct FimOptions {
  std::string file;
  std::string bundled;
  std::string rows = "all";
};

struct EnumerateOptions {
  std::string file;
  std::string bundled;
  std::optional<unsigned> chain;
};

struct SelectOptions {
  std::string bundled;
  std::string original;
  std::string pool;
  bool exact = false;
};

struct SimulateOptions {
  std::string file;
  std::string bundled;
  std::string model;
  std::optional<double> step;
  std::string plot_data;
};

struct DiagnoseOptions {
  std::string file;
  std::string bundled;
  std::vector<std::string> triggered;
  bool exoneration = false;
};

// Each command writes its report to stdout and returns the process exit code.
// Library errors propagate to the caller.
int run_fim(const GlobalOptions& global, const FimOptions& options);
int run_enumerate(const GlobalOptions& global, const EnumerateOptions& options);
int run_select(const GlobalOptions& global, const SelectOptions& options);
int run_simulate(const GlobalOptions& global, const SimulateOptions& options);
int run_diagnose(const GlobalOptions& global, const DiagnoseOptions& options);

}  // namespace fdi::cli
