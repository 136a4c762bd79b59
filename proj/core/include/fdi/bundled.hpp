#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fdi/codec.hpp"
#include "fdi/fsm.hpp"
#include "fdi/structural.hpp"

namespace fdi::io {

/// Environment variable that overrides the bundled data directory.
inline constexpr const char* kDataDirEnv = "FDI_DATA_DIR";

struct FaultInfo {
  Id id;
  std::string description;
};

struct SensorInfo {
  Id id;
  std::string description;
  std::string unit;
};

struct ResidualInfo {
  Id id;
  std::string description;
};

/// Engine faults, measured sensors and original residuals, plus typeset
/// display names for residual and fault ids.
struct Catalog {
  std::vector<FaultInfo> faults;
  std::vector<SensorInfo> sensors;
  std::vector<ResidualInfo> residuals;
  std::map<Id, std::string> display_names;

  /// The display name for `id`, or `id` itself.
  std::string display(const Id& id) const;
};

/// A bundled FSM whose first `original_rows` rows are the default residuals;
/// the rest are additional residuals.
struct BundledFsm {
  Fsm fsm;
  std::size_t original_rows = 0;

  Fsm originals() const { return fsm.head(original_rows); }
  Fsm additional() const { return fsm.tail(original_rows); }
};

/// Read-only view of the bundled data directory. Every file is checked against
/// the SHA-256 manifest `SHA256SUMS` before it is parsed.
class Bundle {
 public:
  explicit Bundle(std::filesystem::path dir);

  /// `$FDI_DATA_DIR` when set, otherwise the source-tree data directory, otherwise
  /// the installed one.
  static std::filesystem::path default_dir();
  static Bundle locate() { return Bundle(default_dir()); }

  const std::filesystem::path& dir() const noexcept { return dir_; }

  /// File contents after checksum verification. Throws IntegrityError.
  std::string read_verified(std::string_view name) const;

  BundledFsm engine_fsm() const;
  BundledFsm example_fsm() const;
  StructuralModel example_model() const;
  ScenarioFile example_scenario() const;
  Catalog catalog() const;

 private:
  BundledFsm bundled_fsm(std::string_view name) const;

  std::filesystem::path dir_;
};

/// Table of 21 residuals x 11 engine faults.
Fsm load_engine_fsm();
StructuralModel load_example_model();
/// Residuals r1, r2, r3 over faults f1, f2, fu.
Fsm load_example_fsm();

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace fdi::io
