#include "fdi/bundled.hpp"

#include <cstdlib>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <sstream>

#include "fdi/errors.hpp"

#ifndef FDI_SOURCE_DATA_DIR
#define FDI_SOURCE_DATA_DIR ""
#endif
#ifndef FDI_INSTALL_DATA_DIR
#define FDI_INSTALL_DATA_DIR ""
#endif

namespace fdi::io {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0x0f];
  }
  return out;
}

std::string Catalog::display(const Id& id) const {
  auto it = display_names.find(id);
  return it == display_names.end() ? id : it->second;
}

Bundle::Bundle(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path Bundle::default_dir() {
  if (const char* env = std::getenv(kDataDirEnv); env != nullptr && *env != '\0') return env;
  const std::filesystem::path source = FDI_SOURCE_DATA_DIR;
  if (!source.empty() && std::filesystem::exists(source / "SHA256SUMS")) return source;
  return FDI_INSTALL_DATA_DIR;
}

std::string Bundle::read_verified(std::string_view name) const {
  const auto manifest_path = dir_ / "SHA256SUMS";
  if (!std::filesystem::exists(manifest_path)) {
    throw IntegrityError("no checksum manifest in '" + dir_.string() + "'");
  }
  std::istringstream manifest(read_text(manifest_path));
  std::string expected;
  for (std::string line; std::getline(manifest, line);) {
    std::istringstream fields(line);
    std::string digest, file;
    fields >> digest >> file;
    if (file == name) {
      expected = digest;
      break;
    }
  }
  if (expected.empty()) throw IntegrityError("'" + std::string(name) + "' is not listed in the checksum manifest");

  const auto path = dir_ / name;
  if (!std::filesystem::exists(path)) throw IntegrityError("bundled file '" + path.string() + "' is missing");
  auto content = read_text(path);
  if (sha256_hex(content) != expected) {
    throw IntegrityError("checksum mismatch for bundled file '" + path.string() + "'");
  }
  return content;
}

BundledFsm Bundle::bundled_fsm(std::string_view name) const {
  const auto catalog = nlohmann::json::parse(read_verified("catalog.json"));
  BundledFsm out{fsm_from_csv(read_verified(name)), 0};
  out.original_rows = catalog.at("bundled_fsms").at(std::string(name)).at("original_rows").get<std::size_t>();
  if (out.original_rows > out.fsm.num_residuals()) {
    throw IntegrityError("catalog declares more original rows than '" + std::string(name) + "' holds");
  }
  return out;
}

BundledFsm Bundle::engine_fsm() const { return bundled_fsm("engine_fsm.csv"); }

BundledFsm Bundle::example_fsm() const { return bundled_fsm("example_fsm.csv"); }

StructuralModel Bundle::example_model() const { return model_from_json(read_verified("example_model.json")); }

ScenarioFile Bundle::example_scenario() const {
  auto scenario = scenario_from_json(read_verified("example_scenario.json"));
  // The bundled scenario refers to the bundled model by name; load it verified.
  if (!scenario.model) scenario.model = example_model();
  return scenario;
}

Catalog Bundle::catalog() const {
  const auto doc = nlohmann::json::parse(read_verified("catalog.json"));
  Catalog c;
  for (const auto& f : doc.at("faults")) {
    c.faults.push_back({f.at("id").get<std::string>(), f.at("description").get<std::string>()});
  }
  for (const auto& s : doc.at("sensors")) {
    c.sensors.push_back(
        {s.at("id").get<std::string>(), s.at("description").get<std::string>(), s.at("unit").get<std::string>()});
  }
  for (const auto& r : doc.at("residuals")) {
    c.residuals.push_back({r.at("id").get<std::string>(), r.at("description").get<std::string>()});
  }
  for (const auto& [id, name] : doc.at("display_names").items()) c.display_names[id] = name.get<std::string>();
  return c;
}

Fsm load_engine_fsm() { return Bundle::locate().engine_fsm().fsm; }

StructuralModel load_example_model() { return Bundle::locate().example_model(); }

Fsm load_example_fsm() { return Bundle::locate().example_fsm().fsm; }

}  // namespace fdi::io
