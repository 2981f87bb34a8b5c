#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphbif/sphere_geometry.hpp"

namespace sphbif::cli {

enum Exit : int { ok = 0, validation_failure = 1, usage_error = 2, numerical_failure = 3 };

std::string tool_version();

/// One per output directory, written last as manifest.json.
struct RunManifest {
  std::string command;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  nlohmann::json tolerances = nlohmann::json::object();
  std::string tool_version;
  /// File names relative to the output directory, sorted.
  std::vector<std::string> outputs;
  double wall_time = 0.0;

  nlohmann::json to_json() const;
};

/// argv-style entry point (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Names accepted by `verify --suite`, including "all".
const std::vector<std::string>& suite_names();

struct SuiteOptions {
  std::uint64_t seed = 42;
  std::size_t budget = 10000;
  int threads = 1;
};

/// {"suite", "pass", "checks": [{name, value, tol, pass, gating}], "first_failure"}.
/// Writes violation CSVs into out_dir (if non-empty) and appends their names to files.
nlohmann::json run_suite(const std::string& name, const SuiteOptions& opts, const std::filesystem::path& out_dir,
                         std::vector<std::string>& files);

/// Geometric identities of the reflection about `pole` with radius lambda on S^n and
/// the double-transform identity for v: max errors and pass flags at tolerance tol.
nlohmann::json kelvin_identity_report(int n, Pole pole, double lambda, const std::function<double(double)>& v,
                                      double tol = 1e-12);

}  // namespace sphbif::cli
