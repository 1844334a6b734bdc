#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlac/error.hpp"
#include "nlac/harness.hpp"

namespace nlac::cli {

/// Flat JSON run configuration. Every key is optional; unknown keys are
/// rejected with ConfigInvalid naming the key.
struct RunConfig {
  std::vector<double> coefficients{0.0, 1.0, 0.0, -1.0};
  double coupling = -1.0;
  int nx = 0;  // 0: derived from hRatio * epsilon
  int ny = 0;
  double Lx = 1.0;
  double Ly = 1.0;
  double epsilon = 0.04;
  double dt = 0.0;  // 0: stability-limited default
  std::string scheme = "explicit";
  double tEnd = 0.0;
  int snapshotEvery = 0;
  InitialDataSpec data = StudySpec::default_data();
  double hRatio = 0.25;
  double M0 = 10.0;

  std::string study = "generation";
  std::vector<double> epsList{0.08, 0.04, 0.02};
  double eta = 0.2;
  double tProbe = -1.0;       // negative: half the motion horizon
  std::vector<double> times;  // empty: a quarter and half of the motion horizon
  std::string interfaceMethod = "auto";

  std::string pairMode = "generation";
  std::string negativeControl = "none";
  double d0 = 0.1;
  double etaMotion = 0.3;
  double cstarSafety = 1.25;
  int samplesPerAxis = 16;

  std::string outDir = "out";
  int workers = 1;

  static RunConfig from_json(const nlohmann::json& j);
  /// Everything except outDir and workers.
  nlohmann::json canonical() const;
  void validate() const;

  StudySpec study_spec() const;
  Grid2D grid() const;
};

/// 2 for configuration and model errors, 3 for numerical failures.
int exit_code(ErrorKind kind);

/// Parses argv, runs the subcommand and returns the process exit code:
/// 0 success, 1 failed criteria, 2 invalid configuration, 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nlac::cli
