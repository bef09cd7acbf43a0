#pragma once

#include <filesystem>

#include "damplab/config.hpp"
#include "damplab/manifest.hpp"

namespace damplab {

struct RunOptions {
  /// Worker threads; 0 = hardware concurrency.
  unsigned jobs = 1;
  /// Overrides config.out when nonempty.
  std::filesystem::path out_dir;
};

/// Runs the experiment, writes its files and the manifest (last), and returns
/// the manifest. Per-point failures are recorded in the outputs and fail a
/// manifest check instead of aborting the run.
///
///   resolvent-sweep, esmall-probe: points.csv, fit.json, norm_vs_q.svg
///   decay-run:                     energy.csv, fit.json, energy_vs_t.svg, metadata.json
///   lemma-certify:                 lemmas.csv, trend.json, ratio_vs_q.svg
RunManifest run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Tool version string baked in at build time.
std::string tool_version();

}  // namespace damplab
