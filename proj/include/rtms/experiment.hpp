#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rtms/config.hpp"
#include "rtms/grid.hpp"

namespace rtms {

/// Profile of two fields along one grid line, restricted to a window.
struct TraceComparison {
  int axis = 1;          // 1: along x2 at fixed x1; 2: along x1 at fixed x2
  double coord = 0.0;    // fixed coordinate (m)
  std::vector<double> position;
  std::vector<double> truth;
  std::vector<double> image;
  double amplitude_ratio = 0.0;  // L2(image) / L2(truth) over the window
  double correlation = 0.0;      // zero lag, normalized
};

/// Extracts the profiles on [lo, hi] of the free coordinate. Throws GeometryError when the
/// fixed coordinate is not on the grid or the window is empty.
TraceComparison compare_traces(const ScalarField& truth, const ScalarField& image, int axis, double coord,
                               double lo, double hi);

/// Binary 8-bit PGM with gray = 127.5 (1 + v / clip), clip being the given percentile of |v|.
void export_pgm(const ScalarField& f, const std::filesystem::path& path, double clip_percentile);

struct ManifestEntry {
  std::string path;
  std::string hash;  // FNV-1a, hex
};

struct ExperimentReport {
  std::vector<ManifestEntry> files;
  std::map<std::string, double> metrics;
};

enum class Stage {
  forward,   // models and surface gathers
  migrate,   // forward, reverse continuation and every imaging condition
  image,     // forward, reverse continuation and the configured condition only
  aperture,  // ray fields and predicted aperture, no wave simulation
  all,
};

const char* stage_name(Stage s) noexcept;

/// Runs the pipeline up to `stage` and exports its products.
/// Writes <prefix>_manifest.txt and <prefix>_metrics.txt next to the products.
/// Errors are rethrown with the failing stage prepended; InstabilityError keeps its step.
ExperimentReport run_experiment(const ExperimentConfig& cfg, Stage stage = Stage::all);

/// Constant-velocity plane-wave round trip on the configured reflectivity at c0.
ExperimentReport run_oracle(const ExperimentConfig& cfg);

/// key=value lines, keys sorted.
std::string format_metrics(const std::map<std::string, double>& m);

}  // namespace rtms
