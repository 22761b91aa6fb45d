#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rtms/grid.hpp"
#include "rtms/model.hpp"
#include "rtms/raytools.hpp"

namespace rtms {

enum class VelocityKind { gradient, lens };
enum class BornMode { nonlinear, linearized };
enum class ImagingCondition { ratio, excitation, xcorr_baseline };

struct VelocitySpec {
  VelocityKind kind = VelocityKind::gradient;
  double c0 = 2000.0;       // m/s at x2 = 0
  double gradient = 0.0;    // 1/s
  Vec2 lens_center{};
  double lens_radius = 1.0;
  double lens_delta = 0.0;  // m/s
};

/// Receivers sit on every grid column of the surface row between x1_min and x1_max.
struct AcquisitionSpec {
  double x1_min = 0.0;
  double x1_max = 0.0;
  double taper_fraction = 0.1;
  double grazing_delta = 0.1;
  bool mute = false;
  double mute_window = 0.05;  // s after the predicted direct arrival

  ArraySpec array() const noexcept { return {x1_min, x1_max, taper_fraction, grazing_delta}; }
};

struct TraceSpec {
  std::string name;
  int axis = 1;        // 1: profile along x2 at fixed x1; 2: profile along x1 at fixed x2
  double coord = 0.0;  // the fixed coordinate (m)
  double lo = 0.0;     // window along the profile (m)
  double hi = 0.0;
};

struct NamedPacket {
  std::string name;
  WavePacketSpec spec;
};

struct NamedReflector {
  std::string name;
  ReflectorSpec spec;
};

struct ExperimentConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this

  Grid2D grid;
  VelocitySpec velocity;

  std::vector<NamedPacket> packets;
  std::vector<NamedReflector> reflectors;
  std::filesystem::path contrast_file;  // optional explicit r(x) field
  double min_depth = 50.0;

  Vec2 source{};
  double peak_frequency = 10.0;  // Hz
  double source_delay = -1.0;    // s; negative selects 1.5 / peak_frequency

  double dt = 0.001;
  std::size_t nt = 1000;
  std::size_t dft_stride = 1;

  std::size_t sponge_width = 50;
  double sponge_strength = 0.0015;

  AcquisitionSpec acquisition;

  double f_lo = 3.0;
  double f_hi = 25.0;
  std::size_t nfreq = 32;
  double band_ramp = 0.2;  // fraction of the band used by each cosine ramp of the imaging band
  double epsilon = 1e-4;
  ImagingCondition condition = ImagingCondition::ratio;
  BornMode born = BornMode::nonlinear;
  bool force = false;

  Vec2 zone_lo{};
  Vec2 zone_hi{};

  RayFanSpec rays;
  std::size_t aperture_stride = 10;
  std::size_t aperture_dips = 72;

  std::vector<TraceSpec> traces;

  std::filesystem::path output_dir = "out";
  std::string prefix = "rtm";
  double clip_percentile = 99.0;

  double delay() const noexcept { return source_delay >= 0.0 ? source_delay : 1.5 / peak_frequency; }
  std::size_t surface_row() const;
  IndexBox zone_box() const;
  IndexBox interior_box() const;  // cells outside the sponge frame
  std::filesystem::path output_path(const std::string& name) const;
};

/// Parses the sectioned key/value format. Unknown sections or keys are rejected.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks cross-field invariants (Courant number, surface source, geometry inside the interior).
void validate(const ExperimentConfig& cfg);

ScalarField build_velocity(const ExperimentConfig& cfg);

/// Relative contrast r = dc / c on the experiment grid.
ScalarField build_reflectivity(const ExperimentConfig& cfg);

}  // namespace rtms
