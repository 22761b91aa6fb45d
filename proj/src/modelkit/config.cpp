#include "rtms/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "rtms/io.hpp"

namespace rtms {
namespace {

enum class Dim { none, length, velocity, gradient, frequency, time, wavenumber, angle };

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& tok, int line) {
  double v = 0.0;
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) fail(line, "expected a number, got '" + tok + "'");
  if (!std::isfinite(v)) fail(line, "non-finite number '" + tok + "'");
  return v;
}

double unit_scale(Dim dim, const std::string& unit, int line) {
  if (unit.empty()) return 1.0;
  switch (dim) {
    case Dim::length:
      if (unit == "m") return 1.0;
      if (unit == "km") return 1000.0;
      break;
    case Dim::velocity:
      if (unit == "m/s") return 1.0;
      if (unit == "km/s") return 1000.0;
      break;
    case Dim::gradient:
      if (unit == "1/s" || unit == "m/s/m") return 1.0;
      if (unit == "km/s/m") return 1000.0;
      break;
    case Dim::frequency:
      if (unit == "Hz") return 1.0;
      break;
    case Dim::time:
      if (unit == "s") return 1.0;
      if (unit == "ms") return 1e-3;
      break;
    case Dim::wavenumber:
      if (unit == "rad/m") return 1.0;
      break;
    case Dim::angle:
      if (unit == "deg") return 1.0;
      break;
    case Dim::none:
      break;
  }
  fail(line, "unit '" + unit + "' not accepted here");
}

class Document {
 public:
  explicit Document(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    Section* current = nullptr;
    while (std::getline(in, raw)) {
      ++line;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      const std::string s = trim(raw);
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') fail(line, "malformed section header");
        const std::string name = trim(std::string_view(s).substr(1, s.size() - 2));
        if (name.empty()) fail(line, "empty section name");
        for (const auto& sec : sections_)
          if (sec.name == name) fail(line, "duplicate section [" + name + "]");
        sections_.push_back({name, line, {}});
        current = &sections_.back();
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) fail(line, "expected key = value");
      if (!current) fail(line, "key outside of any section");
      const std::string key = trim(std::string_view(s).substr(0, eq));
      const std::string val = trim(std::string_view(s).substr(eq + 1));
      if (key.empty()) fail(line, "empty key");
      if (current->entries.count(key)) fail(line, "duplicate key '" + key + "'");
      current->entries[key] = {val, line, false};
    }
  }

  std::vector<Section>& sections() { return sections_; }

 private:
  std::vector<Section> sections_;
};

class SectionReader {
 public:
  explicit SectionReader(Section& s) : s_(s) {}

  bool has(const std::string& key) const { return s_.entries.count(key) > 0; }

  std::string str(const std::string& key, const std::string& def) {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return def;
    it->second.used = true;
    return it->second.value;
  }

  std::string required_str(const std::string& key) {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end())
      fail(s_.line, "[" + s_.name + "] requires key '" + key + "'");
    it->second.used = true;
    return it->second.value;
  }

  double num(const std::string& key, Dim dim, double def) {
    if (!has(key)) return def;
    return required_num(key, dim);
  }

  double required_num(const std::string& key, Dim dim) {
    const std::string v = required_str(key);
    const int line = s_.entries.at(key).line;
    std::istringstream in(v);
    std::string number, unit, extra;
    in >> number >> unit >> extra;
    if (!extra.empty()) fail(line, "trailing text after value of '" + key + "'");
    return parse_number(number, line) * unit_scale(dim, unit, line);
  }

  std::size_t count(const std::string& key, std::size_t def) {
    if (!has(key)) return def;
    const double v = required_num(key, Dim::none);
    if (v < 0.0 || v != std::floor(v) || v > 1e9)
      fail(s_.entries.at(key).line, "'" + key + "' must be a nonnegative integer");
    return static_cast<std::size_t>(v);
  }

  bool flag(const std::string& key, bool def) {
    if (!has(key)) return def;
    const std::string v = required_str(key);
    if (v == "on" || v == "true" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "no") return false;
    fail(s_.entries.at(key).line, "'" + key + "' must be on/off");
  }

  void reject_unused() const {
    for (const auto& [k, e] : s_.entries)
      if (!e.used) fail(e.line, "unknown key '" + k + "' in [" + s_.name + "]");
  }

 private:
  Section& s_;
};

}  // namespace

std::size_t ExperimentConfig::surface_row() const {
  const double fj = grid.fj(0.0);
  const double r = std::round(fj);
  if (std::abs(fj - r) > 1e-6 || r < 0.0 || r >= static_cast<double>(grid.nx2()))
    throw ConfigError("the surface x2 = 0 must coincide with a grid row");
  return static_cast<std::size_t>(r);
}

IndexBox ExperimentConfig::interior_box() const {
  const std::size_t w = sponge_width;
  if (2 * w + 3 > grid.nx1() || 2 * w + 3 > grid.nx2())
    throw ConfigError("sponge frame leaves no interior");
  return {w, w, grid.nx1() - 2 * w, grid.nx2() - 2 * w};
}

IndexBox ExperimentConfig::zone_box() const { return box_of(grid, zone_lo, zone_hi); }

std::filesystem::path ExperimentConfig::output_path(const std::string& name) const {
  std::filesystem::path dir = output_dir.is_absolute() ? output_dir : base_dir / output_dir;
  return dir / (prefix + "_" + name);
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  Document doc(text);
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;

  bool have_grid = false;
  bool have_source = false;
  bool have_time = false;
  bool have_acq = false;
  bool have_zone = false;

  for (Section& sec : doc.sections()) {
    SectionReader r(sec);
    const std::string& name = sec.name;
    if (name == "grid") {
      const std::size_t nx1 = r.count("nx1", 0);
      const std::size_t nx2 = r.count("nx2", 0);
      const double dx = r.required_num("dx", Dim::length);
      const Vec2 origin{r.num("origin_x1", Dim::length, 0.0), r.num("origin_x2", Dim::length, 0.0)};
      try {
        cfg.grid = Grid2D(nx1, nx2, dx, origin);
      } catch (const GeometryError& e) {
        fail(sec.line, e.what());
      }
      have_grid = true;
    } else if (name == "velocity") {
      const std::string model = r.str("model", "gradient");
      if (model == "gradient")
        cfg.velocity.kind = VelocityKind::gradient;
      else if (model == "lens")
        cfg.velocity.kind = VelocityKind::lens;
      else
        fail(sec.line, "velocity model must be gradient or lens");
      cfg.velocity.c0 = r.required_num("c0", Dim::velocity);
      cfg.velocity.gradient = r.num("gradient", Dim::gradient, 0.0);
      if (cfg.velocity.kind == VelocityKind::lens) {
        cfg.velocity.lens_center = {r.required_num("lens_x1", Dim::length),
                                    r.required_num("lens_x2", Dim::length)};
        cfg.velocity.lens_radius = r.required_num("lens_radius", Dim::length);
        cfg.velocity.lens_delta = r.required_num("lens_delta", Dim::velocity);
      }
    } else if (name == "contrast") {
      if (r.has("file")) cfg.contrast_file = r.required_str("file");
      cfg.min_depth = r.num("min_depth", Dim::length, cfg.min_depth);
    } else if (name.rfind("packet.", 0) == 0) {
      WavePacketSpec p;
      p.center = {r.required_num("center_x1", Dim::length), r.required_num("center_x2", Dim::length)};
      p.wavevector = {r.required_num("k1", Dim::wavenumber), r.required_num("k2", Dim::wavenumber)};
      p.widths = {r.required_num("width1", Dim::length), r.required_num("width2", Dim::length)};
      p.amplitude = r.required_num("amplitude", Dim::none);
      cfg.packets.push_back({name.substr(7), p});
    } else if (name.rfind("reflector.", 0) == 0) {
      ReflectorSpec s;
      s.depth = r.required_num("depth", Dim::length);
      s.wavenumber = r.required_num("wavenumber", Dim::wavenumber);
      s.width = r.required_num("width", Dim::length);
      s.x1_min = r.required_num("x1_min", Dim::length);
      s.x1_max = r.required_num("x1_max", Dim::length);
      s.taper = r.num("taper", Dim::length, 0.0);
      s.amplitude = r.required_num("amplitude", Dim::none);
      cfg.reflectors.push_back({name.substr(10), s});
    } else if (name == "source") {
      cfg.source = {r.required_num("x1", Dim::length), r.num("x2", Dim::length, 0.0)};
      cfg.peak_frequency = r.required_num("peak_frequency", Dim::frequency);
      cfg.source_delay = r.num("delay", Dim::time, -1.0);
      have_source = true;
    } else if (name == "time") {
      cfg.dt = r.required_num("dt", Dim::time);
      cfg.nt = r.count("nt", 0);
      cfg.dft_stride = r.count("dft_stride", 1);
      have_time = true;
    } else if (name == "sponge") {
      cfg.sponge_width = r.count("width", cfg.sponge_width);
      cfg.sponge_strength = r.num("strength", Dim::none, cfg.sponge_strength);
    } else if (name == "acquisition") {
      cfg.acquisition.x1_min = r.required_num("x1_min", Dim::length);
      cfg.acquisition.x1_max = r.required_num("x1_max", Dim::length);
      cfg.acquisition.taper_fraction = r.num("taper_fraction", Dim::none, 0.1);
      cfg.acquisition.grazing_delta = r.num("grazing_delta", Dim::none, 0.1);
      cfg.acquisition.mute = r.flag("mute", false);
      cfg.acquisition.mute_window = r.num("mute_window", Dim::time, 0.05);
      have_acq = true;
    } else if (name == "imaging") {
      cfg.f_lo = r.num("f_lo", Dim::frequency, cfg.f_lo);
      cfg.f_hi = r.num("f_hi", Dim::frequency, cfg.f_hi);
      cfg.nfreq = r.count("nfreq", cfg.nfreq);
      cfg.band_ramp = r.num("band_ramp", Dim::none, cfg.band_ramp);
      cfg.epsilon = r.num("epsilon", Dim::none, cfg.epsilon);
      const std::string cond = r.str("condition", "ratio");
      if (cond == "ratio")
        cfg.condition = ImagingCondition::ratio;
      else if (cond == "excitation")
        cfg.condition = ImagingCondition::excitation;
      else if (cond == "xcorr-baseline")
        cfg.condition = ImagingCondition::xcorr_baseline;
      else
        fail(sec.line, "condition must be ratio, excitation or xcorr-baseline");
      const std::string born = r.str("born", "nonlinear");
      if (born == "nonlinear")
        cfg.born = BornMode::nonlinear;
      else if (born == "linearized")
        cfg.born = BornMode::linearized;
      else
        fail(sec.line, "born must be nonlinear or linearized");
      cfg.force = r.flag("force", false);
      cfg.zone_lo = {r.required_num("zone_x1_min", Dim::length),
                     r.required_num("zone_x2_min", Dim::length)};
      cfg.zone_hi = {r.required_num("zone_x1_max", Dim::length),
                     r.required_num("zone_x2_max", Dim::length)};
      have_zone = true;
    } else if (name == "rays") {
      cfg.rays.count = r.count("count", cfg.rays.count);
      cfg.rays.dt = r.num("dt", Dim::time, cfg.rays.dt);
      cfg.rays.theta_min_deg = r.num("theta_min", Dim::angle, cfg.rays.theta_min_deg);
      cfg.rays.theta_max_deg = r.num("theta_max", Dim::angle, cfg.rays.theta_max_deg);
      cfg.rays.max_multipath_fraction =
          r.num("max_multipath_fraction", Dim::none, cfg.rays.max_multipath_fraction);
    } else if (name == "aperture") {
      cfg.aperture_stride = r.count("stride", cfg.aperture_stride);
      cfg.aperture_dips = r.count("dips", cfg.aperture_dips);
    } else if (name.rfind("trace.", 0) == 0) {
      TraceSpec t;
      t.name = name.substr(6);
      const std::string axis = r.required_str("axis");
      if (axis == "x1")
        t.axis = 1;
      else if (axis == "x2")
        t.axis = 2;
      else
        fail(sec.line, "trace axis must be x1 or x2");
      t.coord = r.required_num("coord", Dim::length);
      t.lo = r.required_num("lo", Dim::length);
      t.hi = r.required_num("hi", Dim::length);
      cfg.traces.push_back(t);
    } else if (name == "output") {
      cfg.output_dir = r.str("dir", "out");
      cfg.prefix = r.str("prefix", "rtm");
      cfg.clip_percentile = r.num("clip_percentile", Dim::none, 99.0);
    } else {
      fail(sec.line, "unknown section [" + name + "]");
    }
    r.reject_unused();
  }

  if (!have_grid) throw ConfigError("missing [grid] section");
  if (!have_source) throw ConfigError("missing [source] section");
  if (!have_time) throw ConfigError("missing [time] section");
  if (!have_acq) throw ConfigError("missing [acquisition] section");
  if (!have_zone) throw ConfigError("missing [imaging] section");
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

void validate(const ExperimentConfig& cfg) {
  const Grid2D& g = cfg.grid;
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  if (cfg.nt < 2) throw ConfigError("nt must be at least 2");
  if (cfg.dft_stride < 1) throw ConfigError("dft_stride must be at least 1");
  if (!(cfg.peak_frequency > 0.0)) throw ConfigError("peak_frequency must be positive");
  if (cfg.sponge_strength < 0.0) throw ConfigError("sponge strength must be nonnegative");

  const IndexBox interior = cfg.interior_box();
  const std::size_t srow = cfg.surface_row();
  if (!interior.contains(interior.i0, srow)) throw ConfigError("surface row lies inside the sponge");

  if (std::abs(cfg.source.x2) > 1e-9) throw ConfigError("source must lie on the surface x2 = 0");
  if (!g.contains(cfg.source)) throw ConfigError("source outside grid");
  {
    const auto sc = g.nearest(cfg.source);
    if (!interior.contains(sc.i, sc.j)) throw ConfigError("source lies inside the sponge");
    if (std::abs(g.x1(sc.i) - cfg.source.x1) > 1e-6 * g.dx())
      throw ConfigError("source x1 must coincide with a grid column");
  }

  const auto& a = cfg.acquisition;
  if (!(a.x1_max > a.x1_min)) throw ConfigError("acquisition x1_max must exceed x1_min");
  if (!g.contains({a.x1_min, 0.0}) || !g.contains({a.x1_max, 0.0}))
    throw ConfigError("acquisition extent leaves the grid");
  {
    const auto c0 = g.nearest({a.x1_min, 0.0});
    const auto c1 = g.nearest({a.x1_max, 0.0});
    if (!interior.contains(c0.i, srow) || !interior.contains(c1.i, srow))
      throw ConfigError("acquisition extent reaches into the sponge");
  }
  if (a.taper_fraction < 0.0 || a.taper_fraction > 0.5)
    throw ConfigError("taper_fraction must lie in [0, 0.5]");
  if (!(a.grazing_delta > 0.0 && a.grazing_delta < 1.0))
    throw ConfigError("grazing_delta must lie in (0, 1)");

  if (!(cfg.f_lo > 0.0) || !(cfg.f_hi > cfg.f_lo)) throw ConfigError("need 0 < f_lo < f_hi");
  if (cfg.nfreq < 2) throw ConfigError("nfreq must be at least 2");
  if (cfg.band_ramp < 0.0 || cfg.band_ramp > 0.5) throw ConfigError("band_ramp must lie in [0, 0.5]");
  if (cfg.epsilon < 0.0) throw ConfigError("epsilon must be nonnegative");
  const double nyq_t = 0.5 / (cfg.dt * static_cast<double>(cfg.dft_stride));
  if (cfg.f_hi >= nyq_t) throw ConfigError("f_hi exceeds the Nyquist frequency of the DFT sampling");

  if (!(cfg.zone_hi.x1 > cfg.zone_lo.x1) || !(cfg.zone_hi.x2 > cfg.zone_lo.x2))
    throw ConfigError("image zone is empty");
  if (cfg.zone_lo.x2 <= 0.0) throw ConfigError("image zone must lie below the surface");
  {
    const IndexBox z = cfg.zone_box();
    if (!interior.contains(z.i0, z.j0) || !interior.contains(z.i0 + z.n1 - 1, z.j0 + z.n2 - 1))
      throw ConfigError("image zone reaches into the sponge");
    if (z.i0 == 0 || z.j0 == 0) throw ConfigError("image zone needs a one-cell margin");
  }

  const ScalarField c = build_velocity(cfg);
  const double courant = courant_number(c, cfg.dt);
  if (courant > 0.5)
    throw ConfigError("Courant number " + std::to_string(courant) + " exceeds 0.5");

  // spatial Nyquist at the surface velocity for the F_M filter
  const auto sc = g.nearest(cfg.source);
  const double c_surf = c(sc.i, srow);
  if (cfg.f_hi >= c_surf / (2.0 * g.dx()))
    throw ConfigError("f_hi aliases on the receiver spacing at the surface velocity");

  if (!cfg.packets.empty() || !cfg.reflectors.empty() || !cfg.contrast_file.empty())
    (void)build_reflectivity(cfg);

  if (cfg.rays.count < 3) throw ConfigError("ray fan needs at least 3 rays");
  if (!(cfg.rays.dt > 0.0)) throw ConfigError("ray step must be positive");
  if (!(cfg.rays.theta_max_deg > cfg.rays.theta_min_deg) || cfg.rays.theta_min_deg <= -90.0 ||
      cfg.rays.theta_max_deg >= 90.0)
    throw ConfigError("ray fan must lie strictly inside (-90, 90) degrees");
  if (cfg.aperture_stride < 1 || cfg.aperture_dips < 4)
    throw ConfigError("aperture stride >= 1 and dips >= 4 required");

  for (const auto& t : cfg.traces) {
    if (!(t.hi > t.lo)) throw ConfigError("trace '" + t.name + "' window is empty");
  }
  if (cfg.clip_percentile <= 0.0 || cfg.clip_percentile > 100.0)
    throw ConfigError("clip_percentile must lie in (0, 100]");
}

ScalarField build_velocity(const ExperimentConfig& cfg) {
  const auto& v = cfg.velocity;
  if (v.kind == VelocityKind::lens)
    return build_lens_model(cfg.grid, v.c0, v.gradient, v.lens_center, v.lens_radius, v.lens_delta);
  return build_gradient_model(cfg.grid, v.c0, v.gradient);
}

ScalarField build_reflectivity(const ExperimentConfig& cfg) {
  ScalarField r(cfg.grid);
  if (!cfg.contrast_file.empty()) {
    const auto path =
        cfg.contrast_file.is_absolute() ? cfg.contrast_file : cfg.base_dir / cfg.contrast_file;
    ScalarField f = read_field(path);
    if (!f.grid().same_as(cfg.grid)) throw ConfigError("contrast file grid differs from [grid]");
    for (std::size_t j = 0; j < f.grid().nx2(); ++j)
      for (std::size_t i = 0; i < f.grid().nx1(); ++i)
        if (f(i, j) != 0.0 && f.grid().x2(j) <= cfg.min_depth)
          throw ConfigError("contrast file has support above min_depth");
    r = std::move(f);
  }
  for (const auto& p : cfg.packets) {
    const ScalarField f = wave_packet(cfg.grid, p.spec, cfg.min_depth);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += f[k];
  }
  for (const auto& p : cfg.reflectors) {
    const ScalarField f = reflector(cfg.grid, p.spec, cfg.min_depth);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += f[k];
  }
  return r;
}

}  // namespace rtms
