#include "rtms/experiment.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rtms/analytic.hpp"
#include "rtms/errors.hpp"
#include "rtms/io.hpp"
#include "rtms/rtm.hpp"

namespace rtms {
namespace {

struct Window {
  double sum_tt = 0.0;
  double sum_ii = 0.0;
  double sum_ti = 0.0;
  void add(double t, double i) {
    sum_tt += t * t;
    sum_ii += i * i;
    sum_ti += t * i;
  }
  double ratio() const { return sum_tt > 0.0 ? std::sqrt(sum_ii / sum_tt) : 0.0; }
  double corr() const {
    const double d = std::sqrt(sum_tt * sum_ii);
    return d > 0.0 ? sum_ti / d : 0.0;
  }
};

// Cells within two window widths of a packet center.
template <typename F>
void packet_window(const Grid2D& g, const WavePacketSpec& p, F&& f) {
  for (std::size_t j = 0; j < g.nx2(); ++j)
    for (std::size_t i = 0; i < g.nx1(); ++i) {
      const double a = (g.x1(i) - p.center.x1) / p.widths.x1;
      const double b = (g.x2(j) - p.center.x2) / p.widths.x2;
      if (a * a + b * b <= 4.0) f(i, j);
    }
}

ScalarField scaled(const ScalarField& a, const ScalarField& c) {
  ScalarField out = a;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= c[k];
  return out;
}

class Outputs {
 public:
  explicit Outputs(const ExperimentConfig& cfg) : cfg_(cfg) {
    std::filesystem::create_directories(cfg.output_path("x").parent_path());
  }
  void field(const std::string& name, const ScalarField& f) {
    const auto p = cfg_.output_path(name + ".rtmf");
    write_field(p, f);
    add(p);
  }
  void mask(const std::string& name, const MaskField& m) {
    const auto p = cfg_.output_path(name + ".rtmf");
    write_mask(p, m);
    add(p);
  }
  void gather(const std::string& name, const SurfaceGather& g) {
    const auto p = cfg_.output_path(name + ".rtmg");
    write_gather(p, g);
    add(p);
  }
  void pgm(const std::string& name, const ScalarField& f) {
    const auto p = cfg_.output_path(name + ".pgm");
    export_pgm(f, p, cfg_.clip_percentile);
    add(p);
  }
  void text(const std::string& name, const std::string& body) {
    const auto p = cfg_.output_path(name);
    std::ofstream os(p, std::ios::binary);
    os << body;
    if (!os) throw IoError("cannot write '" + p.string() + "'");
    os.close();
    add(p);
  }
  std::vector<ManifestEntry> files;

 private:
  void add(const std::filesystem::path& p) { files.push_back({p.filename().string(), file_hash(p)}); }
  const ExperimentConfig& cfg_;
};

}  // namespace

TraceComparison compare_traces(const ScalarField& truth, const ScalarField& image, int axis, double coord,
                               double lo, double hi) {
  const Grid2D& g = truth.grid();
  if (!g.same_as(image.grid())) throw GeometryError("fields live on different grids");
  if (axis != 1 && axis != 2) throw GeometryError("trace axis must be 1 or 2");
  if (!(hi > lo)) throw GeometryError("empty trace window");
  const double f = axis == 1 ? g.fi(coord) : g.fj(coord);
  const std::size_t n_fixed = axis == 1 ? g.nx1() : g.nx2();
  const double k = std::round(f);
  if (k < 0.0 || k > static_cast<double>(n_fixed - 1) || std::abs(f - k) > 1e-6)
    throw GeometryError("trace coordinate is not on a grid line");
  const auto line = static_cast<std::size_t>(k);

  TraceComparison tc;
  tc.axis = axis;
  tc.coord = coord;
  Window w;
  const std::size_t n_free = axis == 1 ? g.nx2() : g.nx1();
  for (std::size_t q = 0; q < n_free; ++q) {
    const double x = axis == 1 ? g.x2(q) : g.x1(q);
    if (x < lo - 1e-9 || x > hi + 1e-9) continue;
    const double t = axis == 1 ? truth(line, q) : truth(q, line);
    const double v = axis == 1 ? image(line, q) : image(q, line);
    tc.position.push_back(x);
    tc.truth.push_back(t);
    tc.image.push_back(v);
    w.add(t, v);
  }
  if (tc.position.empty()) throw GeometryError("trace window misses the grid");
  tc.amplitude_ratio = w.ratio();
  tc.correlation = w.corr();
  return tc;
}

void export_pgm(const ScalarField& f, const std::filesystem::path& path, double clip_percentile) {
  if (!(clip_percentile > 0.0 && clip_percentile <= 100.0)) throw ConfigError("clip percentile must lie in (0, 100]");
  std::vector<double> mag(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) mag[k] = std::abs(f[k]);
  double clip = 0.0;
  if (!mag.empty()) {
    const auto rank = static_cast<std::size_t>(
        std::ceil(clip_percentile / 100.0 * static_cast<double>(mag.size())) - 1.0);
    const std::size_t r = std::min(rank, mag.size() - 1);
    std::nth_element(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(r), mag.end());
    clip = mag[r];
  }
  const Grid2D& g = f.grid();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "'");
  os << "P5\n" << g.nx1() << ' ' << g.nx2() << "\n255\n";
  // x2 grows downwards in the picture; +0 and -0 fall on either side of mid-gray
  for (std::size_t j = 0; j < g.nx2(); ++j)
    for (std::size_t i = 0; i < g.nx1(); ++i) {
      const double v = f(i, j);
      const double x = clip > 0.0 ? std::min(1.0, std::abs(v) / clip) : 0.0;
      const int q = std::min(127, static_cast<int>(std::floor(128.0 * x)));
      const int p = std::signbit(v) ? 127 - q : 128 + q;
      os.put(static_cast<char>(static_cast<unsigned char>(p)));
    }
  if (!os) throw IoError("cannot write '" + path.string() + "'");
}

std::string format_metrics(const std::map<std::string, double>& m) {
  std::ostringstream os;
  os.precision(10);
  for (const auto& [k, v] : m) os << k << '=' << v << '\n';
  return os.str();
}

namespace {

template <typename F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  const std::string tag = std::string("stage '") + stage + "': ";
  try {
    return f();
  } catch (const InstabilityError& e) {
    throw InstabilityError(tag + e.what(), e.step());
  } catch (const SmeViolation& e) {
    throw SmeViolation(tag + e.what(), e.fraction());
  } catch (const ConfigError& e) {
    throw ConfigError(tag + e.what());
  } catch (const GeometryError& e) {
    throw GeometryError(tag + e.what());
  } catch (const IoError& e) {
    throw IoError(tag + e.what());
  } catch (const Error& e) {
    throw Error(tag + e.what());
  }
}

double rel_l2(const ScalarField& a, const ScalarField& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += (a[k] - ref[k]) * (a[k] - ref[k]);
    den += ref[k] * ref[k];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

const char* stage_name(Stage s) noexcept {
  switch (s) {
    case Stage::forward: return "forward";
    case Stage::migrate: return "migrate";
    case Stage::image: return "image";
    case Stage::aperture: return "aperture";
    case Stage::all: return "run";
  }
  return "?";
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, Stage stage) {
  staged("config", [&] { validate(cfg); });
  ExperimentReport rep;
  auto& M = rep.metrics;
  Outputs out(cfg);

  const bool want_fw = stage != Stage::aperture;
  const bool want_img = stage == Stage::image || stage == Stage::migrate || stage == Stage::all;
  const bool all_conditions = stage == Stage::migrate || stage == Stage::all;
  const bool want_ap = stage == Stage::aperture || stage == Stage::all;

  const ScalarField c = staged("model", [&] { return build_velocity(cfg); });
  const ScalarField r = staged("model", [&] { return build_reflectivity(cfg); });
  const IndexBox zb = cfg.zone_box();
  const ScalarField cz = crop(c, zb);
  const ScalarField rz = crop(r, zb);
  const double t_max = static_cast<double>(cfg.nt) * cfg.dt;
  const ScalarField dc_true = scaled(rz, cz);
  out.field("velocity", c);
  out.field("dc_true", dc_true);
  out.pgm("dc_true", dc_true);

  // source-side geometry first: an SME failure stops the excitation condition early
  const GoFields go = staged("rays", [&] { return go_fields(c, cfg.source, cfg.rays, t_max); });
  const GoFields goz = crop(go, zb);
  const IndexBox whole{0, 0, zb.n1, zb.n2};
  const double mp = multipath_fraction(goz, whole);
  const bool sme = mp <= cfg.rays.max_multipath_fraction;
  M["sme.multipath_fraction"] = mp;
  M["sme.holds"] = sme ? 1.0 : 0.0;
  const bool need_exc = want_img && (all_conditions || cfg.condition == ImagingCondition::excitation);
  if (want_img && cfg.condition == ImagingCondition::excitation && !sme && !cfg.force)
    staged("rays", [&] { require_single_arrival(goz, whole, cfg.rays.max_multipath_fraction); });

  if (want_fw) {
    const ForwardProducts fw = staged("forward", [&] { return forward_model(cfg, c, r); });
    const SurfaceGather filtered = staged("filter", [&] { return apply_fm(fw.scattered, fm_params(cfg, c)); });
    out.gather("data_background", fw.background);
    out.gather("data_scattered", fw.scattered);
    out.gather("data_filtered", filtered);

    if (want_img) {
      const ImagingBand band = imaging_band(cfg);
      const FreqSlices ur = staged("migrate", [&] { return reverse_continue(fw.scattered, c, cfg); });
      std::optional<ImageResult> ratio, xcorr, exc;
      staged("image", [&] {
        if (all_conditions || cfg.condition == ImagingCondition::ratio) {
          ratio = image_ratio(fw.g_hat, ur, cz, band, cfg.epsilon);
          for (std::size_t k = 0; k < ratio->image.size(); ++k)
            if (goz.shadow[k]) ratio->image[k] = 0.0;
          ratio->shadow_masked = true;
        }
        if (all_conditions || cfg.condition == ImagingCondition::xcorr_baseline)
          xcorr = image_xcorr(fw.g_hat, ur, band);
        if (need_exc && (sme || cfg.force))
          exc = image_excitation(ur, goz, cz, band,
                                 wavelet_spectrum(source_signature(cfg), cfg.dt, band.freqs));
      });

      const ImageResult* primary = nullptr;
      switch (cfg.condition) {
        case ImagingCondition::ratio: primary = &*ratio; break;
        case ImagingCondition::xcorr_baseline: primary = &*xcorr; break;
        case ImagingCondition::excitation: primary = exc ? &*exc : nullptr; break;
      }
      if (primary == nullptr) primary = &*ratio;

      const ScalarField dc_image = scaled(primary->image, cz);
      out.field("dc_image", dc_image);
      out.pgm("dc_image", dc_image);
      if (ratio) out.field("image_ratio", ratio->image);
      if (xcorr) {
        out.field("image_xcorr", xcorr->image);
        out.pgm("image_xcorr", xcorr->image);
      }
      if (exc) out.field("image_excitation", exc->image);

      for (const auto& t : cfg.traces) {
        const TraceComparison tc =
            staged("compare", [&] { return compare_traces(dc_true, dc_image, t.axis, t.coord, t.lo, t.hi); });
        M["trace." + t.name + ".amplitude_ratio"] = tc.amplitude_ratio;
        M["trace." + t.name + ".correlation"] = tc.correlation;
        std::ostringstream os;
        os.precision(10);
        os << "# position true image\n";
        for (std::size_t q = 0; q < tc.position.size(); ++q)
          os << tc.position[q] << ' ' << tc.truth[q] << ' ' << tc.image[q] << '\n';
        out.text("trace_" + t.name + ".txt", os.str());
      }

      const Grid2D& zg = cz.grid();
      for (const auto& p : cfg.packets) {
        const ScalarField own = crop(wave_packet(cfg.grid, p.spec, 0.0), zb);
        Window vs_true, vs_exc;
        packet_window(zg, p.spec, [&](std::size_t i, std::size_t j) {
          vs_true.add(own(i, j), primary->image(i, j));
          if (exc && ratio) vs_exc.add(ratio->image(i, j), exc->image(i, j));
        });
        M["packet." + p.name + ".correlation"] = vs_true.corr();
        M["packet." + p.name + ".amplitude_ratio"] = vs_true.ratio();
        if (exc && ratio) M["packet." + p.name + ".ratio_vs_excitation"] = vs_exc.corr();
      }

      if (ratio && xcorr) {
        const double k_min = min_reflectivity_wavenumber(band, cz);
        const double low_ratio = low_wavenumber_fraction(ratio->image, k_min);
        const double low_xcorr = low_wavenumber_fraction(xcorr->image, k_min);
        M["lowk.k_min"] = k_min;
        M["lowk.ratio_image"] = low_ratio;
        M["lowk.xcorr_image"] = low_xcorr;
        M["lowk.ratio_over_xcorr"] = low_xcorr > 0.0 ? low_ratio / low_xcorr : 0.0;
      }
    }
  }

  if (want_ap) {
    const ApertureMap ap = staged("aperture", [&] {
      return predict_aperture(zb, go, c, cfg.acquisition.array(), t_max, cfg.aperture_stride, cfg.aperture_dips);
    });
    ScalarField coverage(ap.cells), dip_lo(ap.cells), dip_hi(ap.cells);
    double mp_cells = 0.0, mp_x1 = 0.0, mp_x2 = 0.0;
    for (std::size_t j = 0; j < ap.cells.nx2(); ++j)
      for (std::size_t i = 0; i < ap.cells.nx1(); ++i) {
        coverage(i, j) = ap.coverage(i, j);
        double lo = 0.0, hi = 0.0;
        if (ap.dip_range(i, j, 0.5, lo, hi)) {
          dip_lo(i, j) = lo;
          dip_hi(i, j) = hi;
        }
        if (ap.multipath(i, j)) {
          mp_cells += 1.0;
          mp_x1 += ap.cells.x1(i);
          mp_x2 += ap.cells.x2(j);
        }
      }
    M["aperture.multipath_cells"] = mp_cells;
    if (mp_cells > 0.0) {
      M["aperture.multipath_centroid_x1"] = mp_x1 / mp_cells;
      M["aperture.multipath_centroid_x2"] = mp_x2 / mp_cells;
    }
    out.field("aperture_coverage", coverage);
    out.field("aperture_dip_lo", dip_lo);
    out.field("aperture_dip_hi", dip_hi);
    out.mask("aperture_multipath", ap.multipath);
    // full-resolution annotation of where the source field has more than one arrival
    out.mask("artifact_zone", goz.multipath);
  }

  out.text("metrics.txt", format_metrics(M));
  std::ostringstream man;
  for (const auto& f : out.files) man << f.hash << "  " << f.path << '\n';
  out.text("manifest.txt", man.str());
  rep.files = out.files;
  return rep;
}

ExperimentReport run_oracle(const ExperimentConfig& cfg) {
  staged("config", [&] { validate(cfg); });
  ExperimentReport rep;
  Outputs out(cfg);
  const ScalarField r0 = staged("model", [&] { return build_reflectivity(cfg); });
  // zero padding refines the wavenumber lattice used by the spectral shifts
  const Grid2D& g0 = cfg.grid;
  const Grid2D g(4 * g0.nx1(), 4 * g0.nx2(), g0.dx(), g0.origin());
  ScalarField r(g);
  // Gaussian tails above the surface are cut; the reference uses the same r
  for (std::size_t j = 0; j < g0.nx2(); ++j)
    for (std::size_t i = 0; i < g0.nx1(); ++i)
      if (g0.x2(j) > 0.0) r(i, j) = r0(i, j);
  const double c = cfg.velocity.c0;
  const double A = 1.0;
  // any time after the front has left the grid
  const double t = (g.x2(g.nx2() - 1) + g.dx()) / c;
  const ScalarField u = staged("oracle", [&] { return planewave_field(r, c, A, t); });
  const PlaneWaveState st = staged("oracle", [&] { return planewave_state(to_complex(r), c, A, t); });
  const IndexBox box{0, 0, g0.nx1(), g0.nx2()};
  const ScalarField image = crop(planewave_reconstruct_real(st), box);
  const ScalarField truth = crop(halfspace_oracle(r), box);
  rep.metrics["oracle.c"] = c;
  rep.metrics["oracle.t"] = t;
  rep.metrics["oracle.rel_l2_vs_halfspace"] = rel_l2(image, truth);
  rep.metrics["oracle.rel_l2_vs_r"] = rel_l2(image, crop(r, IndexBox{0, 0, g0.nx1(), g0.nx2()}));
  out.field("oracle_u", crop(u, box));
  out.field("oracle_image", image);
  out.field("oracle_halfspace", truth);
  out.pgm("oracle_image", image);
  out.text("oracle_metrics.txt", format_metrics(rep.metrics));
  rep.files = out.files;
  return rep;
}

}  // namespace rtms
