#include "rtms/rtm_scatter.h"

#include <filesystem>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "rtms/config.hpp"
#include "rtms/errors.hpp"
#include "rtms/experiment.hpp"
#include "rtms/io.hpp"

struct rtms_config {
  rtms::ExperimentConfig cfg;
};

struct rtms_report {
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<rtms::ManifestEntry> files;
};

namespace {

thread_local std::string g_last_error;

rtms_status fail(rtms_status s, const char* what) {
  g_last_error = what;
  return s;
}

template <typename F>
rtms_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return RTMS_OK;
  } catch (const rtms::ConfigError& e) {
    return fail(RTMS_ERR_CONFIG, e.what());
  } catch (const rtms::InstabilityError& e) {
    return fail(RTMS_ERR_INSTABILITY, e.what());
  } catch (const rtms::SmeViolation& e) {
    return fail(RTMS_ERR_SME, e.what());
  } catch (const rtms::GeometryError& e) {
    return fail(RTMS_ERR_GEOMETRY, e.what());
  } catch (const rtms::IoError& e) {
    return fail(RTMS_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RTMS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RTMS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RTMS_ERR_INTERNAL, "unknown error");
  }
}

rtms_report* wrap(rtms::ExperimentReport&& rep) {
  auto* r = new rtms_report;
  r->metrics.assign(rep.metrics.begin(), rep.metrics.end());
  r->files = std::move(rep.files);
  return r;
}

}  // namespace

extern "C" {

const char* rtms_last_error(void) { return g_last_error.c_str(); }

const char* rtms_status_name(rtms_status s) {
  switch (s) {
    case RTMS_OK: return "ok";
    case RTMS_ERR_ARGUMENT: return "invalid argument";
    case RTMS_ERR_CONFIG: return "configuration error";
    case RTMS_ERR_INSTABILITY: return "numerical instability";
    case RTMS_ERR_SME: return "source multipath violation";
    case RTMS_ERR_GEOMETRY: return "geometry mismatch";
    case RTMS_ERR_IO: return "i/o error";
    case RTMS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

rtms_status rtms_config_load(const char* path, rtms_config** out) {
  if (path == nullptr || out == nullptr) return fail(RTMS_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto* c = new rtms_config{rtms::load_config(path)};
    *out = c;
  });
}

void rtms_config_free(rtms_config* cfg) { delete cfg; }

rtms_status rtms_config_set_condition(rtms_config* cfg, rtms_condition c) {
  if (cfg == nullptr) return fail(RTMS_ERR_ARGUMENT, "null config");
  switch (c) {
    case RTMS_CONDITION_RATIO: cfg->cfg.condition = rtms::ImagingCondition::ratio; break;
    case RTMS_CONDITION_EXCITATION: cfg->cfg.condition = rtms::ImagingCondition::excitation; break;
    case RTMS_CONDITION_XCORR: cfg->cfg.condition = rtms::ImagingCondition::xcorr_baseline; break;
    default: return fail(RTMS_ERR_ARGUMENT, "unknown imaging condition");
  }
  return RTMS_OK;
}

rtms_status rtms_config_set_force(rtms_config* cfg, int on) {
  if (cfg == nullptr) return fail(RTMS_ERR_ARGUMENT, "null config");
  cfg->cfg.force = on != 0;
  return RTMS_OK;
}

rtms_status rtms_config_set_taper(rtms_config* cfg, double fraction) {
  if (cfg == nullptr) return fail(RTMS_ERR_ARGUMENT, "null config");
  if (!(fraction >= 0.0 && fraction <= 0.5)) return fail(RTMS_ERR_CONFIG, "taper fraction must lie in [0, 0.5]");
  cfg->cfg.acquisition.taper_fraction = fraction;
  return RTMS_OK;
}

rtms_status rtms_config_set_grazing_delta(rtms_config* cfg, double delta) {
  if (cfg == nullptr) return fail(RTMS_ERR_ARGUMENT, "null config");
  if (!(delta > 0.0 && delta < 1.0)) return fail(RTMS_ERR_CONFIG, "grazing delta must lie in (0, 1)");
  cfg->cfg.acquisition.grazing_delta = delta;
  return RTMS_OK;
}

rtms_status rtms_config_set_mute(rtms_config* cfg, int on) {
  if (cfg == nullptr) return fail(RTMS_ERR_ARGUMENT, "null config");
  cfg->cfg.acquisition.mute = on != 0;
  return RTMS_OK;
}

rtms_status rtms_config_set_output_dir(rtms_config* cfg, const char* dir) {
  if (cfg == nullptr || dir == nullptr) return fail(RTMS_ERR_ARGUMENT, "null argument");
  // relative to the caller, not to the config file
  return guarded([&] { cfg->cfg.output_dir = std::filesystem::absolute(dir); });
}

rtms_status rtms_run(const rtms_config* cfg, rtms_stage stage, rtms_report** out) {
  if (cfg == nullptr || out == nullptr) return fail(RTMS_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  rtms::Stage s;
  switch (stage) {
    case RTMS_STAGE_FORWARD: s = rtms::Stage::forward; break;
    case RTMS_STAGE_MIGRATE: s = rtms::Stage::migrate; break;
    case RTMS_STAGE_IMAGE: s = rtms::Stage::image; break;
    case RTMS_STAGE_APERTURE: s = rtms::Stage::aperture; break;
    case RTMS_STAGE_ALL: s = rtms::Stage::all; break;
    default: return fail(RTMS_ERR_ARGUMENT, "unknown stage");
  }
  return guarded([&] { *out = wrap(rtms::run_experiment(cfg->cfg, s)); });
}

rtms_status rtms_oracle(const rtms_config* cfg, rtms_report** out) {
  if (cfg == nullptr || out == nullptr) return fail(RTMS_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = wrap(rtms::run_oracle(cfg->cfg)); });
}

size_t rtms_report_metric_count(const rtms_report* r) { return r ? r->metrics.size() : 0; }

rtms_status rtms_report_metric(const rtms_report* r, size_t i, const char** key, double* value) {
  if (r == nullptr || key == nullptr || value == nullptr) return fail(RTMS_ERR_ARGUMENT, "null argument");
  if (i >= r->metrics.size()) return fail(RTMS_ERR_ARGUMENT, "metric index out of range");
  *key = r->metrics[i].first.c_str();
  *value = r->metrics[i].second;
  return RTMS_OK;
}

rtms_status rtms_report_find(const rtms_report* r, const char* key, double* value) {
  if (r == nullptr || key == nullptr || value == nullptr) return fail(RTMS_ERR_ARGUMENT, "null argument");
  for (const auto& [k, v] : r->metrics)
    if (k == key) {
      *value = v;
      return RTMS_OK;
    }
  return fail(RTMS_ERR_ARGUMENT, (std::string("no metric '") + key + "'").c_str());
}

size_t rtms_report_file_count(const rtms_report* r) { return r ? r->files.size() : 0; }

rtms_status rtms_report_file(const rtms_report* r, size_t i, const char** path, const char** hash) {
  if (r == nullptr || path == nullptr || hash == nullptr) return fail(RTMS_ERR_ARGUMENT, "null argument");
  if (i >= r->files.size()) return fail(RTMS_ERR_ARGUMENT, "file index out of range");
  *path = r->files[i].path.c_str();
  *hash = r->files[i].hash.c_str();
  return RTMS_OK;
}

void rtms_report_free(rtms_report* r) { delete r; }

rtms_status rtms_compare_files(const char* truth_path, const char* image_path, int axis, double coord, double lo,
                               double hi, rtms_trace_stats* out) {
  if (truth_path == nullptr || image_path == nullptr || out == nullptr)
    return fail(RTMS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const rtms::ScalarField t = rtms::read_field(truth_path);
    const rtms::ScalarField i = rtms::read_field(image_path);
    const rtms::TraceComparison tc = rtms::compare_traces(t, i, axis, coord, lo, hi);
    out->amplitude_ratio = tc.amplitude_ratio;
    out->correlation = tc.correlation;
    out->samples = tc.position.size();
  });
}

}  // extern "C"
