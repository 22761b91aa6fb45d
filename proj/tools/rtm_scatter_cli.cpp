#include <cstdio>
#include <limits>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "rtms/rtm_scatter.h"

namespace {

struct Overrides {
  std::string out_dir;
  double taper = -1.0;
  double grazing = -1.0;
  std::string mute;
  bool force = false;
  std::string condition;
};

int exit_code(rtms_status s) {
  switch (s) {
    case RTMS_OK: return 0;
    case RTMS_ERR_CONFIG: return 2;
    case RTMS_ERR_INSTABILITY: return 3;
    case RTMS_ERR_SME: return 4;
    default: return 1;
  }
}

int report_error(rtms_status s) {
  std::fprintf(stderr, "rtm-scatter: %s: %s\n", rtms_status_name(s), rtms_last_error());
  return exit_code(s);
}

void print_report(const rtms_report* rep) {
  for (size_t i = 0; i < rtms_report_metric_count(rep); ++i) {
    const char* key = nullptr;
    double v = 0.0;
    if (rtms_report_metric(rep, i, &key, &v) == RTMS_OK) std::printf("%s=%.10g\n", key, v);
  }
  for (size_t i = 0; i < rtms_report_file_count(rep); ++i) {
    const char* path = nullptr;
    const char* hash = nullptr;
    if (rtms_report_file(rep, i, &path, &hash) == RTMS_OK) std::fprintf(stderr, "wrote %s  %s\n", hash, path);
  }
}

rtms_status apply(rtms_config* cfg, const Overrides& o) {
  rtms_status s = RTMS_OK;
  if (!o.out_dir.empty() && (s = rtms_config_set_output_dir(cfg, o.out_dir.c_str())) != RTMS_OK) return s;
  if (o.taper >= 0.0 && (s = rtms_config_set_taper(cfg, o.taper)) != RTMS_OK) return s;
  if (o.grazing >= 0.0 && (s = rtms_config_set_grazing_delta(cfg, o.grazing)) != RTMS_OK) return s;
  if (!o.mute.empty() && (s = rtms_config_set_mute(cfg, o.mute == "on")) != RTMS_OK) return s;
  if (o.force && (s = rtms_config_set_force(cfg, 1)) != RTMS_OK) return s;
  if (!o.condition.empty()) {
    static const std::map<std::string, rtms_condition> names{
        {"ratio", RTMS_CONDITION_RATIO},
        {"excitation", RTMS_CONDITION_EXCITATION},
        {"xcorr-baseline", RTMS_CONDITION_XCORR}};
    if ((s = rtms_config_set_condition(cfg, names.at(o.condition))) != RTMS_OK) return s;
  }
  return s;
}

// stage < 0 runs the plane-wave oracle
int run_config(const std::string& path, const Overrides& o, int stage) {
  rtms_config* cfg = nullptr;
  rtms_status s = rtms_config_load(path.c_str(), &cfg);
  if (s != RTMS_OK) return report_error(s);
  rtms_report* rep = nullptr;
  s = apply(cfg, o);
  if (s == RTMS_OK)
    s = stage < 0 ? rtms_oracle(cfg, &rep) : rtms_run(cfg, static_cast<rtms_stage>(stage), &rep);
  rtms_config_free(cfg);
  if (s != RTMS_OK) return report_error(s);
  print_report(rep);
  rtms_report_free(rep);
  return 0;
}

void add_common(CLI::App* sub, std::string& config, Overrides& o) {
  sub->add_option("config", config, "experiment configuration file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out_dir, "output directory (overrides [output] dir)");
  sub->add_option("--taper", o.taper, "receiver taper fraction")->check(CLI::Range(0.0, 0.5));
  sub->add_option("--grazing-delta", o.grazing, "grazing cutoff width")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--mute", o.mute, "direct-arrival mute")->check(CLI::IsMember({"on", "off"}));
  sub->add_flag("--force", o.force, "image even when the source field has multipathing");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reverse-time migration with the gradient-ratio imaging condition"};
  app.require_subcommand(1);
  std::string config;
  Overrides o;

  struct Verb {
    const char* name;
    const char* help;
    int stage;
  };
  const Verb verbs[] = {
      {"run", "forward model, migrate, image, predict aperture and export everything", RTMS_STAGE_ALL},
      {"forward", "forward model and filter the surface data", RTMS_STAGE_FORWARD},
      {"migrate", "forward model, continue in reverse time and form every image", RTMS_STAGE_MIGRATE},
      {"image", "forward model, continue in reverse time and form one image", RTMS_STAGE_IMAGE},
      {"aperture", "trace rays and predict the recoverable dips", RTMS_STAGE_APERTURE},
      {"oracle", "constant-velocity plane-wave round trip on the configured reflectivity", -1},
  };
  std::map<CLI::App*, int> stages;
  for (const Verb& v : verbs) {
    CLI::App* sub = app.add_subcommand(v.name, v.help);
    add_common(sub, config, o);
    if (std::string(v.name) == "image")
      sub->add_option("--condition", o.condition, "imaging condition")
          ->check(CLI::IsMember({"ratio", "excitation", "xcorr-baseline"}));
    stages[sub] = v.stage;
  }

  std::string truth_path, image_path, axis = "x1";
  double coord = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  CLI::App* cmp = app.add_subcommand("compare", "compare one profile of two field files");
  cmp->add_option("true", truth_path, "true field")->required()->check(CLI::ExistingFile);
  cmp->add_option("image", image_path, "reconstructed field")->required()->check(CLI::ExistingFile);
  cmp->add_option("--axis", axis, "x1: profile at fixed x1, x2: profile at fixed x2")
      ->check(CLI::IsMember({"x1", "x2"}));
  cmp->add_option("--coord", coord, "fixed coordinate (m)")->required();
  cmp->add_option("--lo", lo, "window start along the profile (m)");
  cmp->add_option("--hi", hi, "window end along the profile (m)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (cmp->parsed()) {
    rtms_trace_stats st{};
    const rtms_status s = rtms_compare_files(truth_path.c_str(), image_path.c_str(), axis == "x1" ? 1 : 2, coord,
                                             lo, hi, &st);
    if (s != RTMS_OK) return report_error(s);
    std::printf("amplitude_ratio=%.10g\ncorrelation=%.10g\nsamples=%zu\n", st.amplitude_ratio, st.correlation,
                st.samples);
    return 0;
  }
  for (const auto& [sub, stage] : stages)
    if (sub->parsed()) return run_config(config, o, stage);
  return 1;
}
