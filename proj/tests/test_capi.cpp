#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "rtms/rtm_scatter.h"

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "rtms_test_capi";
  std::filesystem::create_directories(dir);
  return dir / name;
}

const char* kConfig = R"(
[grid]
nx1 = 121
nx2 = 131
dx = 10 m
origin_x1 = -300 m
origin_x2 = -300 m
[velocity]
model = gradient
c0 = 2000 m/s
gradient = 0.5 1/s
[packet.a]
center_x1 = 300 m
center_x2 = 350 m
k1 = 0 rad/m
k2 = 0.04 rad/m
width1 = 60 m
width2 = 60 m
amplitude = 0.01
[source]
x1 = 300 m
x2 = 0 m
peak_frequency = 12 Hz
[time]
dt = 1 ms
nt = 700
dft_stride = 4
[sponge]
width = 25
strength = 0.004
[acquisition]
x1_min = 0 m
x1_max = 600 m
[imaging]
f_lo = 3 Hz
f_hi = 25 Hz
nfreq = 24
zone_x1_min = 50 m
zone_x2_min = 10 m
zone_x1_max = 550 m
zone_x2_max = 550 m
[output]
dir = out
prefix = c
)";

std::string write_config(const std::string& name, const std::string& text) {
  const auto p = scratch(name);
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST(CApi, NullArgumentsAreRejected) {
  EXPECT_EQ(rtms_config_load(nullptr, nullptr), RTMS_ERR_ARGUMENT);
  EXPECT_GT(std::strlen(rtms_last_error()), 0u);
  rtms_report* rep = nullptr;
  EXPECT_EQ(rtms_run(nullptr, RTMS_STAGE_ALL, &rep), RTMS_ERR_ARGUMENT);
  EXPECT_EQ(rep, nullptr);
  EXPECT_EQ(rtms_config_set_force(nullptr, 1), RTMS_ERR_ARGUMENT);
  EXPECT_EQ(rtms_report_metric_count(nullptr), 0u);
  rtms_config_free(nullptr);
  rtms_report_free(nullptr);
}

TEST(CApi, StatusCodesFollowErrorKinds) {
  rtms_config* cfg = nullptr;
  EXPECT_EQ(rtms_config_load(scratch("missing.ini").c_str(), &cfg), RTMS_ERR_CONFIG);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_EQ(rtms_config_load(write_config("bad.ini", "[grid]\nnx1 = 3\n").c_str(), &cfg), RTMS_ERR_CONFIG);
  EXPECT_NE(std::string(rtms_last_error()).find("dx"), std::string::npos);

  ASSERT_EQ(rtms_config_load(write_config("ok.ini", kConfig).c_str(), &cfg), RTMS_OK);
  EXPECT_STREQ(rtms_last_error(), "");
  EXPECT_EQ(rtms_config_set_taper(cfg, 0.7), RTMS_ERR_CONFIG);
  EXPECT_EQ(rtms_config_set_grazing_delta(cfg, 0.0), RTMS_ERR_CONFIG);
  EXPECT_EQ(rtms_config_set_condition(cfg, static_cast<rtms_condition>(9)), RTMS_ERR_ARGUMENT);
  EXPECT_EQ(rtms_config_set_mute(cfg, 1), RTMS_OK);
  rtms_report* rep = nullptr;
  EXPECT_EQ(rtms_run(cfg, static_cast<rtms_stage>(42), &rep), RTMS_ERR_ARGUMENT);
  rtms_config_free(cfg);

  EXPECT_STREQ(rtms_status_name(RTMS_ERR_SME), "source multipath violation");
}

TEST(CApi, ApertureStageAndCompare) {
  rtms_config* cfg = nullptr;
  ASSERT_EQ(rtms_config_load(write_config("run.ini", kConfig).c_str(), &cfg), RTMS_OK);
  ASSERT_EQ(rtms_config_set_output_dir(cfg, scratch("out").c_str()), RTMS_OK);
  rtms_report* rep = nullptr;
  ASSERT_EQ(rtms_run(cfg, RTMS_STAGE_APERTURE, &rep), RTMS_OK) << rtms_last_error();
  rtms_config_free(cfg);

  double v = -1.0;
  EXPECT_EQ(rtms_report_find(rep, "sme.holds", &v), RTMS_OK);
  EXPECT_EQ(v, 1.0);
  EXPECT_EQ(rtms_report_find(rep, "no.such.key", &v), RTMS_ERR_ARGUMENT);
  const char* prev = "";
  for (size_t i = 0; i < rtms_report_metric_count(rep); ++i) {
    const char* key = nullptr;
    ASSERT_EQ(rtms_report_metric(rep, i, &key, &v), RTMS_OK);
    EXPECT_LT(std::strcmp(prev, key), 0);
    prev = key;
  }
  const char* path = nullptr;
  const char* hash = nullptr;
  ASSERT_GT(rtms_report_file_count(rep), 0u);
  EXPECT_EQ(rtms_report_file(rep, 0, &path, &hash), RTMS_OK);
  EXPECT_EQ(std::strlen(hash), 16u);
  EXPECT_EQ(rtms_report_file(rep, rtms_report_file_count(rep), &path, &hash), RTMS_ERR_ARGUMENT);
  rtms_report_free(rep);

  const std::string truth = (scratch("out") / "c_dc_true.rtmf").string();
  rtms_trace_stats st{};
  ASSERT_EQ(rtms_compare_files(truth.c_str(), truth.c_str(), 1, 300.0, 200.0, 500.0, &st), RTMS_OK)
      << rtms_last_error();
  EXPECT_NEAR(st.amplitude_ratio, 1.0, 1e-12);
  EXPECT_NEAR(st.correlation, 1.0, 1e-12);
  EXPECT_EQ(st.samples, 31u);
  EXPECT_EQ(rtms_compare_files(truth.c_str(), truth.c_str(), 1, 305.0, 200.0, 500.0, &st), RTMS_ERR_GEOMETRY);
  EXPECT_EQ(rtms_compare_files(truth.c_str(), scratch("nope.rtmf").c_str(), 1, 300.0, 0.0, 1.0, &st),
            RTMS_ERR_IO);
}
