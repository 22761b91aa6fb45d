#ifndef RTM_SCATTER_H
#define RTM_SCATTER_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(RTM_SCATTER_BUILD)
#    define RTMS_API __declspec(dllexport)
#  else
#    define RTMS_API __declspec(dllimport)
#  endif
#else
#  define RTMS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 2..4 double as process exit codes of the command-line tool. */
typedef enum rtms_status {
  RTMS_OK = 0,
  RTMS_ERR_ARGUMENT = 1,
  RTMS_ERR_CONFIG = 2,
  RTMS_ERR_INSTABILITY = 3,
  RTMS_ERR_SME = 4,
  RTMS_ERR_GEOMETRY = 5,
  RTMS_ERR_IO = 6,
  RTMS_ERR_INTERNAL = 7
} rtms_status;

typedef enum rtms_stage {
  RTMS_STAGE_FORWARD = 0,
  RTMS_STAGE_MIGRATE = 1,
  RTMS_STAGE_IMAGE = 2,
  RTMS_STAGE_APERTURE = 3,
  RTMS_STAGE_ALL = 4
} rtms_stage;

typedef enum rtms_condition {
  RTMS_CONDITION_RATIO = 0,
  RTMS_CONDITION_EXCITATION = 1,
  RTMS_CONDITION_XCORR = 2
} rtms_condition;

typedef struct rtms_config rtms_config;
typedef struct rtms_report rtms_report;

typedef struct rtms_trace_stats {
  double amplitude_ratio;
  double correlation;
  size_t samples;
} rtms_trace_stats;

/* Message of the last failed call on this thread; "" when none. */
RTMS_API const char* rtms_last_error(void);
RTMS_API const char* rtms_status_name(rtms_status s);

RTMS_API rtms_status rtms_config_load(const char* path, rtms_config** out);
RTMS_API void rtms_config_free(rtms_config* cfg);
RTMS_API rtms_status rtms_config_set_condition(rtms_config* cfg, rtms_condition c);
RTMS_API rtms_status rtms_config_set_force(rtms_config* cfg, int on);
RTMS_API rtms_status rtms_config_set_taper(rtms_config* cfg, double fraction);
RTMS_API rtms_status rtms_config_set_grazing_delta(rtms_config* cfg, double delta);
RTMS_API rtms_status rtms_config_set_mute(rtms_config* cfg, int on);
RTMS_API rtms_status rtms_config_set_output_dir(rtms_config* cfg, const char* dir);

RTMS_API rtms_status rtms_run(const rtms_config* cfg, rtms_stage stage, rtms_report** out);
RTMS_API rtms_status rtms_oracle(const rtms_config* cfg, rtms_report** out);

RTMS_API size_t rtms_report_metric_count(const rtms_report* r);
/* Metrics are ordered by key. Pointers stay valid until rtms_report_free. */
RTMS_API rtms_status rtms_report_metric(const rtms_report* r, size_t i, const char** key, double* value);
RTMS_API rtms_status rtms_report_find(const rtms_report* r, const char* key, double* value);
RTMS_API size_t rtms_report_file_count(const rtms_report* r);
RTMS_API rtms_status rtms_report_file(const rtms_report* r, size_t i, const char** path, const char** hash);
RTMS_API void rtms_report_free(rtms_report* r);

/* axis 1: profile along x2 at x1 = coord; axis 2: along x1 at x2 = coord. */
RTMS_API rtms_status rtms_compare_files(const char* truth_path, const char* image_path, int axis, double coord,
                                        double lo, double hi, rtms_trace_stats* out);

#ifdef __cplusplus
}
#endif

#endif
