#ifndef WFR_H
#define WFR_H

#include <stddef.h>
#include <stdint.h>

// Glazing codes accepted by the `glazing` parameters.
typedef enum WfrGlazing {
  WFR_GLAZING_SINGLE = 0,
  WFR_GLAZING_DOUBLE = 1,
  WFR_GLAZING_TRIPLE = 2,
} WfrGlazing;

// Result codes returned by every fallible function.
typedef enum WfrStatus {
  WFR_STATUS_OK = 0,
  WFR_STATUS_NULL_POINTER = 1,
  WFR_STATUS_INVALID_ARGUMENT = 2,
  WFR_STATUS_IO = 3,
  WFR_STATUS_PARSE = 4,
  WFR_STATUS_SIMULATION = 5,
  WFR_STATUS_BUFFER_TOO_SMALL = 6,
  WFR_STATUS_PANIC = 7,
} WfrStatus;

// Room, assembly, model and comfort settings.
typedef struct WfrConfig WfrConfig;

// Parsed weather year.
typedef struct WfrWeather WfrWeather;

typedef struct WfrSite {
  double latitude;
  double longitude;
  double timezone;
  double elevation;
  size_t records;
  size_t missing;
} WfrSite;

typedef struct WfrDegreeHours {
  double hdh;
  double cdh;
  double tdh;
} WfrDegreeHours;

typedef struct WfrBreakdown {
  struct WfrDegreeHours annual;
  struct WfrDegreeHours winter;
  struct WfrDegreeHours spring;
  struct WfrDegreeHours summer;
  struct WfrDegreeHours autumn;
} WfrBreakdown;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *wfr_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *wfr_version(void);

// Parse an EPW file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a writable pointer.
enum WfrStatus wfr_weather_open(const char *path, struct WfrWeather **out);

// Parse EPW text held in memory.
//
// # Safety
// `data` must point to `len` readable bytes and `out` must be writable.
enum WfrStatus wfr_weather_from_buffer(const uint8_t *data, size_t len, struct WfrWeather **out);

// # Safety
// `weather` is null or a handle not yet freed.
void wfr_weather_free(struct WfrWeather *weather);

// Site metadata and record counts.
//
// # Safety
// `weather` must be a live handle and `out` writable.
enum WfrStatus wfr_weather_site(const struct WfrWeather *weather, struct WfrSite *out);

// Build a configuration from TOML text; unspecified keys take defaults.
//
// # Safety
// `toml` must be a NUL-terminated string and `out` writable.
enum WfrStatus wfr_config_from_toml(const char *toml, struct WfrConfig **out);

// # Safety
// `config` is null or a handle not yet freed.
void wfr_config_free(struct WfrConfig *config);

// Seasonal and annual degree-hours for one room.
//
// # Safety
// `weather` must be a live handle, `config` null or live, `out` writable.
enum WfrStatus wfr_simulate(const struct WfrWeather *weather,
                            const struct WfrConfig *config,
                            uint32_t glazing,
                            double orientation_deg,
                            double width_m,
                            struct WfrBreakdown *out);

// Hourly operative temperature for one room.
//
// # Safety
// `weather` must be a live handle, `config` null or live, and `out` must
// point to `len` writable doubles.
enum WfrStatus wfr_simulate_hourly(const struct WfrWeather *weather,
                                   const struct WfrConfig *config,
                                   uint32_t glazing,
                                   double orientation_deg,
                                   double width_m,
                                   double *out,
                                   size_t len);

// Window-to-floor ratio of the configured room at `width_m`.
//
// # Safety
// `config` null or live; `out` writable.
enum WfrStatus wfr_room_wfr(const struct WfrConfig *config, double width_m, double *out);

// Copies the standard window-width grid into `out`. `count` always receives
// the grid length; pass a null `out` to query it.
//
// # Safety
// `out` is null or points to `len` writable doubles; `count` is writable.
enum WfrStatus wfr_width_grid(double *out, size_t len, size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WFR_H */
