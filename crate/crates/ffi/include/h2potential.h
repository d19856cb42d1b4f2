#ifndef H2POTENTIAL_H
#define H2POTENTIAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum H2pStatus {
  H2P_STATUS_OK = 0,
  H2P_STATUS_NULL_ARGUMENT = 1,
  H2P_STATUS_INVALID_UTF8 = 2,
  H2P_STATUS_CONFIG = 3,
  H2P_STATUS_INPUT = 4,
  H2P_STATUS_IO = 5,
  H2P_STATUS_STAGE = 6,
  H2P_STATUS_INFEASIBLE = 7,
  H2P_STATUS_OUT_OF_RANGE = 8,
  H2P_STATUS_PANIC = 9,
  H2P_STATUS_OTHER = 10,
} H2pStatus;

/**
 * A completed or in-progress pipeline run.
 */
typedef struct H2pPipeline H2pPipeline;

/**
 * A raster grid held by the library.
 */
typedef struct H2pRaster H2pRaster;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty if none. Valid until the next call.
 */
const char *h2p_last_error(void);

/**
 * Library version as a static string.
 */
const char *h2p_version(void);

/**
 * Opens a run from a TOML configuration. `out_dir` may be null to use the configured one.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum H2pStatus h2p_pipeline_open(const char *config_path,
                                 const char *out_dir,
                                 struct H2pPipeline **out);

/**
 * Number of stages; valid indices for `h2p_pipeline_run_through` are `0..count`.
 */
uint32_t h2p_stage_count(void);

/**
 * Directory name of stage `index`, or null when out of range.
 */
const char *h2p_stage_name(uint32_t index);

/**
 * Runs stage `index` and everything upstream of it that is not current.
 *
 * # Safety
 * `p` must come from `h2p_pipeline_open` and not be freed.
 */
enum H2pStatus h2p_pipeline_run_through(struct H2pPipeline *p, uint32_t index);

/**
 * Runs every stage and writes the manifest and report.
 *
 * # Safety
 * `p` must come from `h2p_pipeline_open` and not be freed.
 */
enum H2pStatus h2p_pipeline_run_all(struct H2pPipeline *p);

/**
 * 1 if the stage output is current, 0 otherwise (including a bad index).
 *
 * # Safety
 * `p` must come from `h2p_pipeline_open` and not be freed.
 */
int32_t h2p_pipeline_is_current(const struct H2pPipeline *p, uint32_t index);

/**
 * # Safety
 * `p` must be null or come from `h2p_pipeline_open`; it is invalid afterwards.
 */
void h2p_pipeline_free(struct H2pPipeline *p);

/**
 * Writes the synthetic 12-region study area into `out_dir`, with `config.toml` inside.
 *
 * # Safety
 * `out_dir` must be null or NUL-terminated.
 */
enum H2pStatus h2p_fixture_write(uint64_t seed, const char *out_dir);

/**
 * Loads an ESRI ASCII (`.asc`) or flat binary raster.
 *
 * # Safety
 * `path` must be null or NUL-terminated; `out` must be writable.
 */
enum H2pStatus h2p_raster_load(const char *path, struct H2pRaster **out);

/**
 * Builds a raster from `cols * rows` row-major values, row 0 north.
 *
 * # Safety
 * `values` must point to `cols * rows` doubles; `out` must be writable.
 */
enum H2pStatus h2p_raster_new(uintptr_t cols,
                              uintptr_t rows,
                              double origin_lon,
                              double origin_lat,
                              double cell_size,
                              double nodata,
                              const double *values,
                              struct H2pRaster **out);

/**
 * Writes columns and rows of `r`.
 *
 * # Safety
 * `r` must be a live raster handle; `cols` and `rows` must be writable.
 */
enum H2pStatus h2p_raster_dims(const struct H2pRaster *r, uintptr_t *cols, uintptr_t *rows);

/**
 * Copies all cells, row-major, into `buf` of length `len`.
 *
 * # Safety
 * `r` must be a live raster handle; `buf` must hold `len` doubles.
 */
enum H2pStatus h2p_raster_copy(const struct H2pRaster *r, double *buf, uintptr_t len);

/**
 * Distance in meters from every cell to the nearest non-zero cell of `features`.
 *
 * # Safety
 * `features` must be a live raster handle; `out` must be writable.
 */
enum H2pStatus h2p_distance_to_feature(const struct H2pRaster *features, struct H2pRaster **out);

/**
 * # Safety
 * `r` must be null or a raster handle; it is invalid afterwards.
 */
void h2p_raster_free(struct H2pRaster *r);

/**
 * Levelized cost of electricity in EUR/kWh.
 *
 * # Safety
 * `out` must be writable.
 */
enum H2pStatus h2p_lcoe(double capex_eur_per_kw,
                        double opex_share_per_year,
                        uint32_t lifetime_years,
                        double wacc,
                        double aep_kwh_per_kw,
                        double *out);

/**
 * Groundwater left for supplementary use, mm/a.
 */
double h2p_sustainable_yield(double share, double recharge_mm, double consumption_mm);

/**
 * Delivered cost of desalinated water in EUR/m³ with default plant and pipeline parameters.
 *
 * # Safety
 * `out` must be writable.
 */
enum H2pStatus h2p_desal_cost(double distance_to_coast_km,
                              double elevation_gain_m,
                              double electricity_eur_per_kwh,
                              double *out);

/**
 * Hydrogen (TWh, lower heating value) from converting `generation_twh` of electricity.
 */
double h2p_h2_potential_twh(double generation_twh, double efficiency_kwh_per_kg);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* H2POTENTIAL_H */
