#ifndef MACROPLACE_H
#define MACROPLACE_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code returned by every fallible `mp_*` function.
 */
typedef enum MpStatus {
  MP_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  MP_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8, or an option was out of range.
   */
  MP_STATUS_INVALID_ARGUMENT = 2,
  MP_STATUS_MISSING_FILE = 3,
  MP_STATUS_IO = 4,
  /**
   * Malformed input text, dangling pin references, or an unusable netlist.
   */
  MP_STATUS_MALFORMED = 5,
  /**
   * A node the operation needs has no location.
   */
  MP_STATUS_MISSING_LOCATION = 6,
  MP_STATUS_INVALID_DIMENSION = 7,
  /**
   * No legal macro arrangement could be found.
   */
  MP_STATUS_UNPLACEABLE = 8,
  MP_STATUS_LENGTH_MISMATCH = 9,
  MP_STATUS_DEGENERATE_INPUT = 10,
  MP_STATUS_INVALID_CONFIG = 11,
  /**
   * A Rust panic was caught at the boundary.
   */
  MP_STATUS_INTERNAL = 12,
} MpStatus;

typedef enum MpInit {
  MP_INIT_SPIRAL = 0,
  MP_INIT_GREEDY_PACK = 1,
} MpInit;

/**
 * A parsed netlist and its current node locations.
 */
typedef struct MpDesign MpDesign;

/**
 * Outcome of an annealing run.
 */
typedef struct MpSaRun MpSaRun;

/**
 * Grid shape and routing capacity. A capacity `<= 0` selects the default of
 * ten tracks per unit of cell boundary.
 */
typedef struct MpGridSpec {
  uint32_t cols;
  uint32_t rows;
  double h_capacity;
  double v_capacity;
} MpGridSpec;

typedef struct MpProxyOptions {
  double gamma;
  double lambda;
  uint32_t smooth_radius;
  double macro_h_usage;
  double macro_v_usage;
} MpProxyOptions;

/**
 * Annealing options. Zero selects the automatic value for `t_init`,
 * `epoch_len` and `fd_every`; `budget_seconds <= 0` means no time limit.
 * Action weights are ordered swap, shift, mirror, move, shuffle.
 */
typedef struct MpSaOptions {
  uint64_t seed;
  uint32_t workers;
  uint64_t max_steps;
  double t_init;
  double cooling_ratio;
  uint64_t epoch_len;
  uint32_t fd_every;
  uint32_t fd_iters;
  double budget_seconds;
  double action_weights[5];
  /**
   * An `MpInit` value.
   */
  uint32_t init;
  /**
   * Group std cells into per-grid-cell clusters before annealing.
   */
  bool cluster;
} MpSaOptions;

typedef struct MpDesignCounts {
  size_t nodes;
  size_t macros;
  size_t movable_macros;
  size_t std_cells;
  size_t ports;
  size_t nets;
  size_t pins;
} MpDesignCounts;

typedef struct MpBreakdown {
  double wirelength;
  double density;
  double congestion;
  double total;
} MpBreakdown;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

const char *mp_version(void);

struct MpGridSpec mp_grid_spec_default(void);

struct MpProxyOptions mp_proxy_options_default(void);

struct MpSaOptions mp_sa_options_default(void);

/**
 * Loads a `.aux` Bookshelf set or a native netlist file. `pl_path` may be
 * null; otherwise its locations are applied on top.
 */
enum MpStatus mp_design_load(const char *path, const char *pl_path, struct MpDesign **out);

/**
 * Parses native netlist text held in memory. Nodes start without locations.
 */
enum MpStatus mp_design_parse_native(const char *source, struct MpDesign **out);

void mp_design_free(struct MpDesign *design);

enum MpStatus mp_design_counts(const struct MpDesign *design, struct MpDesignCounts *out);

/**
 * Applies the locations in a `.pl` file to the design.
 */
enum MpStatus mp_design_read_placement(struct MpDesign *design, const char *pl_path);

enum MpStatus mp_design_write_placement(const struct MpDesign *design, const char *pl_path);

/**
 * Proxy cost of the design's current placement, optionally after grouping
 * std cells into grid clusters.
 */
enum MpStatus mp_evaluate(const struct MpDesign *design,
                          const struct MpGridSpec *grid,
                          const struct MpProxyOptions *proxy,
                          bool cluster,
                          struct MpBreakdown *out);

/**
 * Anneals the design's movable macros. The design itself is left untouched;
 * use `mp_sa_run_apply` to copy the best placement back.
 */
enum MpStatus mp_anneal(const struct MpDesign *design,
                        const struct MpGridSpec *grid,
                        const struct MpProxyOptions *proxy,
                        const struct MpSaOptions *options,
                        struct MpSaRun **out);

void mp_sa_run_free(struct MpSaRun *run);

/**
 * Best and initial costs of the winning worker.
 */
enum MpStatus mp_sa_run_costs(const struct MpSaRun *run,
                              struct MpBreakdown *best,
                              struct MpBreakdown *initial);

size_t mp_sa_run_best_worker(const struct MpSaRun *run);

size_t mp_sa_run_steps(const struct MpSaRun *run);

size_t mp_sa_run_trace_len(const struct MpSaRun *run);

/**
 * Copies up to `capacity` trace points of the winning worker into `steps`
 * and `costs` and returns how many were written.
 */
size_t mp_sa_run_trace(const struct MpSaRun *run, uint64_t *steps, double *costs, size_t capacity);

/**
 * Moves the design's nodes to the run's best placement. Std cells that were
 * clustered keep their locations.
 */
enum MpStatus mp_sa_run_apply(const struct MpSaRun *run, struct MpDesign *design);

/**
 * Kendall tau-b of two equal-length samples.
 */
enum MpStatus mp_kendall_tau(const double *xs, const double *ys, size_t n, double *out);

/**
 * Message for the most recent failure on the calling thread, or null if
 * none. Release it with `mp_string_free`.
 */
char *mp_last_error_message(void);

/**
 * Clears the calling thread's last error.
 */
void mp_clear_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void mp_string_free(char *s);

/**
 * Static, NUL-terminated name of a status code; "Unknown" for values
 * outside `MpStatus`.
 */
const char *mp_status_name(int status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MACROPLACE_H */
