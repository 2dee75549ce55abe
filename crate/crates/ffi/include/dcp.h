#ifndef DCP_H
#define DCP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DcpStatus {
  DCP_STATUS_OK = 0,
  DCP_STATUS_NULL_POINTER = 1,
  DCP_STATUS_INVALID_ARGUMENT = 2,
  DCP_STATUS_CONFIG = 3,
  DCP_STATUS_IO = 4,
  DCP_STATUS_DATA = 5,
  DCP_STATUS_CORRUPT = 6,
  DCP_STATUS_VERIFICATION = 7,
  DCP_STATUS_PANIC = 8,
} DcpStatus;

/**
 * Experiment settings. Starts at the baseline configuration.
 */
typedef struct DcpConfig DcpConfig;

/**
 * Per-frame and summary results of one run.
 */
typedef struct DcpResult DcpResult;

/**
 * A loaded or generated frame trace.
 */
typedef struct DcpTrace DcpTrace;

/**
 * Traffic totals, in bits and 128-bit bursts.
 */
typedef struct DcpTraffic {
  uint64_t uncompressed_bits;
  uint64_t payload_bits;
  uint64_t csb_bits;
  uint64_t uncompressed_bursts;
  uint64_t charged_bursts;
  uint64_t csb_bursts;
} DcpTraffic;

/**
 * One measured frame. `coverage` is negative when undefined.
 */
typedef struct DcpFrameStats {
  uint64_t frame;
  struct DcpTraffic traffic;
  double rate;
  double coverage;
  uint32_t ccd_size;
  bool compression_enabled;
  uint64_t vdcp_blocks;
  uint64_t ras_blocks;
  uint64_t rccd_bytes;
} DcpFrameStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *dcp_last_error(void);

const char *dcp_version(void);

/**
 * Bursts charged for a block with `payload_bits` of compressed data.
 */
uint32_t dcp_charge_block(uint32_t payload_bits);

/**
 * # Safety
 * `scheme` must be a valid C string and `out_bits` writable.
 */
enum DcpStatus dcp_csb_bits(uint32_t width,
                            uint32_t height,
                            const char *scheme,
                            uint64_t *out_bits);

/**
 * # Safety
 * `out` must be writable.
 */
enum DcpStatus dcp_config_new(struct DcpConfig **out);

/**
 * # Safety
 * `config` must come from [`dcp_config_new`] or be null.
 */
void dcp_config_free(struct DcpConfig *config);

/**
 * Applies settings from a TOML file on top of the current ones.
 *
 * # Safety
 * `config` must be a live handle and `path` a valid C string.
 */
enum DcpStatus dcp_config_load(struct DcpConfig *config, const char *path);

/**
 * Sets one option by its command-line name (without dashes), e.g.
 * `scheme`, `fvc-size`, `policy`, `assoc`, `pixel-sampling`,
 * `frame-sampling`, `ccd-size`, `vdcp-sizing`, `ct`, `accounting`, `seed`,
 * `verify-full`, `verify-fraction`, `parallel`. The whole configuration is
 * revalidated; on failure it is left unchanged.
 *
 * # Safety
 * `config` must be a live handle; `key` and `value` valid C strings.
 */
enum DcpStatus dcp_config_set(struct DcpConfig *config, const char *key, const char *value);

/**
 * Loads a trace directory.
 *
 * # Safety
 * `path` must be a valid C string and `out` writable.
 */
enum DcpStatus dcp_trace_load(const char *path, struct DcpTrace **out);

/**
 * Builds a trace from `frame_count` packed RGBA8888 frames stored back to
 * back in `rgba` (`len` bytes).
 *
 * # Safety
 * `name` must be a valid C string, `rgba` readable for `len` bytes, `out`
 * writable.
 */
enum DcpStatus dcp_trace_from_rgba(const char *name,
                                   uint32_t width,
                                   uint32_t height,
                                   uint32_t frame_count,
                                   const uint8_t *rgba,
                                   size_t len,
                                   struct DcpTrace **out);

/**
 * Generates a synthetic trace (`ui-like`, `2d-like`, `noise`, `gradient`).
 *
 * # Safety
 * `generator` must be a valid C string and `out` writable.
 */
enum DcpStatus dcp_trace_generate(const char *generator,
                                  uint32_t width,
                                  uint32_t height,
                                  uint32_t frame_count,
                                  uint64_t seed,
                                  struct DcpTrace **out);

/**
 * # Safety
 * `trace` must come from a `dcp_trace_*` constructor or be null.
 */
void dcp_trace_free(struct DcpTrace *trace);

/**
 * Frame count, or 0 for a null handle.
 *
 * # Safety
 * `trace` must be a live handle or null.
 */
uint32_t dcp_trace_frame_count(const struct DcpTrace *trace);

/**
 * Runs the configured scheme over `trace`.
 *
 * # Safety
 * `trace` and `config` must be live handles; `out` writable.
 */
enum DcpStatus dcp_run(const struct DcpTrace *trace,
                       const struct DcpConfig *config,
                       struct DcpResult **out);

/**
 * # Safety
 * `result` must come from [`dcp_run`] or be null.
 */
void dcp_result_free(struct DcpResult *result);

/**
 * Workload compression rate, or NaN for a null handle.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
double dcp_result_rate(const struct DcpResult *result);

/**
 * Number of measured frames (the warm-up frame is not included).
 *
 * # Safety
 * `result` must be a live handle or null.
 */
uint32_t dcp_result_frame_count(const struct DcpResult *result);

/**
 * # Safety
 * `result` must be a live handle and `out` writable.
 */
enum DcpStatus dcp_result_totals(const struct DcpResult *result, struct DcpTraffic *out);

/**
 * # Safety
 * `result` must be a live handle and `out` writable.
 */
enum DcpStatus dcp_result_frame(const struct DcpResult *result,
                                uint32_t index,
                                struct DcpFrameStats *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DCP_H */
