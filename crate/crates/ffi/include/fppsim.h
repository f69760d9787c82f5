#ifndef FPPSIM_H
#define FPPSIM_H

#include <stddef.h>
#include <stdint.h>

/**
 * Result codes shared by every function.
 */
typedef enum FppStatus {
  FPP_STATUS_OK = 0,
  FPP_STATUS_NULL_POINTER = 1,
  FPP_STATUS_INVALID_ARGUMENT = 2,
  FPP_STATUS_REGION_TOO_SMALL = 3,
  FPP_STATUS_UNREACHABLE = 4,
  FPP_STATUS_PRECONDITION_FAILED = 5,
  FPP_STATUS_INTERNAL = 6,
} FppStatus;

/**
 * Opaque site configuration.
 */
typedef struct FppConfig FppConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *fpp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fpp_version(void);

/**
 * Samples `ball(0, radius)` as configuration `index` of `master_seed`.
 */
enum FppStatus fpp_config_sample_ball(uint32_t radius,
                                      uint64_t master_seed,
                                      uint64_t index,
                                      struct FppConfig **out);

/**
 * Constant configuration on `ball(0, radius)`: every site has time `time`
 * (0 or 1).
 */
enum FppStatus fpp_config_constant_ball(uint32_t radius, uint8_t time, struct FppConfig **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `cfg` must come from an `fpp_config_*` constructor and not be used again.
 */
void fpp_config_free(struct FppConfig *cfg);

/**
 * Time (0 or 1) of site `(u, v)`; sites outside the region read as closed.
 */
enum FppStatus fpp_config_site_time(const struct FppConfig *cfg,
                                    int32_t u,
                                    int32_t v,
                                    uint8_t *out);

/**
 * Content digest of the configuration.
 */
enum FppStatus fpp_config_digest(const struct FppConfig *cfg, uint64_t *out);

/**
 * `a_{0,n}`; the region must contain `ball(0, 3n)`.
 */
enum FppStatus fpp_point_to_point(const struct FppConfig *cfg, uint32_t n, uint32_t *out);

/**
 * `b_{0,n}`; the region must contain `ball(0, 3n)`.
 */
enum FppStatus fpp_point_to_line(const struct FppConfig *cfg, uint32_t n, uint32_t *out);

/**
 * `c_n`; the region must contain `ball(0, n)`.
 */
enum FppStatus fpp_point_to_ball_boundary(const struct FppConfig *cfg, uint32_t n, uint32_t *out);

/**
 * `T(∂B(m), ∂B(n))` inside the annulus, `1 <= m < n`.
 */
enum FppStatus fpp_annulus_time(const struct FppConfig *cfg, uint32_t m, uint32_t n, uint32_t *out);

/**
 * Largest number of disjoint closed circuits surrounding `B(m)` in the
 * annulus up to `n`.
 */
enum FppStatus fpp_max_disjoint_circuits(const struct FppConfig *cfg,
                                         uint32_t m,
                                         uint32_t n,
                                         uint32_t *out);

/**
 * Loops separating the origin from `(n, 0)`; needs `ball(0, 12n)`.
 */
enum FppStatus fpp_separating_loop_count(const struct FppConfig *cfg, uint32_t n, uint32_t *out);

/**
 * Loops separating the origin from the half-plane `{x >= n}`.
 */
enum FppStatus fpp_halfplane_loop_count(const struct FppConfig *cfg, uint32_t n, uint32_t *out);

/**
 * Sweeps `statistic` (a NUL-terminated name such as `"cn"`) over
 * `schedule[0..len]` and writes one mean and standard error per scale.
 * `threads == 0` uses every core; the output does not depend on it.
 *
 * # Safety
 * `schedule` must hold `len` values; `means` and `std_errors` must have
 * room for `len` values each.
 */
enum FppStatus fpp_sweep(const char *statistic,
                         const uint32_t *schedule,
                         size_t len,
                         uint64_t samples,
                         uint64_t master_seed,
                         size_t threads,
                         double *means,
                         double *std_errors);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FPPSIM_H */
