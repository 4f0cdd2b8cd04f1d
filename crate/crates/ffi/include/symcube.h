#ifndef SYMCUBE_H
#define SYMCUBE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes; values are stable.
 */
typedef enum SymcubeStatus {
  SYMCUBE_STATUS_OK = 0,
  SYMCUBE_STATUS_NULL_POINTER = 1,
  SYMCUBE_STATUS_INVALID_INPUT = 2,
  SYMCUBE_STATUS_CONFIG = 3,
  SYMCUBE_STATUS_RESOURCE = 4,
  SYMCUBE_STATUS_NETWORK = 5,
  SYMCUBE_STATUS_INTEGRITY = 6,
  SYMCUBE_STATUS_NUMERICAL = 7,
  SYMCUBE_STATUS_ASSERTION = 8,
  SYMCUBE_STATUS_PANIC = 9,
} SymcubeStatus;

/**
 * Opaque handle: symmetric-cube coefficients and kernel tables of one form.
 */
typedef struct SymcubeForm SymcubeForm;

/**
 * One central value, the fields of a value-store row.
 */
typedef struct SymcubeCentralValue {
  int64_t d;
  int32_t epsilon;
  double l_half;
  double l1_chi;
  uint64_t n_cut;
} SymcubeCentralValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length, 0 when
 * there is none.
 *
 * # Safety
 * `buf` must be valid for `len` bytes or null.
 */
size_t symcube_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *symcube_version(void);

/**
 * Kronecker symbol `(d/n)`.
 */
int32_t symcube_kronecker(int64_t d, uint64_t n);

/**
 * Class number of the imaginary quadratic field of discriminant `d`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SymcubeStatus symcube_class_number(int64_t d, uint64_t *out);

/**
 * `L(1, χ_d)`, cross-checked between the class-number formula and the
 * rapidly converging series.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SymcubeStatus symcube_l1(int64_t d, double *out);

/**
 * Builds the level-one form of `weight` with `n_max` coefficients and the
 * default numerical settings.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle to free
 * with [`symcube_form_free`].
 */
enum SymcubeStatus symcube_form_new(uint32_t weight, uint64_t n_max, struct SymcubeForm **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `form` must come from [`symcube_form_new`] and not be used afterwards.
 */
void symcube_form_free(struct SymcubeForm *form);

/**
 * Largest `|d|` whose central value the handle's coefficients support.
 *
 * # Safety
 * `form` must be a live handle or null (which yields 0).
 */
uint64_t symcube_form_max_discriminant(const struct SymcubeForm *form);

/**
 * `L(1/2, sym³ f × χ_d)` with an empirically determined root number.
 *
 * # Safety
 * `form` must be a live handle and `out` a valid pointer.
 */
enum SymcubeStatus symcube_central_value(const struct SymcubeForm *form,
                                         int64_t d,
                                         struct SymcubeCentralValue *out);

/**
 * Root number of `L(s, sym³ f × χ_d)` from the balanced sums.
 *
 * # Safety
 * `form` must be a live handle and `out` a valid pointer.
 */
enum SymcubeStatus symcube_root_number(const struct SymcubeForm *form, int64_t d, int32_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMCUBE_H */
