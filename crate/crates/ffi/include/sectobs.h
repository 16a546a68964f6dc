#ifndef SECTOBS_H
#define SECTOBS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum SectobsCode {
  SECTOBS_CODE_OK = 0,
  SECTOBS_CODE_NULL_POINTER = 1,
  SECTOBS_CODE_INVALID_UTF8 = 2,
  SECTOBS_CODE_INVALID_INPUT = 3,
  SECTOBS_CODE_UNSUPPORTED_VERSION = 4,
  SECTOBS_CODE_VERIFY_FAILED = 5,
  SECTOBS_CODE_PANIC = 6,
} SectobsCode;

// Outcome of the analysis of one curve.
typedef enum SectobsStatus {
  SECTOBS_STATUS_CERTIFIED = 0,
  SECTOBS_STATUS_FAILED_LOCAL = 1,
  SECTOBS_STATUS_FAILED_LEMMA = 2,
  SECTOBS_STATUS_FAILED_RANK = 3,
  SECTOBS_STATUS_FAILED_INDEPENDENCE = 4,
  SECTOBS_STATUS_INCONCLUSIVE = 5,
} SectobsStatus;

// Opaque certificate handle.
typedef struct SectobsCertificate SectobsCertificate;

// The three verdicts of a certificate.
typedef struct SectobsVerdicts {
  bool everywhere_locally_solvable;
  bool no_rational_deg1_class;
  bool qualifies;
} SectobsVerdicts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *sectobs_last_error(void);

// Library version as a static string.
const char *sectobs_version(void);

// Analyzes `Y^2 = 2(X^2 + p)(X^2 + 2p)(X^2 + a)`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum SectobsCode sectobs_analyze_family(uint64_t p, int64_t a, struct SectobsCertificate **out);

// Analyzes the curve with comma-separated coefficients `f6,...,f0`.
//
// # Safety
// `coeffs` must be a nul-terminated string and `out` valid for one handle.
enum SectobsCode sectobs_analyze_coeffs(const char *coeffs,
                                        int64_t height_bound,
                                        struct SectobsCertificate **out);

// Parses a certificate from its JSON text.
//
// # Safety
// `json` must be a nul-terminated string and `out` valid for one handle.
enum SectobsCode sectobs_certificate_from_json(const char *json, struct SectobsCertificate **out);

// Canonical JSON of the certificate, released with [`sectobs_string_free`].
//
// # Safety
// `cert` must be a live handle and `out` valid for one pointer.
enum SectobsCode sectobs_certificate_to_json(const struct SectobsCertificate *cert, char **out);

// # Safety
// `cert` must be a live handle and `out` valid for one value.
enum SectobsCode sectobs_certificate_status(const struct SectobsCertificate *cert,
                                            enum SectobsStatus *out);

// # Safety
// `cert` must be a live handle and `out` valid for one value.
enum SectobsCode sectobs_certificate_verdicts(const struct SectobsCertificate *cert,
                                              struct SectobsVerdicts *out);

// Replays the evidence. Returns [`SectobsCode::VerifyFailed`] with the failing
// checks in the error message when it does not hold up.
//
// # Safety
// `cert` must be a live handle.
enum SectobsCode sectobs_certificate_verify(const struct SectobsCertificate *cert);

// # Safety
// `cert` must be null or a handle not yet freed.
void sectobs_certificate_free(struct SectobsCertificate *cert);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void sectobs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SECTOBS_H */
