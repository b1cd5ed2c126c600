#ifndef CIRCLECOUNT_H
#define CIRCLECOUNT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CcStatus {
  CC_STATUS_OK = 0,
  CC_STATUS_NULL_POINTER = 1,
  CC_STATUS_INVALID_ARGUMENT = 2,
  CC_STATUS_DECODE_ERROR = 3,
  CC_STATUS_OUT_OF_RANGE = 4,
  CC_STATUS_INTERNAL_ERROR = 5,
  CC_STATUS_PANIC = 6,
} CcStatus;

/**
 * Values accepted by [`cc_config_set_tone_map`].
 */
typedef enum CcToneMap {
  /**
   * Each class is painted with its mean level (the default).
   */
  CC_TONE_MAP_CLASS_MEAN = 0,
  /**
   * Classes are painted with evenly spaced tones.
   */
  CC_TONE_MAP_EVEN = 1,
} CcToneMap;

/**
 * Opaque pipeline configuration.
 */
typedef struct CcConfig CcConfig;

/**
 * Opaque RGB frame.
 */
typedef struct CcImage CcImage;

/**
 * Opaque result of one counting run.
 */
typedef struct CcReport CcReport;

/**
 * One detected circle.
 */
typedef struct CcCircle {
  uint32_t cx;
  uint32_t cy;
  uint32_t radius;
  uint32_t votes;
  double score;
} CcCircle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *cc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cc_version(void);

/**
 * Copies `len == 3 * width * height` interleaved RGB bytes into a new image.
 *
 * # Safety
 * `data` must point to `len` readable bytes and `out` to writable storage
 * for one pointer.
 */
enum CcStatus cc_image_from_rgb(size_t width,
                                size_t height,
                                const uint8_t *data,
                                size_t len,
                                struct CcImage **out);

/**
 * Copies `len == width * height` gray bytes into a new image, replicated
 * into three channels.
 *
 * # Safety
 * As for [`cc_image_from_rgb`].
 */
enum CcStatus cc_image_from_gray(size_t width,
                                 size_t height,
                                 const uint8_t *data,
                                 size_t len,
                                 struct CcImage **out);

/**
 * Decodes a binary P5 or P6 stream.
 *
 * # Safety
 * `bytes` must point to `len` readable bytes and `out` to writable storage
 * for one pointer.
 */
enum CcStatus cc_image_decode_pnm(const uint8_t *bytes, size_t len, struct CcImage **out);

/**
 * # Safety
 * `image` must be NULL or a live handle from this library.
 */
size_t cc_image_width(const struct CcImage *image);

/**
 * # Safety
 * `image` must be NULL or a live handle from this library.
 */
size_t cc_image_height(const struct CcImage *image);

/**
 * # Safety
 * `image` must be NULL or a handle from this library not yet freed.
 */
void cc_image_free(struct CcImage *image);

/**
 * New configuration holding the default parameters.
 */
struct CcConfig *cc_config_new(void);

/**
 * # Safety
 * `config` must be NULL or a handle from this library not yet freed.
 */
void cc_config_free(struct CcConfig *config);

/**
 * # Safety
 * `config` must be NULL or a live handle from this library.
 */
enum CcStatus cc_config_set_sigma(struct CcConfig *config, double sigma);

/**
 * `classes` must be 2 or 4.
 *
 * # Safety
 * `config` must be NULL or a live handle from this library.
 */
enum CcStatus cc_config_set_otsu_classes(struct CcConfig *config, uint32_t classes);

/**
 * `tone_map` is a [`CcToneMap`] value.
 *
 * # Safety
 * `config` must be NULL or a live handle from this library.
 */
enum CcStatus cc_config_set_tone_map(struct CcConfig *config, uint32_t tone_map);

/**
 * # Safety
 * `config` must be NULL or a live handle from this library.
 */
enum CcStatus cc_config_set_radius_range(struct CcConfig *config, uint32_t r_min, uint32_t r_max);

/**
 * # Safety
 * `config` must be NULL or a live handle from this library.
 */
enum CcStatus cc_config_set_theta_step(struct CcConfig *config, uint32_t degrees);

/**
 * # Safety
 * `config` must be NULL or a live handle from this library.
 */
enum CcStatus cc_config_set_vote_fraction(struct CcConfig *config, double fraction);

/**
 * # Safety
 * `config` must be NULL or a live handle from this library.
 */
enum CcStatus cc_config_set_min_center_dist(struct CcConfig *config, double pixels);

/**
 * Runs the full pipeline. A NULL `config` means the defaults.
 *
 * # Safety
 * `image` must be a live image handle, `config` NULL or a live config
 * handle, and `out` writable storage for one pointer.
 */
enum CcStatus cc_count(const struct CcImage *image,
                       const struct CcConfig *config,
                       struct CcReport **out);

/**
 * # Safety
 * `report` must be NULL or a live handle from this library.
 */
size_t cc_report_count(const struct CcReport *report);

/**
 * True when the frame had too few intensity levels to threshold.
 *
 * # Safety
 * `report` must be NULL or a live handle from this library.
 */
bool cc_report_degenerate(const struct CcReport *report);

/**
 * Total pipeline time in microseconds.
 *
 * # Safety
 * `report` must be NULL or a live handle from this library.
 */
uint64_t cc_report_elapsed_us(const struct CcReport *report);

/**
 * Copies detection `index` (strongest first) into `out`.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum CcStatus cc_report_circle(const struct CcReport *report, size_t index, struct CcCircle *out);

/**
 * # Safety
 * `report` must be NULL or a handle from this library not yet freed.
 */
void cc_report_free(struct CcReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCLECOUNT_H */
