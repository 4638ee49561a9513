#ifndef SEMION_H
#define SEMION_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SemionCode {
  SEMION_CODE_SEMION = 0,
  SEMION_CODE_KTC = 1,
} SemionCode;

typedef enum SemionDecoder {
  SEMION_DECODER_SIMPLE = 0,
  SEMION_DECODER_MWPM = 1,
} SemionDecoder;

typedef enum SemionNoise {
  SEMION_NOISE_INDEPENDENT = 0,
  SEMION_NOISE_DEPOLARIZING = 1,
} SemionNoise;

typedef enum SemionStatus {
  SEMION_STATUS_OK = 0,
  SEMION_STATUS_NULL_POINTER = 1,
  SEMION_STATUS_INVALID_ARGUMENT = 2,
  SEMION_STATUS_BUFFER_TOO_SMALL = 3,
  SEMION_STATUS_IO = 4,
  SEMION_STATUS_FORMAT = 5,
  SEMION_STATUS_DECODE = 6,
  SEMION_STATUS_PANIC = 7,
} SemionStatus;

/**
 * Opaque in-memory dataset.
 */
typedef struct SemionDataset SemionDataset;

/**
 * Opaque lattice handle.
 */
typedef struct SemionLattice SemionLattice;

/**
 * Opaque trained network.
 */
typedef struct SemionMlp SemionMlp;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *semion_last_error(void);

/**
 * Library version as a static string.
 */
const char *semion_version(void);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum SemionStatus semion_lattice_new(size_t d, struct SemionLattice **out_lattice);

/**
 * # Safety
 * `lattice` must come from `semion_lattice_new` and not be used afterwards.
 */
void semion_lattice_free(struct SemionLattice *lattice);

/**
 * Distance, edge, vertex and plaquette counts; zero for a null handle.
 *
 * # Safety
 * `lattice` must be null or a live handle.
 */
size_t semion_lattice_distance(const struct SemionLattice *lattice);

/**
 * # Safety
 * `lattice` must be null or a live handle.
 */
size_t semion_lattice_edges(const struct SemionLattice *lattice);

/**
 * # Safety
 * `lattice` must be null or a live handle.
 */
size_t semion_lattice_vertices(const struct SemionLattice *lattice);

/**
 * # Safety
 * `lattice` must be null or a live handle.
 */
size_t semion_lattice_plaquettes(const struct SemionLattice *lattice);

/**
 * Sample record `index` of stream `seed`: stabilizer bits (vertices, then
 * plaquettes; `bits_len >= 3 d²`) and the logical class left by `decoder`.
 *
 * # Safety
 * Pointers must be valid for the given lengths.
 */
enum SemionStatus semion_sample(const struct SemionLattice *lattice,
                                enum SemionNoise noise,
                                double p_eff,
                                enum SemionCode code,
                                enum SemionDecoder decoder,
                                uint64_t seed,
                                uint64_t index,
                                uint8_t *bits,
                                size_t bits_len,
                                uint8_t *label);

/**
 * Logical error rate over `n` samples of stream `seed`.
 *
 * # Safety
 * `p_bar` must be a valid pointer.
 */
enum SemionStatus semion_logical_rate(size_t d,
                                      enum SemionCode code,
                                      enum SemionNoise noise,
                                      double p_eff,
                                      enum SemionDecoder decoder,
                                      uint64_t n,
                                      uint64_t seed,
                                      double *p_bar);

/**
 * Place stabilizer bits on the 2d × 2d image, row-major; `cells_len >= 4 d²`.
 *
 * # Safety
 * Pointers must be valid for the given lengths.
 */
enum SemionStatus semion_syndrome_image(size_t d,
                                        const uint8_t *bits,
                                        size_t bits_len,
                                        uint8_t *cells,
                                        size_t cells_len);

/**
 * # Safety
 * `file` must be a NUL-terminated path and `out_mlp` a valid pointer.
 */
enum SemionStatus semion_mlp_load(const char *file, struct SemionMlp **out_mlp);

/**
 * # Safety
 * `mlp` must come from `semion_mlp_load` and not be used afterwards.
 */
void semion_mlp_free(struct SemionMlp *mlp);

/**
 * Input width; zero for a null handle.
 *
 * # Safety
 * `mlp` must be null or a live handle.
 */
size_t semion_mlp_input_dim(const struct SemionMlp *mlp);

/**
 * Most likely class for each of `rows` inputs stored row-major in `bits`.
 *
 * # Safety
 * `bits` must hold `rows * input_dim` bytes and `labels` `rows` bytes.
 */
enum SemionStatus semion_mlp_predict(const struct SemionMlp *mlp,
                                     const uint8_t *bits,
                                     size_t rows,
                                     uint8_t *labels);

/**
 * Read a whole SEMD file.
 *
 * # Safety
 * `file` must be a NUL-terminated path and `out_dataset` a valid pointer.
 */
enum SemionStatus semion_dataset_open(const char *file, struct SemionDataset **out_dataset);

/**
 * # Safety
 * `dataset` must come from `semion_dataset_open` and not be used afterwards.
 */
void semion_dataset_free(struct SemionDataset *dataset);

/**
 * Record count; zero for a null handle.
 *
 * # Safety
 * `dataset` must be null or a live handle.
 */
uint64_t semion_dataset_len(const struct SemionDataset *dataset);

/**
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t semion_dataset_distance(const struct SemionDataset *dataset);

/**
 * # Safety
 * `dataset` must be null or a live handle.
 */
double semion_dataset_p_eff(const struct SemionDataset *dataset);

/**
 * Cells (row-major, `4 d²`) and label of record `index`.
 *
 * # Safety
 * `cells` must hold `cells_len` bytes and `label` must be valid.
 */
enum SemionStatus semion_dataset_record(const struct SemionDataset *dataset,
                                        uint64_t index,
                                        uint8_t *cells,
                                        size_t cells_len,
                                        uint8_t *label);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEMION_H */
