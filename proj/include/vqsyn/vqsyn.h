// Copyright 2026 The vqsyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to the vqsyn toolkit: codebook redundancy analysis, synonym
 * dictionaries, synonym-swap ensemble generation and ensemble metrics.
 *
 * Conventions
 *  - Every object is an opaque handle released with its *_free function.
 *  - Fallible calls return vqs_status; on failure vqs_last_error() holds a
 *    message for the calling thread until its next failing call.
 *  - Byte outputs are returned in a vqs_buffer owned by the caller and
 *    released with vqs_buffer_free.
 *  - Undefined metric values (constant inputs, too few targets) are NaN.
 *  - `threads` <= 0 means all hardware threads; results never depend on it.
 */
#ifndef VQSYN_VQSYN_H
#define VQSYN_VQSYN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(VQSYN_BUILDING)
#    define VQS_API __declspec(dllexport)
#  else
#    define VQS_API __declspec(dllimport)
#  endif
#else
#  define VQS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vqs_status {
  VQS_OK = 0,
  VQS_ERR_INVALID_ARGUMENT = 1,
  VQS_ERR_MISMATCHED_LENGTHS = 2,
  VQS_ERR_DEGENERATE_GEOMETRY = 3,
  VQS_ERR_CHAIN_TOO_SHORT = 4,
  VQS_ERR_EVEN_WINDOW = 5,
  VQS_ERR_INVALID_INTERNAL_COORDINATE = 6,
  VQS_ERR_NEGATIVE_TAU = 7,
  VQS_ERR_TOO_FEW_SAMPLES = 8,
  VQS_ERR_DIMENSION_MISMATCH = 9,
  VQS_ERR_TOO_FEW_CODES = 10,
  VQS_ERR_TOKEN_OUT_OF_RANGE = 11,
  VQS_ERR_MISMATCHED_CODEBOOK = 12,
  VQS_ERR_SINGLE_CONFORMATION = 13,
  VQS_ERR_CONSTANT_INPUT = 14,
  VQS_ERR_TOO_FEW_CONFORMATIONS = 15,
  VQS_ERR_NON_SPD_COVARIANCE = 16,
  VQS_ERR_NO_CALPHA = 17,
  VQS_ERR_INCONSISTENT_MODELS = 18,
  VQS_ERR_MALFORMED_RECORD = 19,
  VQS_ERR_COORDINATE_OVERFLOW = 20,
  VQS_ERR_BAD_MAGIC = 21,
  VQS_ERR_UNSUPPORTED_VERSION = 22,
  VQS_ERR_TRUNCATED_FILE = 23,
  VQS_ERR_RAGGED_ROWS = 24,
  VQS_ERR_DUPLICATE_ROWS = 25,
  VQS_ERR_NON_INTEGER_TOKEN = 26,
  VQS_ERR_MISSING_HEADER = 27,
  VQS_ERR_BROKEN_CHAIN = 28,
  VQS_ERR_IO = 29,
  VQS_ERR_INTERNAL = 99
} vqs_status;

typedef enum vqs_codebook_format {
  VQS_CODEBOOK_AUTO = 0,
  VQS_CODEBOOK_CSV = 1,
  VQS_CODEBOOK_BINARY = 2
} vqs_codebook_format;

typedef struct vqs_ensemble vqs_ensemble;
typedef struct vqs_codebook vqs_codebook;
typedef struct vqs_dict vqs_dict;
typedef struct vqs_tokens vqs_tokens;
typedef struct vqs_reports vqs_reports;

typedef struct vqs_buffer {
  char* data;
  size_t size;
} vqs_buffer;

VQS_API void vqs_buffer_free(vqs_buffer* buffer);

VQS_API const char* vqs_last_error(void);
VQS_API const char* vqs_status_name(vqs_status status);
/* Nonzero for geometric/numeric failures, zero for input or usage errors. */
VQS_API int vqs_status_is_numeric(vqs_status status);
VQS_API const char* vqs_version(void);

/* Lower-case hex SHA-256 of `size` bytes; `out` receives 64 chars plus NUL. */
VQS_API vqs_status vqs_sha256_hex(const void* data, size_t size, char out[65]);

/* ---- Ensembles ---------------------------------------------------------- */

/* Parses CA atoms from fixed-column PDB text. chain_id 0 selects the first
 * chain seen; model_first = model_last = 0 reads every model. */
VQS_API vqs_status vqs_ensemble_parse_pdb(const char* text, size_t size, char chain_id, int model_first,
                                          int model_last, const char* label, vqs_ensemble** out);
/* `xyz` holds members * residues * 3 doubles, member-major. */
VQS_API vqs_status vqs_ensemble_from_coords(const double* xyz, size_t members, size_t residues, const char* label,
                                            vqs_ensemble** out);
VQS_API void vqs_ensemble_free(vqs_ensemble* ensemble);
VQS_API size_t vqs_ensemble_size(const vqs_ensemble* ensemble);
VQS_API size_t vqs_ensemble_residue_count(const vqs_ensemble* ensemble);
VQS_API vqs_status vqs_ensemble_coords(const vqs_ensemble* ensemble, size_t member, double* xyz_out);
/* Checks length >= 4, finite coordinates and CA spacing in (0.5, 10) A for every member. */
VQS_API vqs_status vqs_ensemble_validate_chains(const vqs_ensemble* ensemble);
VQS_API vqs_status vqs_ensemble_write_pdb(const vqs_ensemble* ensemble, vqs_buffer* out);
VQS_API vqs_status vqs_ensemble_align(const vqs_ensemble* ensemble, vqs_ensemble** out);

VQS_API vqs_status vqs_rmsd(const vqs_ensemble* a, size_t member_a, const vqs_ensemble* b, size_t member_b,
                            double* out);
VQS_API vqs_status vqs_tm_score(const vqs_ensemble* model, size_t member_model, const vqs_ensemble* reference,
                                size_t member_reference, double* out);

/* ---- Codebooks ---------------------------------------------------------- */

VQS_API vqs_status vqs_codebook_load(const void* data, size_t size, vqs_codebook_format format, vqs_codebook** out);
VQS_API vqs_status vqs_codebook_from_rows(const double* values, size_t codes, size_t dim, vqs_codebook** out);
/* Binary "TKCB" v1 image. */
VQS_API vqs_status vqs_codebook_save(const vqs_codebook* cb, vqs_buffer* out);
VQS_API void vqs_codebook_free(vqs_codebook* cb);
VQS_API size_t vqs_codebook_size(const vqs_codebook* cb);
VQS_API size_t vqs_codebook_dim(const vqs_codebook* cb);
VQS_API const char* vqs_codebook_id(const vqs_codebook* cb);
/* Descriptor window implied by the dimension, or 0 when there is none. */
VQS_API int vqs_codebook_window(const vqs_codebook* cb);
VQS_API vqs_status vqs_codebook_row(const vqs_codebook* cb, size_t code, double* out);
VQS_API vqs_status vqs_codebook_quantize(const vqs_codebook* cb, const double* values, size_t dim, int32_t* token);

typedef struct vqs_train_params {
  size_t codes;
  int window;
  int max_iters;
  uint64_t seed;
  int threads;
} vqs_train_params;

/* k-means over the descriptors of every member of every input ensemble.
 * `summary`, when non-null, receives a key=value training log. */
VQS_API vqs_status vqs_codebook_train(const vqs_ensemble* const* inputs, size_t n_inputs,
                                      const vqs_train_params* params, vqs_codebook** out, vqs_buffer* summary);

/* m*m row-major distances. */
VQS_API vqs_status vqs_codebook_distances(const vqs_codebook* cb, int threads, double* out);
VQS_API vqs_status vqs_codebook_distances_csv(const vqs_codebook* cb, int threads, vqs_buffer* out);
/* m*2 row-major coordinates and the two explained-variance fractions. */
VQS_API vqs_status vqs_codebook_project_2d(const vqs_codebook* cb, double* coords, double explained[2]);
VQS_API vqs_status vqs_codebook_projection_csv(const vqs_codebook* cb, vqs_buffer* out, double explained[2]);

typedef struct vqs_redundancy {
  double tau;
  double synonym_fraction;
  size_t component_count;
} vqs_redundancy;

/* `text`, when non-null, receives the full key=value report including the
 * set-size histogram and distance quantiles. */
VQS_API vqs_status vqs_redundancy_stats(const vqs_codebook* cb, double tau, int threads, vqs_redundancy* out,
                                        vqs_buffer* text);

/* ---- Synonym dictionaries ----------------------------------------------- */

VQS_API vqs_status vqs_dict_build(const vqs_codebook* cb, double tau, int threads, vqs_dict** out);
VQS_API vqs_status vqs_dict_parse_csv(const char* text, size_t size, const vqs_codebook* cb, vqs_dict** out);
VQS_API vqs_status vqs_dict_write_csv(const vqs_dict* dict, vqs_buffer* out);
VQS_API void vqs_dict_free(vqs_dict* dict);
VQS_API size_t vqs_dict_size(const vqs_dict* dict);
/* The returned pointer stays valid for the lifetime of `dict`. */
VQS_API vqs_status vqs_dict_entry(const vqs_dict* dict, size_t code, const int32_t** members, size_t* count);

/* ---- Token sequences ---------------------------------------------------- */

VQS_API vqs_status vqs_tokens_create(const char* codebook_id, int window, vqs_tokens** out);
VQS_API vqs_status vqs_tokens_append(vqs_tokens* tokens, const int32_t* values, size_t length);
VQS_API vqs_status vqs_tokens_parse(const char* text, size_t size, vqs_tokens** out);
VQS_API vqs_status vqs_tokens_write(const vqs_tokens* tokens, vqs_buffer* out);
VQS_API void vqs_tokens_free(vqs_tokens* tokens);
VQS_API size_t vqs_tokens_count(const vqs_tokens* tokens);
VQS_API const char* vqs_tokens_codebook_id(const vqs_tokens* tokens);
VQS_API int vqs_tokens_window(const vqs_tokens* tokens);
VQS_API vqs_status vqs_tokens_get(const vqs_tokens* tokens, size_t index, const int32_t** values, size_t* length);

/* One sequence per ensemble member. window 0 infers it from the codebook. */
VQS_API vqs_status vqs_tokens_encode(const vqs_ensemble* ensemble, const vqs_codebook* cb, int window, int threads,
                                     vqs_tokens** out);
/* One ensemble member per sequence; all sequences must share a length. */
VQS_API vqs_status vqs_tokens_decode(const vqs_tokens* tokens, const vqs_codebook* cb, int threads,
                                     vqs_ensemble** out);
/* samples_per_sequence swaps of each input; output i*n + j uses stream
 * derive_seed(seed, i*n + j), so one input with n samples matches
 * vqs_generate_ensemble before decoding. */
VQS_API vqs_status vqs_tokens_perturb(const vqs_tokens* tokens, const vqs_dict* dict, uint64_t seed,
                                      double swap_prob, size_t samples_per_sequence, vqs_tokens** out);

/* ---- Synonym-swap ensembles --------------------------------------------- */

typedef struct vqs_swap_config {
  uint64_t seed;
  double swap_prob;
  size_t num_samples;
} vqs_swap_config;

/* seed 0, swap_prob 1.0, num_samples 250 */
VQS_API vqs_swap_config vqs_swap_config_default(void);
VQS_API double vqs_default_tau(void);

VQS_API vqs_status vqs_generate_ensemble(const vqs_ensemble* input, size_t member, const vqs_codebook* cb,
                                         const vqs_dict* dict, const vqs_swap_config* cfg, int window, int threads,
                                         vqs_ensemble** out);
/* tm is NaN for chains shorter than 16. */
VQS_API vqs_status vqs_roundtrip(const vqs_ensemble* input, size_t member, const vqs_codebook* cb, int window,
                                 double* rmsd, double* tm);
/* Every member of every input is one chain; CSV table plus a "mean" row. */
VQS_API vqs_status vqs_perturbation_validation(const vqs_ensemble* const* inputs, size_t n_inputs,
                                               const vqs_codebook* cb, const vqs_dict* dict, int window,
                                               uint64_t seed, size_t repeats, int threads, vqs_buffer* csv);

/* ---- Metrics ------------------------------------------------------------ */

VQS_API vqs_status vqs_pearson(const double* a, const double* b, size_t n, double* out);
/* `aligned` nonzero skips the iterative mean alignment. out holds residue_count values. */
VQS_API vqs_status vqs_rmsf(const vqs_ensemble* ensemble, int aligned, double* out);
VQS_API vqs_status vqs_mean_pairwise_rmsd(const vqs_ensemble* ensemble, int threads, double* out);
/* Gaussians of dimension `dim`; covariances row-major dim*dim. */
VQS_API vqs_status vqs_w2_gaussian(const double* mean1, const double* cov1, const double* mean2, const double* cov2,
                                   size_t dim, double* out);

typedef struct vqs_report_summary {
  const char* label;
  double per_target_rmsf_r;
  double mean_pairwise_rmsd_generated;
  double mean_pairwise_rmsd_reference;
  double md_pca_w2;
  double joint_pca_w2;
  size_t residue_count;
} vqs_report_summary;

typedef struct vqs_corpus {
  size_t targets;
  double median_per_target_rmsf_r;
  double pairwise_rmsd_r;
  double global_rmsf_r;
  double median_md_pca_w2;
  double median_joint_pca_w2;
} vqs_corpus;

VQS_API vqs_status vqs_reports_create(vqs_reports** out);
VQS_API void vqs_reports_free(vqs_reports* reports);
VQS_API size_t vqs_reports_count(const vqs_reports* reports);
/* Evaluates one target and appends its report. */
VQS_API vqs_status vqs_reports_evaluate(vqs_reports* reports, const vqs_ensemble* generated,
                                        const vqs_ensemble* reference, const char* label, int threads);
VQS_API vqs_status vqs_reports_parse_csv(vqs_reports* reports, const char* text, size_t size);
VQS_API vqs_status vqs_reports_get(const vqs_reports* reports, size_t index, vqs_report_summary* out);
VQS_API vqs_status vqs_reports_rmsf(const vqs_reports* reports, size_t index, const double** generated,
                                    const double** reference, size_t* length);
VQS_API vqs_status vqs_reports_write_csv(const vqs_reports* reports, vqs_buffer* out);
VQS_API vqs_status vqs_reports_write_jsonl(const vqs_reports* reports, vqs_buffer* out);
VQS_API vqs_status vqs_reports_write_rmsf_csv(const vqs_reports* reports, vqs_buffer* out);
VQS_API vqs_status vqs_corpus_report(const vqs_reports* reports, vqs_corpus* out, vqs_buffer* csv);

#ifdef __cplusplus
}
#endif

#endif /* VQSYN_VQSYN_H */
