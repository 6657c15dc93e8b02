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

#include "vqsyn/vqsyn.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include <fmt/format.h>

#include "vqsyn/checksum.hpp"
#include "vqsyn/codebook.hpp"
#include "vqsyn/error.hpp"
#include "vqsyn/io.hpp"
#include "vqsyn/metrics.hpp"
#include "vqsyn/parallel.hpp"
#include "vqsyn/perturb.hpp"
#include "vqsyn/random.hpp"
#include "vqsyn/tokenizer.hpp"

struct vqs_ensemble {
  vqsyn::Ensemble value;
};
struct vqs_codebook {
  vqsyn::Codebook value;
};
struct vqs_dict {
  vqsyn::SynonymDict value;
};
struct vqs_tokens {
  vqsyn::TokenFile value;
};
struct vqs_reports {
  std::vector<vqsyn::EnsembleReport> value;
};

namespace {

using vqsyn::ErrorCode;

thread_local std::string g_last_error;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

vqs_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return VQS_ERR_INVALID_ARGUMENT;
    case ErrorCode::MismatchedLengths: return VQS_ERR_MISMATCHED_LENGTHS;
    case ErrorCode::DegenerateGeometry: return VQS_ERR_DEGENERATE_GEOMETRY;
    case ErrorCode::ChainTooShort: return VQS_ERR_CHAIN_TOO_SHORT;
    case ErrorCode::EvenWindow: return VQS_ERR_EVEN_WINDOW;
    case ErrorCode::InvalidInternalCoordinate: return VQS_ERR_INVALID_INTERNAL_COORDINATE;
    case ErrorCode::NegativeTau: return VQS_ERR_NEGATIVE_TAU;
    case ErrorCode::TooFewSamples: return VQS_ERR_TOO_FEW_SAMPLES;
    case ErrorCode::DimensionMismatch: return VQS_ERR_DIMENSION_MISMATCH;
    case ErrorCode::TooFewCodes: return VQS_ERR_TOO_FEW_CODES;
    case ErrorCode::TokenOutOfRange: return VQS_ERR_TOKEN_OUT_OF_RANGE;
    case ErrorCode::MismatchedCodebook: return VQS_ERR_MISMATCHED_CODEBOOK;
    case ErrorCode::SingleConformation: return VQS_ERR_SINGLE_CONFORMATION;
    case ErrorCode::ConstantInput: return VQS_ERR_CONSTANT_INPUT;
    case ErrorCode::TooFewConformations: return VQS_ERR_TOO_FEW_CONFORMATIONS;
    case ErrorCode::NonSPDCovariance: return VQS_ERR_NON_SPD_COVARIANCE;
    case ErrorCode::NoCalpha: return VQS_ERR_NO_CALPHA;
    case ErrorCode::InconsistentModels: return VQS_ERR_INCONSISTENT_MODELS;
    case ErrorCode::MalformedRecord: return VQS_ERR_MALFORMED_RECORD;
    case ErrorCode::CoordinateOverflow: return VQS_ERR_COORDINATE_OVERFLOW;
    case ErrorCode::BadMagic: return VQS_ERR_BAD_MAGIC;
    case ErrorCode::UnsupportedVersion: return VQS_ERR_UNSUPPORTED_VERSION;
    case ErrorCode::TruncatedFile: return VQS_ERR_TRUNCATED_FILE;
    case ErrorCode::RaggedRows: return VQS_ERR_RAGGED_ROWS;
    case ErrorCode::DuplicateRows: return VQS_ERR_DUPLICATE_ROWS;
    case ErrorCode::NonIntegerToken: return VQS_ERR_NON_INTEGER_TOKEN;
    case ErrorCode::MissingHeader: return VQS_ERR_MISSING_HEADER;
    case ErrorCode::BrokenChain: return VQS_ERR_BROKEN_CHAIN;
    case ErrorCode::IoError: return VQS_ERR_IO;
  }
  return VQS_ERR_INTERNAL;
}

template <typename Fn>
vqs_status guarded(Fn&& fn) {
  try {
    fn();
    return VQS_OK;
  } catch (const vqsyn::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return VQS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return VQS_ERR_INTERNAL;
  }
}

template <typename T>
void require(const T* p, const char* what) {
  if (p == nullptr) vqsyn::fail(ErrorCode::InvalidArgument, fmt::format("{} is null", what));
}

void fill(vqs_buffer* out, const std::string& bytes) {
  require(out, "output buffer");
  out->data = nullptr;
  out->size = 0;
  char* data = static_cast<char*>(std::malloc(bytes.size() + 1));
  if (data == nullptr) throw std::bad_alloc();
  std::memcpy(data, bytes.data(), bytes.size());
  data[bytes.size()] = '\0';
  out->data = data;
  out->size = bytes.size();
}

const vqsyn::Chain& member_of(const vqs_ensemble* e, std::size_t member) {
  require(e, "ensemble");
  if (member >= e->value.size())
    vqsyn::fail(ErrorCode::InvalidArgument, fmt::format("member {} of an ensemble of {}", member, e->value.size()));
  return e->value.conformations[member];
}

int resolve_window(const vqsyn::Codebook& cb, int window) { return window > 0 ? window : vqsyn::codebook_window(cb); }

double or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

}  // namespace

extern "C" {

void vqs_buffer_free(vqs_buffer* buffer) {
  if (buffer == nullptr) return;
  std::free(buffer->data);
  buffer->data = nullptr;
  buffer->size = 0;
}

const char* vqs_last_error(void) { return g_last_error.c_str(); }

const char* vqs_status_name(vqs_status status) {
  switch (status) {
    case VQS_OK: return "OK";
    case VQS_ERR_INTERNAL: return "Internal";
    default:
      if (status >= VQS_ERR_INVALID_ARGUMENT && status <= VQS_ERR_IO)
        return vqsyn::to_string(static_cast<ErrorCode>(status - 1)).data();
      return "Unknown";
  }
}

int vqs_status_is_numeric(vqs_status status) {
  if (status >= VQS_ERR_INVALID_ARGUMENT && status <= VQS_ERR_IO)
    return vqsyn::is_numeric_failure(static_cast<ErrorCode>(status - 1)) ? 1 : 0;
  return 0;
}

const char* vqs_version(void) { return "1.0.0"; }

vqs_status vqs_sha256_hex(const void* data, size_t size, char out[65]) {
  return guarded([&] {
    require(out, "output");
    if (size > 0) require(data, "data");
    const std::string hex = vqsyn::sha256_hex({static_cast<const unsigned char*>(data), size});
    std::memcpy(out, hex.c_str(), 65);
  });
}

// ---- Ensembles ----

vqs_status vqs_ensemble_parse_pdb(const char* text, size_t size, char chain_id, int model_first, int model_last,
                                  const char* label, vqs_ensemble** out) {
  return guarded([&] {
    require(out, "output");
    if (size > 0) require(text, "text");
    vqsyn::StructureFileOptions opts;
    if (chain_id != 0) opts.chain_id = chain_id;
    if (model_first != 0 || model_last != 0) opts.model_range = std::make_pair(model_first, model_last);
    auto e = vqsyn::parse_structure({text, size}, opts, label ? label : "");
    *out = new vqs_ensemble{std::move(e)};
  });
}

vqs_status vqs_ensemble_from_coords(const double* xyz, size_t members, size_t residues, const char* label,
                                    vqs_ensemble** out) {
  return guarded([&] {
    require(out, "output");
    require(xyz, "coordinates");
    if (members == 0 || residues == 0) vqsyn::fail(ErrorCode::InvalidArgument, "empty ensemble");
    vqsyn::Ensemble e;
    const std::string base = label ? label : "chain";
    for (std::size_t t = 0; t < members; ++t) {
      vqsyn::Chain c;
      c.label = members > 1 ? fmt::format("{}_m{}", base, t + 1) : base;
      for (std::size_t i = 0; i < residues; ++i) {
        const double* p = xyz + 3 * (t * residues + i);
        c.coords.emplace_back(p[0], p[1], p[2]);
      }
      e.conformations.push_back(std::move(c));
    }
    *out = new vqs_ensemble{std::move(e)};
  });
}

void vqs_ensemble_free(vqs_ensemble* ensemble) { delete ensemble; }

size_t vqs_ensemble_size(const vqs_ensemble* ensemble) { return ensemble ? ensemble->value.size() : 0; }

size_t vqs_ensemble_residue_count(const vqs_ensemble* ensemble) {
  return ensemble ? ensemble->value.residue_count() : 0;
}

vqs_status vqs_ensemble_coords(const vqs_ensemble* ensemble, size_t member, double* xyz_out) {
  return guarded([&] {
    require(xyz_out, "output");
    const auto& c = member_of(ensemble, member);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (int k = 0; k < 3; ++k) xyz_out[3 * i + static_cast<std::size_t>(k)] = c.coords[i](k);
  });
}

vqs_status vqs_ensemble_validate_chains(const vqs_ensemble* ensemble) {
  return guarded([&] {
    require(ensemble, "ensemble");
    vqsyn::validate_ensemble(ensemble->value);
    for (const auto& c : ensemble->value.conformations) vqsyn::validate_chain(c);
  });
}

vqs_status vqs_ensemble_write_pdb(const vqs_ensemble* ensemble, vqs_buffer* out) {
  return guarded([&] {
    require(ensemble, "ensemble");
    fill(out, vqsyn::write_structure(ensemble->value));
  });
}

vqs_status vqs_ensemble_align(const vqs_ensemble* ensemble, vqs_ensemble** out) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(out, "output");
    *out = new vqs_ensemble{vqsyn::align_ensemble(ensemble->value)};
  });
}

vqs_status vqs_rmsd(const vqs_ensemble* a, size_t member_a, const vqs_ensemble* b, size_t member_b, double* out) {
  return guarded([&] {
    require(out, "output");
    *out = vqsyn::rmsd_aligned(member_of(a, member_a), member_of(b, member_b));
  });
}

vqs_status vqs_tm_score(const vqs_ensemble* model, size_t member_model, const vqs_ensemble* reference,
                        size_t member_reference, double* out) {
  return guarded([&] {
    require(out, "output");
    *out = vqsyn::tm_score(member_of(model, member_model), member_of(reference, member_reference));
  });
}

// ---- Codebooks ----

vqs_status vqs_codebook_load(const void* data, size_t size, vqs_codebook_format format, vqs_codebook** out) {
  return guarded([&] {
    require(out, "output");
    if (size > 0) require(data, "data");
    vqsyn::CodebookFormat f = vqsyn::CodebookFormat::Auto;
    if (format == VQS_CODEBOOK_CSV) f = vqsyn::CodebookFormat::Csv;
    if (format == VQS_CODEBOOK_BINARY) f = vqsyn::CodebookFormat::Binary;
    *out = new vqs_codebook{vqsyn::load_codebook(std::span(static_cast<const unsigned char*>(data), size), f)};
  });
}

vqs_status vqs_codebook_from_rows(const double* values, size_t codes, size_t dim, vqs_codebook** out) {
  return guarded([&] {
    require(out, "output");
    require(values, "values");
    vqsyn::RowMatrix m = Eigen::Map<const vqsyn::RowMatrix>(values, static_cast<Eigen::Index>(codes),
                                                             static_cast<Eigen::Index>(dim));
    *out = new vqs_codebook{vqsyn::make_codebook(std::move(m))};
  });
}

vqs_status vqs_codebook_save(const vqs_codebook* cb, vqs_buffer* out) {
  return guarded([&] {
    require(cb, "codebook");
    fill(out, vqsyn::save_codebook_binary(cb->value));
  });
}

void vqs_codebook_free(vqs_codebook* cb) { delete cb; }
size_t vqs_codebook_size(const vqs_codebook* cb) { return cb ? cb->value.size() : 0; }
size_t vqs_codebook_dim(const vqs_codebook* cb) { return cb ? cb->value.dim() : 0; }
const char* vqs_codebook_id(const vqs_codebook* cb) { return cb ? cb->value.id.c_str() : ""; }

int vqs_codebook_window(const vqs_codebook* cb) {
  return cb ? vqsyn::window_for_dim(static_cast<int>(cb->value.dim())) : 0;
}

vqs_status vqs_codebook_row(const vqs_codebook* cb, size_t code, double* out) {
  return guarded([&] {
    require(cb, "codebook");
    require(out, "output");
    if (code >= cb->value.size())
      vqsyn::fail(ErrorCode::TokenOutOfRange, fmt::format("code {} outside [0, {})", code, cb->value.size()));
    const auto row = cb->value.row(code);
    std::copy(row.begin(), row.end(), out);
  });
}

vqs_status vqs_codebook_quantize(const vqs_codebook* cb, const double* values, size_t dim, int32_t* token) {
  return guarded([&] {
    require(cb, "codebook");
    require(values, "values");
    require(token, "output");
    *token = vqsyn::quantize({values, dim}, cb->value);
  });
}

vqs_status vqs_codebook_train(const vqs_ensemble* const* inputs, size_t n_inputs, const vqs_train_params* params,
                              vqs_codebook** out, vqs_buffer* summary) {
  return guarded([&] {
    require(params, "params");
    require(out, "output");
    if (n_inputs > 0) require(inputs, "inputs");
    std::vector<vqsyn::Descriptor> descriptors;
    for (std::size_t k = 0; k < n_inputs; ++k) {
      require(inputs[k], "input ensemble");
      for (const auto& chain : inputs[k]->value.conformations) {
        auto d = vqsyn::chain_descriptors(chain, params->window);
        descriptors.insert(descriptors.end(), std::make_move_iterator(d.begin()), std::make_move_iterator(d.end()));
      }
    }
    vqsyn::KMeansOptions opts;
    opts.codes = params->codes;
    opts.max_iters = params->max_iters;
    opts.seed = params->seed;
    opts.threads = params->threads;
    if (descriptors.size() < opts.codes)
      vqsyn::fail(ErrorCode::TooFewSamples, fmt::format("{} codes requested but only {} descriptors available",
                                                        opts.codes, descriptors.size()));
    auto result = vqsyn::train_codebook(vqsyn::descriptor_matrix(descriptors), opts);
    if (summary) fill(summary, vqsyn::write_training_summary(result));
    *out = new vqs_codebook{std::move(result.codebook)};
  });
}

vqs_status vqs_codebook_distances(const vqs_codebook* cb, int threads, double* out) {
  return guarded([&] {
    require(cb, "codebook");
    require(out, "output");
    const Eigen::MatrixXd d = vqsyn::pairwise_distances(cb->value, threads);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out, d.rows(), d.cols()) = d;
  });
}

vqs_status vqs_codebook_distances_csv(const vqs_codebook* cb, int threads, vqs_buffer* out) {
  return guarded([&] {
    require(cb, "codebook");
    fill(out, vqsyn::write_matrix_csv(vqsyn::pairwise_distances(cb->value, threads)));
  });
}

vqs_status vqs_codebook_project_2d(const vqs_codebook* cb, double* coords, double explained[2]) {
  return guarded([&] {
    require(cb, "codebook");
    const auto p = vqsyn::project_2d(cb->value);
    if (coords)
      for (Eigen::Index i = 0; i < p.coords.rows(); ++i) {
        coords[2 * i] = p.coords(i, 0);
        coords[2 * i + 1] = p.coords(i, 1);
      }
    if (explained) {
      explained[0] = p.explained[0];
      explained[1] = p.explained[1];
    }
  });
}

vqs_status vqs_codebook_projection_csv(const vqs_codebook* cb, vqs_buffer* out, double explained[2]) {
  return guarded([&] {
    require(cb, "codebook");
    const auto p = vqsyn::project_2d(cb->value);
    fill(out, vqsyn::write_projection_csv(p));
    if (explained) {
      explained[0] = p.explained[0];
      explained[1] = p.explained[1];
    }
  });
}

vqs_status vqs_redundancy_stats(const vqs_codebook* cb, double tau, int threads, vqs_redundancy* out,
                                vqs_buffer* text) {
  return guarded([&] {
    require(cb, "codebook");
    const auto stats = vqsyn::redundancy_stats(cb->value, tau, threads);
    if (out) *out = vqs_redundancy{stats.tau, stats.synonym_fraction, stats.component_count};
    if (text) fill(text, vqsyn::write_stats_text(stats, cb->value.size()));
  });
}

// ---- Dictionaries ----

vqs_status vqs_dict_build(const vqs_codebook* cb, double tau, int threads, vqs_dict** out) {
  return guarded([&] {
    require(cb, "codebook");
    require(out, "output");
    *out = new vqs_dict{vqsyn::build_synonym_dict(cb->value, tau, threads)};
  });
}

vqs_status vqs_dict_parse_csv(const char* text, size_t size, const vqs_codebook* cb, vqs_dict** out) {
  return guarded([&] {
    require(cb, "codebook");
    require(out, "output");
    if (size > 0) require(text, "text");
    *out = new vqs_dict{vqsyn::parse_synonym_csv({text, size}, cb->value)};
  });
}

vqs_status vqs_dict_write_csv(const vqs_dict* dict, vqs_buffer* out) {
  return guarded([&] {
    require(dict, "dictionary");
    fill(out, vqsyn::write_synonym_csv(dict->value));
  });
}

void vqs_dict_free(vqs_dict* dict) { delete dict; }
size_t vqs_dict_size(const vqs_dict* dict) { return dict ? dict->value.entries.size() : 0; }

vqs_status vqs_dict_entry(const vqs_dict* dict, size_t code, const int32_t** members, size_t* count) {
  return guarded([&] {
    require(dict, "dictionary");
    require(members, "output");
    require(count, "output");
    if (code >= dict->value.entries.size())
      vqsyn::fail(ErrorCode::TokenOutOfRange, fmt::format("code {} outside [0, {})", code, dict->value.entries.size()));
    *members = dict->value.entries[code].data();
    *count = dict->value.entries[code].size();
  });
}

// ---- Tokens ----

vqs_status vqs_tokens_create(const char* codebook_id, int window, vqs_tokens** out) {
  return guarded([&] {
    require(codebook_id, "codebook id");
    require(out, "output");
    *out = new vqs_tokens{vqsyn::TokenFile{codebook_id, window, {}}};
  });
}

vqs_status vqs_tokens_append(vqs_tokens* tokens, const int32_t* values, size_t length) {
  return guarded([&] {
    require(tokens, "tokens");
    if (length > 0) require(values, "values");
    vqsyn::TokenSeq seq;
    seq.codebook_id = tokens->value.codebook_id;
    seq.window = tokens->value.window;
    seq.tokens.assign(values, values + length);
    tokens->value.sequences.push_back(std::move(seq));
  });
}

vqs_status vqs_tokens_parse(const char* text, size_t size, vqs_tokens** out) {
  return guarded([&] {
    require(out, "output");
    if (size > 0) require(text, "text");
    *out = new vqs_tokens{vqsyn::load_tokens({text, size})};
  });
}

vqs_status vqs_tokens_write(const vqs_tokens* tokens, vqs_buffer* out) {
  return guarded([&] {
    require(tokens, "tokens");
    fill(out, vqsyn::save_tokens(tokens->value));
  });
}

void vqs_tokens_free(vqs_tokens* tokens) { delete tokens; }
size_t vqs_tokens_count(const vqs_tokens* tokens) { return tokens ? tokens->value.sequences.size() : 0; }
const char* vqs_tokens_codebook_id(const vqs_tokens* tokens) { return tokens ? tokens->value.codebook_id.c_str() : ""; }
int vqs_tokens_window(const vqs_tokens* tokens) { return tokens ? tokens->value.window : 0; }

vqs_status vqs_tokens_get(const vqs_tokens* tokens, size_t index, const int32_t** values, size_t* length) {
  return guarded([&] {
    require(tokens, "tokens");
    require(values, "output");
    require(length, "output");
    if (index >= tokens->value.sequences.size())
      vqsyn::fail(ErrorCode::InvalidArgument, fmt::format("sequence {} of {}", index, tokens->value.sequences.size()));
    *values = tokens->value.sequences[index].tokens.data();
    *length = tokens->value.sequences[index].tokens.size();
  });
}

vqs_status vqs_tokens_encode(const vqs_ensemble* ensemble, const vqs_codebook* cb, int window, int threads,
                             vqs_tokens** out) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(cb, "codebook");
    require(out, "output");
    const int w = resolve_window(cb->value, window);
    vqsyn::TokenFile file{cb->value.id, w, {}};
    file.sequences.resize(ensemble->value.size());
    vqsyn::parallel_for(ensemble->value.size(), threads, [&](std::size_t i) {
      file.sequences[i] = vqsyn::encode(ensemble->value.conformations[i], cb->value, w);
    });
    *out = new vqs_tokens{std::move(file)};
  });
}

vqs_status vqs_tokens_decode(const vqs_tokens* tokens, const vqs_codebook* cb, int threads, vqs_ensemble** out) {
  return guarded([&] {
    require(tokens, "tokens");
    require(cb, "codebook");
    require(out, "output");
    const auto& seqs = tokens->value.sequences;
    if (seqs.empty()) vqsyn::fail(ErrorCode::InvalidArgument, "no token sequences to decode");
    vqsyn::Ensemble e;
    e.source = vqsyn::EnsembleSource::Generated;
    e.conformations.resize(seqs.size());
    vqsyn::parallel_for(seqs.size(), threads, [&](std::size_t i) {
      e.conformations[i] = vqsyn::decode(seqs[i], cb->value, fmt::format("decoded_{}", i + 1));
    });
    vqsyn::validate_ensemble(e);
    *out = new vqs_ensemble{std::move(e)};
  });
}

vqs_status vqs_tokens_perturb(const vqs_tokens* tokens, const vqs_dict* dict, uint64_t seed, double swap_prob,
                              size_t samples_per_sequence, vqs_tokens** out) {
  return guarded([&] {
    require(tokens, "tokens");
    require(dict, "dictionary");
    require(out, "output");
    if (samples_per_sequence < 1) vqsyn::fail(ErrorCode::InvalidArgument, "samples per sequence must be at least 1");
    vqsyn::TokenFile file{tokens->value.codebook_id, tokens->value.window, {}};
    const auto& seqs = tokens->value.sequences;
    for (std::size_t i = 0; i < seqs.size(); ++i)
      for (std::size_t j = 0; j < samples_per_sequence; ++j)
        file.sequences.push_back(
            vqsyn::synonym_swap(seqs[i], dict->value, vqsyn::derive_seed(seed, i * samples_per_sequence + j), swap_prob));
    *out = new vqs_tokens{std::move(file)};
  });
}

// ---- Ensembles from synonyms ----

vqs_swap_config vqs_swap_config_default(void) {
  const vqsyn::SwapConfig cfg;
  return vqs_swap_config{cfg.seed, cfg.swap_prob, cfg.num_samples};
}

double vqs_default_tau(void) { return vqsyn::kDefaultTau; }

vqs_status vqs_generate_ensemble(const vqs_ensemble* input, size_t member, const vqs_codebook* cb, const vqs_dict* dict,
                                 const vqs_swap_config* cfg, int window, int threads, vqs_ensemble** out) {
  return guarded([&] {
    require(cb, "codebook");
    require(dict, "dictionary");
    require(cfg, "config");
    require(out, "output");
    const auto& chain = member_of(input, member);
    vqsyn::SwapConfig swap{cfg->seed, cfg->swap_prob, cfg->num_samples};
    auto e = vqsyn::generate_ensemble(chain, cb->value, dict->value, swap, resolve_window(cb->value, window), threads);
    e.chain_id = input->value.chain_id;
    e.residues = input->value.residues;
    *out = new vqs_ensemble{std::move(e)};
  });
}

vqs_status vqs_roundtrip(const vqs_ensemble* input, size_t member, const vqs_codebook* cb, int window, double* rmsd,
                         double* tm) {
  return guarded([&] {
    require(cb, "codebook");
    const auto r = vqsyn::roundtrip_report(member_of(input, member), cb->value, resolve_window(cb->value, window));
    if (rmsd) *rmsd = r.rmsd;
    if (tm) *tm = or_nan(r.tm_score);
  });
}

vqs_status vqs_perturbation_validation(const vqs_ensemble* const* inputs, size_t n_inputs, const vqs_codebook* cb,
                                       const vqs_dict* dict, int window, uint64_t seed, size_t repeats, int threads,
                                       vqs_buffer* csv) {
  return guarded([&] {
    require(cb, "codebook");
    require(dict, "dictionary");
    if (n_inputs > 0) require(inputs, "inputs");
    std::vector<vqsyn::Chain> chains;
    for (std::size_t k = 0; k < n_inputs; ++k) {
      require(inputs[k], "input ensemble");
      chains.insert(chains.end(), inputs[k]->value.conformations.begin(), inputs[k]->value.conformations.end());
    }
    const auto table = vqsyn::perturbation_validation(chains, cb->value, dict->value, resolve_window(cb->value, window),
                                                      seed, repeats, threads);
    fill(csv, vqsyn::write_validation_csv(table));
  });
}

// ---- Metrics ----

vqs_status vqs_pearson(const double* a, const double* b, size_t n, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "output");
    *out = vqsyn::pearson({a, n}, {b, n});
  });
}

vqs_status vqs_rmsf(const vqs_ensemble* ensemble, int aligned, double* out) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(out, "output");
    const auto values = aligned ? vqsyn::rmsf(ensemble->value) : vqsyn::rmsf(vqsyn::align_ensemble(ensemble->value));
    std::copy(values.begin(), values.end(), out);
  });
}

vqs_status vqs_mean_pairwise_rmsd(const vqs_ensemble* ensemble, int threads, double* out) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(out, "output");
    *out = vqsyn::mean_pairwise_rmsd(ensemble->value, threads);
  });
}

vqs_status vqs_w2_gaussian(const double* mean1, const double* cov1, const double* mean2, const double* cov2, size_t dim,
                           double* out) {
  return guarded([&] {
    require(mean1, "mean1");
    require(cov1, "cov1");
    require(mean2, "mean2");
    require(cov2, "cov2");
    require(out, "output");
    const auto n = static_cast<Eigen::Index>(dim);
    using RowM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    *out = vqsyn::w2_gaussian(Eigen::Map<const Eigen::VectorXd>(mean1, n), Eigen::Map<const RowM>(cov1, n, n),
                              Eigen::Map<const Eigen::VectorXd>(mean2, n), Eigen::Map<const RowM>(cov2, n, n));
  });
}

vqs_status vqs_reports_create(vqs_reports** out) {
  return guarded([&] {
    require(out, "output");
    *out = new vqs_reports{};
  });
}

void vqs_reports_free(vqs_reports* reports) { delete reports; }
size_t vqs_reports_count(const vqs_reports* reports) { return reports ? reports->value.size() : 0; }

vqs_status vqs_reports_evaluate(vqs_reports* reports, const vqs_ensemble* generated, const vqs_ensemble* reference,
                                const char* label, int threads) {
  return guarded([&] {
    require(reports, "reports");
    require(generated, "generated ensemble");
    require(reference, "reference ensemble");
    vqsyn::EvaluateOptions opts;
    opts.threads = threads;
    reports->value.push_back(vqsyn::evaluate_ensembles(generated->value, reference->value, opts, label ? label : "target"));
  });
}

vqs_status vqs_reports_parse_csv(vqs_reports* reports, const char* text, size_t size) {
  return guarded([&] {
    require(reports, "reports");
    if (size > 0) require(text, "text");
    auto parsed = vqsyn::parse_reports_csv({text, size});
    reports->value.insert(reports->value.end(), std::make_move_iterator(parsed.begin()),
                          std::make_move_iterator(parsed.end()));
  });
}

vqs_status vqs_reports_get(const vqs_reports* reports, size_t index, vqs_report_summary* out) {
  return guarded([&] {
    require(reports, "reports");
    require(out, "output");
    if (index >= reports->value.size())
      vqsyn::fail(ErrorCode::InvalidArgument, fmt::format("report {} of {}", index, reports->value.size()));
    const auto& r = reports->value[index];
    *out = vqs_report_summary{r.label.c_str(),         or_nan(r.per_target_rmsf_r),
                              or_nan(r.mean_pairwise_rmsd_generated), or_nan(r.mean_pairwise_rmsd_reference),
                              or_nan(r.md_pca_w2),     or_nan(r.joint_pca_w2),
                              r.rmsf_reference.size()};
  });
}

vqs_status vqs_reports_rmsf(const vqs_reports* reports, size_t index, const double** generated,
                            const double** reference, size_t* length) {
  return guarded([&] {
    require(reports, "reports");
    require(generated, "output");
    require(reference, "output");
    require(length, "output");
    if (index >= reports->value.size())
      vqsyn::fail(ErrorCode::InvalidArgument, fmt::format("report {} of {}", index, reports->value.size()));
    const auto& r = reports->value[index];
    *generated = r.rmsf_generated.data();
    *reference = r.rmsf_reference.data();
    *length = r.rmsf_reference.size();
  });
}

vqs_status vqs_reports_write_csv(const vqs_reports* reports, vqs_buffer* out) {
  return guarded([&] {
    require(reports, "reports");
    fill(out, vqsyn::write_reports_csv(reports->value));
  });
}

vqs_status vqs_reports_write_jsonl(const vqs_reports* reports, vqs_buffer* out) {
  return guarded([&] {
    require(reports, "reports");
    fill(out, vqsyn::write_reports_jsonl(reports->value));
  });
}

vqs_status vqs_reports_write_rmsf_csv(const vqs_reports* reports, vqs_buffer* out) {
  return guarded([&] {
    require(reports, "reports");
    fill(out, vqsyn::write_rmsf_csv(reports->value));
  });
}

vqs_status vqs_corpus_report(const vqs_reports* reports, vqs_corpus* out, vqs_buffer* csv) {
  return guarded([&] {
    require(reports, "reports");
    const auto c = vqsyn::corpus_report(reports->value);
    if (out)
      *out = vqs_corpus{c.targets, or_nan(c.median_per_target_rmsf_r), or_nan(c.pairwise_rmsd_r),
                        or_nan(c.global_rmsf_r), or_nan(c.median_md_pca_w2), or_nan(c.median_joint_pca_w2)};
    if (csv) fill(csv, vqsyn::write_corpus_csv(c));
  });
}

}  // extern "C"
