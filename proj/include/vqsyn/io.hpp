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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vqsyn/codebook.hpp"
#include "vqsyn/ensemble.hpp"
#include "vqsyn/metrics.hpp"
#include "vqsyn/perturb.hpp"
#include "vqsyn/tokenizer.hpp"

namespace vqsyn {

// ---------------------------------------------------------------------------
// PDB (fixed columns, C-alpha only)

struct StructureFileOptions {
  std::optional<char> chain_id;                   // default: first chain with a CA atom
  std::optional<std::pair<int, int>> model_range; // inclusive, 1-based model ordinals
};

/// Reads the CA atoms of one chain from every MODEL block (or the whole file
/// when there are no MODEL records). Alternate locations resolve to blank,
/// then 'A', then the first one seen. Residues are ordered by sequence number
/// and insertion code. All models must share the same residue list.
Ensemble parse_structure(std::string_view text, const StructureFileOptions& opts = {}, std::string_view label = {});

/// Multi-model, CA-only PDB text. Throws CoordinateOverflow for values that do
/// not fit the 8.3 coordinate columns.
std::string write_structure(const Ensemble& e);

// ---------------------------------------------------------------------------
// Codebooks

enum class CodebookFormat { Auto, Csv, Binary };

inline constexpr std::string_view kCodebookMagic = "TKCB";
inline constexpr std::uint16_t kCodebookVersion = 1;

// Binary layout: "TKCB", u16 version, u32 m, u32 d, m*d little-endian f32, row-major.
Codebook load_codebook(std::span<const unsigned char> bytes, CodebookFormat format = CodebookFormat::Auto);
Codebook load_codebook(std::string_view bytes, CodebookFormat format = CodebookFormat::Auto);
std::string save_codebook_binary(const Codebook& cb);

// ---------------------------------------------------------------------------
// Token files: "# codebook: <id> window: <w>" then one sequence per line.

struct TokenFile {
  std::string codebook_id;
  int window = 5;
  std::vector<TokenSeq> sequences;
};

TokenFile load_tokens(std::string_view text);
std::string save_tokens(const TokenFile& file);

// ---------------------------------------------------------------------------
// Synonym dictionaries: "# codebook: <id> tau: <t>", "token,synonyms", rows.

std::string write_synonym_csv(const SynonymDict& dict);
SynonymDict parse_synonym_csv(std::string_view text, const Codebook& cb);

// ---------------------------------------------------------------------------
// Reports

inline constexpr std::string_view kUndefined = "undefined";

std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

std::string write_reports_csv(std::span<const EnsembleReport> reports);
std::vector<EnsembleReport> parse_reports_csv(std::string_view text);
std::string write_reports_jsonl(std::span<const EnsembleReport> reports);
std::string write_corpus_csv(const CorpusReport& report);
std::string write_rmsf_csv(std::span<const EnsembleReport> reports);

std::string write_validation_csv(const ValidationTable& table);
std::string write_stats_text(const RedundancyStats& stats, std::size_t code_count);
std::string write_projection_csv(const Projection2D& projection);
std::string write_matrix_csv(const Eigen::MatrixXd& matrix);
std::string write_training_summary(const KMeansResult& result);

}  // namespace vqsyn
