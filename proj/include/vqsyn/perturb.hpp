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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vqsyn/codebook.hpp"
#include "vqsyn/ensemble.hpp"
#include "vqsyn/tokenizer.hpp"

namespace vqsyn {

inline constexpr std::size_t kDefaultEnsembleSize = 250;
inline constexpr double kDefaultTau = 10.0;

struct SwapConfig {
  std::uint64_t seed = 0;
  double swap_prob = 1.0;
  std::size_t num_samples = kDefaultEnsembleSize;
};

/// Each position is, with probability `swap_prob`, replaced by a uniform draw
/// from its synonym set (the set includes the token itself).
TokenSeq synonym_swap(const TokenSeq& seq, const SynonymDict& dict, std::uint64_t seed, double swap_prob);

/// Member j decodes synonym_swap(encode(chain), dict, derive_seed(cfg.seed, j)).
/// Members are ordered by j and do not depend on `threads`.
Ensemble generate_ensemble(const Chain& chain, const Codebook& cb, const SynonymDict& dict, const SwapConfig& cfg,
                           int window, int threads = 1);

struct ValidationRow {
  std::string label;
  // One swap, scored against the decoded unperturbed tokens.
  std::optional<double> tm_vs_decoded;
  double rmsd_vs_decoded = 0.0;
  // Same swap, scored against the input structure.
  std::optional<double> tm_vs_original;
  double rmsd_vs_original = 0.0;
  // Averages over `repeats` independent swaps against the decoded baseline.
  std::optional<double> mean_tm_vs_decoded;
  double mean_rmsd_vs_decoded = 0.0;
};

struct ValidationTable {
  std::vector<ValidationRow> rows;
  std::size_t repeats = 0;
  ValidationRow mean;  // column means; TM columns over chains where defined
};

ValidationTable perturbation_validation(std::span<const Chain> chains, const Codebook& cb, const SynonymDict& dict,
                                        int window, std::uint64_t seed, std::size_t repeats = 25, int threads = 1);

}  // namespace vqsyn
