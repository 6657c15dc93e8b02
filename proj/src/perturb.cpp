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

#include "vqsyn/perturb.hpp"

#include <optional>
#include <type_traits>

#include <fmt/format.h>

#include "vqsyn/error.hpp"
#include "vqsyn/parallel.hpp"
#include "vqsyn/random.hpp"

namespace vqsyn {

TokenSeq synonym_swap(const TokenSeq& seq, const SynonymDict& dict, std::uint64_t seed, double swap_prob) {
  if (seq.codebook_id != dict.codebook_id)
    fail(ErrorCode::MismatchedCodebook,
         fmt::format("tokens bound to '{}', dictionary built over '{}'", seq.codebook_id, dict.codebook_id));
  if (!(swap_prob >= 0.0 && swap_prob <= 1.0))
    fail(ErrorCode::InvalidArgument, fmt::format("swap probability {} outside [0, 1]", swap_prob));

  TokenSeq out = seq;
  Rng rng(seed);
  for (std::size_t t = 0; t < out.tokens.size(); ++t) {
    const Token k = out.tokens[t];
    if (k < 0 || static_cast<std::size_t>(k) >= dict.entries.size())
      fail(ErrorCode::TokenOutOfRange, fmt::format("position {}: token {} outside [0, {})", t, k, dict.entries.size()));
    if (rng.uniform() >= swap_prob) continue;
    const auto& synonyms = dict.entries[static_cast<std::size_t>(k)];
    out.tokens[t] = synonyms[rng.below(synonyms.size())];
  }
  return out;
}

Ensemble generate_ensemble(const Chain& chain, const Codebook& cb, const SynonymDict& dict, const SwapConfig& cfg,
                           int window, int threads) {
  if (cfg.num_samples < 1) fail(ErrorCode::InvalidArgument, "num_samples must be at least 1");
  if (dict.codebook_id != cb.id)
    fail(ErrorCode::MismatchedCodebook,
         fmt::format("dictionary built over '{}', codebook is '{}'", dict.codebook_id, cb.id));
  const TokenSeq tokens = encode(chain, cb, window);

  Ensemble out;
  out.source = EnsembleSource::Generated;
  out.conformations.resize(cfg.num_samples);
  parallel_for(cfg.num_samples, threads, [&](std::size_t j) {
    const TokenSeq swapped = synonym_swap(tokens, dict, derive_seed(cfg.seed, j), cfg.swap_prob);
    out.conformations[j] = decode(swapped, cb, fmt::format("{}_sample{}", chain.label, j));
  });
  return out;
}

namespace {

std::optional<double> maybe_tm(const Chain& model, const Chain& reference) {
  if (model.size() < 16) return std::nullopt;
  return tm_score(model, reference);
}

}  // namespace

ValidationTable perturbation_validation(std::span<const Chain> chains, const Codebook& cb, const SynonymDict& dict,
                                        int window, std::uint64_t seed, std::size_t repeats, int threads) {
  if (repeats < 1) fail(ErrorCode::InvalidArgument, "repeats must be at least 1");
  ValidationTable table;
  table.repeats = repeats;
  table.rows.resize(chains.size());

  parallel_for(chains.size(), threads, [&](std::size_t i) {
    const Chain& chain = chains[i];
    const TokenSeq tokens = encode(chain, cb, window);
    const Chain baseline = decode(tokens, cb, chain.label);
    const std::uint64_t chain_seed = derive_seed(seed, i);

    ValidationRow& row = table.rows[i];
    row.label = chain.label;
    double tm_sum = 0.0;
    double rmsd_sum = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
      const Chain perturbed = decode(synonym_swap(tokens, dict, derive_seed(chain_seed, r), 1.0), cb, chain.label);
      const auto tm = maybe_tm(perturbed, baseline);
      const double rmsd = rmsd_aligned(perturbed, baseline);
      if (r == 0) {
        row.tm_vs_decoded = tm;
        row.rmsd_vs_decoded = rmsd;
        row.tm_vs_original = maybe_tm(perturbed, chain);
        row.rmsd_vs_original = rmsd_aligned(perturbed, chain);
      }
      if (tm) tm_sum += *tm;
      rmsd_sum += rmsd;
    }
    if (row.tm_vs_decoded) row.mean_tm_vs_decoded = tm_sum / static_cast<double>(repeats);
    row.mean_rmsd_vs_decoded = rmsd_sum / static_cast<double>(repeats);
  });

  auto mean_of = [&](auto member) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& row : table.rows) {
      const auto& v = row.*member;
      if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::optional<double>>) {
        if (v) {
          sum += *v;
          ++count;
        }
      } else {
        sum += v;
        ++count;
      }
    }
    return std::make_pair(sum, count);
  };
  table.mean.label = "mean";
  auto set_opt = [&](std::optional<double> ValidationRow::*member) {
    const auto [sum, count] = mean_of(member);
    if (count > 0) table.mean.*member = sum / static_cast<double>(count);
  };
  auto set_val = [&](double ValidationRow::*member) {
    const auto [sum, count] = mean_of(member);
    table.mean.*member = count > 0 ? sum / static_cast<double>(count) : 0.0;
  };
  set_opt(&ValidationRow::tm_vs_decoded);
  set_opt(&ValidationRow::tm_vs_original);
  set_opt(&ValidationRow::mean_tm_vs_decoded);
  set_val(&ValidationRow::rmsd_vs_decoded);
  set_val(&ValidationRow::rmsd_vs_original);
  set_val(&ValidationRow::mean_rmsd_vs_decoded);
  return table;
}

}  // namespace vqsyn
