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
#include <vector>

#include "vqsyn/codebook.hpp"
#include "vqsyn/geom.hpp"

namespace vqsyn {

struct TokenSeq {
  std::vector<Token> tokens;
  std::string codebook_id;
  int window = 5;
};

// Window implied by the codebook dimension; throws DimensionMismatch when the
// codebook cannot hold descriptors of any odd window >= 5.
int codebook_window(const Codebook& cb);

TokenSeq encode(const Chain& chain, const Codebook& cb, int window);

// Throws InvalidInternalCoordinate if the code cannot be read as a descriptor.
void validate_code_descriptor(std::span<const double> values, int window, std::size_t token);

/// Rebuilds a chain from its tokens. Each residue past the seed frame is placed
/// from the central internal coordinate of the token before it; the leading
/// residues come from the first token's window and the trailing ones from the
/// last token's window. Output is defined up to a rigid motion.
Chain decode(const TokenSeq& seq, const Codebook& cb, std::string label = {});

struct RoundTrip {
  double rmsd = 0.0;
  std::optional<double> tm_score;  // empty for chains shorter than 16
};

RoundTrip roundtrip_report(const Chain& chain, const Codebook& cb, int window);

}  // namespace vqsyn
