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

#include <cstddef>
#include <string>
#include <vector>

#include "vqsyn/geom.hpp"

namespace vqsyn {

enum class EnsembleSource { Generated, Reference };

struct ResidueId {
  int seq = 0;
  char icode = ' ';
  std::string name = "GLY";

  friend bool operator==(const ResidueId&, const ResidueId&) = default;
};

/// Conformations of one chain sharing length and residue order.
struct Ensemble {
  std::vector<Chain> conformations;
  EnsembleSource source = EnsembleSource::Reference;
  char chain_id = 'A';
  std::vector<ResidueId> residues;  // empty means 1..L

  std::size_t size() const noexcept { return conformations.size(); }
  std::size_t residue_count() const noexcept { return conformations.empty() ? 0 : conformations.front().size(); }
};

// Non-empty and uniform length; residues, when present, match that length.
void validate_ensemble(const Ensemble& e);

}  // namespace vqsyn
