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

#include "vqsyn/ensemble.hpp"

#include <fmt/format.h>

#include "vqsyn/error.hpp"

namespace vqsyn {

void validate_ensemble(const Ensemble& e) {
  if (e.conformations.empty()) fail(ErrorCode::InvalidArgument, "ensemble is empty");
  const std::size_t n = e.residue_count();
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e.conformations[i].size() != n)
      fail(ErrorCode::MismatchedLengths,
           fmt::format("member {} has {} residues, member 0 has {}", i, e.conformations[i].size(), n));
  if (!e.residues.empty() && e.residues.size() != n)
    fail(ErrorCode::MismatchedLengths, fmt::format("{} residue ids for {} residues", e.residues.size(), n));
}

}  // namespace vqsyn
