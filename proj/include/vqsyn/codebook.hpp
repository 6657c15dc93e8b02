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

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "vqsyn/geom.hpp"

namespace vqsyn {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Token = std::int32_t;

/// m latent vectors of dimension d; tokens index rows.
///
/// `id` binds token sequences and synonym dictionaries to the codebook. It is
/// derived from the float32 image of the matrix, so a codebook and its binary
/// export share one id.
struct Codebook {
  RowMatrix vectors;
  std::string id;

  std::size_t size() const noexcept { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(vectors.cols()); }
  std::span<const double> row(std::size_t k) const {
    return {vectors.data() + k * dim(), dim()};
  }
};

std::string codebook_id(const RowMatrix& vectors);

// First pair (i < k) of bit-identical rows, if any.
std::optional<std::pair<std::size_t, std::size_t>> find_duplicate_rows(const RowMatrix& vectors);

/// Validates (non-empty, finite, no duplicate rows) and stamps the id.
Codebook make_codebook(RowMatrix vectors);

double code_distance(std::span<const double> a, std::span<const double> b);

/// Symmetric m x m Euclidean distance matrix; each unordered pair is computed once.
Eigen::MatrixXd pairwise_distances(const Codebook& cb, int threads = 1);

struct SynonymDict {
  double tau = 0.0;
  std::string codebook_id;
  std::size_t code_count = 0;
  std::vector<std::vector<Token>> entries;
};

/// entries[k] = {k} together with every i whose code lies strictly closer than tau to code k.
SynonymDict build_synonym_dict(const Codebook& cb, double tau, int threads = 1);

struct KMeansOptions {
  std::size_t codes = 16;
  int max_iters = 100;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct KMeansResult {
  Codebook codebook;
  std::vector<double> inertia;  // per iteration, after assignment
  std::vector<std::size_t> cluster_sizes;
  int iterations = 0;
  bool converged = false;
};

/// Lloyd's k-means with k-means++ seeding. Empty clusters are re-seeded from
/// the sample farthest from its assigned centroid. Deterministic for a fixed
/// seed and sample order, independent of `threads`.
KMeansResult train_codebook(const RowMatrix& samples, const KMeansOptions& opts);

RowMatrix descriptor_matrix(std::span<const Descriptor> descriptors);

// Nearest code; ties resolve to the lowest index.
Token quantize(std::span<const double> values, const Codebook& cb);

struct RedundancyStats {
  double tau = 0.0;
  double synonym_fraction = 0.0;
  std::size_t component_count = 0;
  std::map<std::size_t, std::size_t> set_size_histogram;          // |S_k| -> number of k
  std::vector<std::pair<double, double>> distance_quantiles;      // (probability, distance)
};

inline constexpr std::array<double, 11> kDistanceQuantileLevels = {0.0,  0.01, 0.05, 0.1,  0.25, 0.5,
                                                                   0.75, 0.9,  0.95, 0.99, 1.0};

RedundancyStats redundancy_stats(const Codebook& cb, double tau, int threads = 1);

struct Projection2D {
  Eigen::MatrixX2d coords;
  std::array<double, 2> explained{0.0, 0.0};
};

/// Rows centered and projected on the two leading principal axes. Each axis is
/// signed so its largest-magnitude loading is positive.
Projection2D project_2d(const Codebook& cb);

}  // namespace vqsyn
