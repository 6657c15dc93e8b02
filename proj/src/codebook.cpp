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

#include "vqsyn/codebook.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "vqsyn/checksum.hpp"
#include "vqsyn/error.hpp"
#include "vqsyn/parallel.hpp"
#include "vqsyn/random.hpp"

namespace vqsyn {

namespace {

void put_u32_le(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

double squared_distance(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

bool row_less(const RowMatrix& m, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (m(a, j) < m(b, j)) return true;
    if (m(b, j) < m(a, j)) return false;
  }
  return false;
}

bool row_equal(const RowMatrix& m, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    if (m(a, j) != m(b, j)) return false;
  return true;
}

std::vector<Eigen::Index> sorted_row_order(const RowMatrix& m) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return row_less(m, a, b); });
  return order;
}

std::size_t count_distinct_rows(const RowMatrix& m) {
  const auto order = sorted_row_order(m);
  std::size_t distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (!row_equal(m, order[i - 1], order[i])) ++distinct;
  return distinct;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

void check_tau(double tau) {
  if (!(tau >= 0.0)) fail(ErrorCode::NegativeTau, fmt::format("tau = {} must be non-negative", tau));
}

// Linear interpolation between order statistics (R type 7).
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string codebook_id(const RowMatrix& vectors) {
  std::vector<unsigned char> bytes;
  bytes.reserve(8 + 4 * static_cast<std::size_t>(vectors.size()));
  put_u32_le(bytes, static_cast<std::uint32_t>(vectors.rows()));
  put_u32_le(bytes, static_cast<std::uint32_t>(vectors.cols()));
  for (Eigen::Index i = 0; i < vectors.rows(); ++i)
    for (Eigen::Index j = 0; j < vectors.cols(); ++j)
      put_u32_le(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(vectors(i, j))));
  return "cb-" + sha256_hex(bytes).substr(0, 16);
}

std::optional<std::pair<std::size_t, std::size_t>> find_duplicate_rows(const RowMatrix& vectors) {
  const auto order = sorted_row_order(vectors);
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!row_equal(vectors, order[i - 1], order[i])) continue;
    auto a = static_cast<std::size_t>(order[i - 1]);
    auto b = static_cast<std::size_t>(order[i]);
    if (a > b) std::swap(a, b);
    if (!best || std::make_pair(a, b) < *best) best = std::make_pair(a, b);
  }
  return best;
}

Codebook make_codebook(RowMatrix vectors) {
  if (vectors.rows() < 1 || vectors.cols() < 1)
    fail(ErrorCode::InvalidArgument, fmt::format("codebook shape {}x{} is empty", vectors.rows(), vectors.cols()));
  if (!vectors.allFinite()) fail(ErrorCode::InvalidArgument, "codebook contains non-finite values");
  if (auto dup = find_duplicate_rows(vectors))
    fail(ErrorCode::DuplicateRows, fmt::format("rows {} and {} are identical", dup->first, dup->second));
  Codebook cb;
  cb.id = codebook_id(vectors);
  cb.vectors = std::move(vectors);
  return cb;
}

double code_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::DimensionMismatch, fmt::format("{} vs {}", a.size(), b.size()));
  return std::sqrt(squared_distance(a.data(), b.data(), a.size()));
}

Eigen::MatrixXd pairwise_distances(const Codebook& cb, int threads) {
  const std::size_t m = cb.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  parallel_for(m, threads, [&](std::size_t i) {
    for (std::size_t k = i + 1; k < m; ++k) {
      const double d = std::sqrt(squared_distance(cb.row(i).data(), cb.row(k).data(), cb.dim()));
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = d;
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = d;
    }
  });
  return out;
}

SynonymDict build_synonym_dict(const Codebook& cb, double tau, int threads) {
  check_tau(tau);
  const std::size_t m = cb.size();
  SynonymDict dict;
  dict.tau = tau;
  dict.codebook_id = cb.id;
  dict.code_count = m;
  dict.entries.resize(m);
  parallel_for(m, threads, [&](std::size_t k) {
    auto& entry = dict.entries[k];
    for (std::size_t i = 0; i < m; ++i) {
      if (i == k || std::sqrt(squared_distance(cb.row(i).data(), cb.row(k).data(), cb.dim())) < tau)
        entry.push_back(static_cast<Token>(i));
    }
  });
  return dict;
}

RowMatrix descriptor_matrix(std::span<const Descriptor> descriptors) {
  if (descriptors.empty()) return RowMatrix(0, 0);
  const std::size_t d = descriptors.front().values.size();
  RowMatrix out(static_cast<Eigen::Index>(descriptors.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    if (descriptors[i].values.size() != d)
      fail(ErrorCode::DimensionMismatch, fmt::format("descriptor {} has dimension {}, expected {}", i,
                                                     descriptors[i].values.size(), d));
    std::copy(descriptors[i].values.begin(), descriptors[i].values.end(), out.row(static_cast<Eigen::Index>(i)).data());
  }
  return out;
}

Token quantize(std::span<const double> values, const Codebook& cb) {
  if (values.size() != cb.dim())
    fail(ErrorCode::DimensionMismatch, fmt::format("descriptor dimension {} vs codebook dimension {}", values.size(), cb.dim()));
  std::size_t best = 0;
  double best_d = squared_distance(values.data(), cb.row(0).data(), cb.dim());
  for (std::size_t k = 1; k < cb.size(); ++k) {
    const double d = squared_distance(values.data(), cb.row(k).data(), cb.dim());
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return static_cast<Token>(best);
}

KMeansResult train_codebook(const RowMatrix& samples, const KMeansOptions& opts) {
  const auto n = static_cast<std::size_t>(samples.rows());
  const auto d = static_cast<std::size_t>(samples.cols());
  const std::size_t m = opts.codes;
  if (m < 1) fail(ErrorCode::InvalidArgument, "code count must be at least 1");
  if (opts.max_iters < 1) fail(ErrorCode::InvalidArgument, "max_iters must be at least 1");
  if (n < m) fail(ErrorCode::TooFewSamples, fmt::format("{} codes requested but only {} descriptors available", m, n));
  if (!samples.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite descriptor values");
  if (const std::size_t distinct = count_distinct_rows(samples); distinct < m)
    fail(ErrorCode::TooFewSamples,
         fmt::format("{} codes requested but only {} distinct descriptors available", m, distinct));

  auto sample = [&](std::size_t i) { return samples.data() + i * d; };

  // k-means++ seeding.
  Rng rng(opts.seed);
  RowMatrix centers(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  auto center = [&](std::size_t k) { return centers.data() + k * d; };
  std::vector<double> nearest(n);
  std::size_t first = rng.below(n);
  std::copy_n(sample(first), d, center(0));
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(sample(i), center(0), d);
  for (std::size_t k = 1; k < m; ++k) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    const double target = rng.uniform() * total;
    std::size_t pick = n;
    double cum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest[i] <= 0.0) continue;
      cum += nearest[i];
      pick = i;
      if (cum > target) break;
    }
    std::copy_n(sample(pick), d, center(k));
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], squared_distance(sample(i), center(k), d));
  }

  std::vector<std::size_t> assign(n, m);
  std::vector<double> cost(n, 0.0);
  std::vector<unsigned char> changed(n, 0);
  std::vector<std::size_t> sizes(m, 0);
  KMeansResult result;

  auto assign_step = [&] {
    parallel_for(n, opts.threads, [&](std::size_t i) {
      std::size_t best = 0;
      double best_d = squared_distance(sample(i), center(0), d);
      for (std::size_t k = 1; k < m; ++k) {
        const double dk = squared_distance(sample(i), center(k), d);
        if (dk < best_d) {
          best_d = dk;
          best = k;
        }
      }
      changed[i] = assign[i] != best;
      assign[i] = best;
      cost[i] = best_d;
    });
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) ++sizes[assign[i]];
    return std::any_of(changed.begin(), changed.end(), [](unsigned char c) { return c != 0; });
  };

  // Moves each listed center onto the sample currently farthest from its own
  // centroid, never reusing a sample within one repair.
  auto reseed = [&](const std::vector<std::size_t>& targets) {
    std::vector<unsigned char> used(n, 0);
    for (std::size_t k : targets) {
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        if (far == n || cost[i] > cost[far]) far = i;
      }
      used[far] = 1;
      std::copy_n(sample(far), d, center(k));
      cost[far] = 0.0;
    }
  };

  auto update_step = [&] {
    centers.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      double* c = center(assign[i]);
      const double* s = sample(i);
      for (std::size_t j = 0; j < d; ++j) c[j] += s[j];
    }
    std::vector<std::size_t> empty;
    for (std::size_t k = 0; k < m; ++k) {
      if (sizes[k] == 0) {
        empty.push_back(k);
        continue;
      }
      double* c = center(k);
      for (std::size_t j = 0; j < d; ++j) c[j] /= static_cast<double>(sizes[k]);
    }
    if (!empty.empty()) reseed(empty);
  };

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const bool any_change = assign_step();
    result.inertia.push_back(std::accumulate(cost.begin(), cost.end(), 0.0));
    result.iterations = iter + 1;
    if (iter > 0 && !any_change) {
      result.converged = true;
      break;
    }
    update_step();
  }

  // Coincident centroids would make an invalid codebook; split them apart.
  for (int round = 0; round < 64; ++round) {
    const auto dup = find_duplicate_rows(centers);
    if (!dup) break;
    assign_step();
    reseed({dup->second});
    assign_step();
    update_step();
  }
  assign_step();

  result.cluster_sizes = sizes;
  result.codebook = make_codebook(std::move(centers));
  return result;
}

RedundancyStats redundancy_stats(const Codebook& cb, double tau, int threads) {
  check_tau(tau);
  const std::size_t m = cb.size();
  const SynonymDict dict = build_synonym_dict(cb, tau, threads);
  const Eigen::MatrixXd dist = pairwise_distances(cb, threads);

  RedundancyStats stats;
  stats.tau = tau;
  std::size_t with_synonym = 0;
  for (const auto& entry : dict.entries) {
    if (entry.size() > 1) ++with_synonym;
    ++stats.set_size_histogram[entry.size()];
  }
  stats.synonym_fraction = static_cast<double>(with_synonym) / static_cast<double>(m);

  DisjointSets sets(m);
  std::size_t components = m;
  std::vector<double> off_diagonal;
  off_diagonal.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = i + 1; k < m; ++k) {
      const double v = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      off_diagonal.push_back(v);
      if (v < tau && sets.unite(i, k)) --components;
    }
  }
  stats.component_count = components;

  if (!off_diagonal.empty()) {
    std::sort(off_diagonal.begin(), off_diagonal.end());
    for (double p : kDistanceQuantileLevels) stats.distance_quantiles.emplace_back(p, quantile_sorted(off_diagonal, p));
  }
  return stats;
}

Projection2D project_2d(const Codebook& cb) {
  const auto m = static_cast<Eigen::Index>(cb.size());
  if (m < 3) fail(ErrorCode::TooFewCodes, fmt::format("projection needs at least 3 codes, got {}", m));
  const Eigen::MatrixXd centered = cb.vectors.rowwise() - cb.vectors.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double total = s.squaredNorm();

  Projection2D out;
  out.coords = Eigen::MatrixX2d::Zero(m, 2);
  const Eigen::Index axes = std::min<Eigen::Index>(2, s.size());
  for (Eigen::Index a = 0; a < axes; ++a) {
    Eigen::VectorXd axis = svd.matrixV().col(a);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0.0) axis = -axis;
    out.coords.col(a) = centered * axis;
    out.explained[static_cast<std::size_t>(a)] = total > 0.0 ? s(a) * s(a) / total : 0.0;
  }
  return out;
}

}  // namespace vqsyn
