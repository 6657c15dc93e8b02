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

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "vqsyn/ensemble.hpp"
#include "vqsyn/geom.hpp"

namespace vqsyn::testing {

using Engine = std::mt19937_64;

inline double gauss(Engine& rng, double sigma = 1.0) { return std::normal_distribution<double>(0.0, sigma)(rng); }
inline double uniform(Engine& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Uniform on SO(3) via a normalized Gaussian quaternion.
inline Mat3 random_rotation(Engine& rng) {
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline std::vector<Vec3> random_cloud(Engine& rng, std::size_t n, double spread = 5.0) {
  std::vector<Vec3> pts(n);
  for (auto& p : pts) p = Vec3(gauss(rng, spread), gauss(rng, spread), gauss(rng, spread));
  return pts;
}

inline std::vector<Vec3> transform(const std::vector<Vec3>& pts, const Mat3& r, const Vec3& t) {
  std::vector<Vec3> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(r * p + t);
  return out;
}

// Slightly irregular helix with roughly 3.8 A spacing and a slow bend.
inline Chain synthetic_chain(std::size_t n, std::uint64_t seed, double noise = 0.25, std::string label = "toy") {
  Engine rng(seed);
  const double turn = 100.0 * std::numbers::pi / 180.0;
  const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  Chain c;
  c.label = std::move(label);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    const double bend = 0.02 * t * t;
    c.coords.emplace_back(2.3 * std::cos(turn * t + phase) + bend + gauss(rng, noise),
                          2.3 * std::sin(turn * t + phase) + gauss(rng, noise), 1.5 * t + gauss(rng, noise));
  }
  return c;
}

// Places d from a, b, c with bond |cd|, angle bcd and dihedral abcd.
inline Vec3 place_from(const Vec3& a, const Vec3& b, const Vec3& c, double bond, double theta, double phi) {
  const Vec3 bc = (c - b).normalized();
  const Vec3 n = (b - a).cross(bc).normalized();
  const Vec3 m = n.cross(bc);
  return c + bond * (-std::cos(theta) * bc + std::sin(theta) * std::cos(phi) * m + std::sin(theta) * std::sin(phi) * n);
}

// Protein-like trace: near-constant 3.8 A spacing with helix, strand and coil
// segments of 4 to 10 residues.
inline Chain protein_like_chain(std::size_t n, std::uint64_t seed, std::string label = "trace") {
  Engine rng(seed);
  Chain c;
  c.label = std::move(label);
  c.coords = {Vec3(0, 0, 0), Vec3(3.8, 0, 0), Vec3(3.8 + 3.8 * std::cos(1.2), 3.8 * std::sin(1.2), 0)};
  int state = 0, left = 0;
  while (c.coords.size() < n) {
    if (left == 0) {
      state = static_cast<int>(rng() % 3);
      left = 4 + static_cast<int>(rng() % 7);
    }
    --left;
    double theta = 0.0, phi = 0.0;
    if (state == 0) {
      theta = 1.57 + gauss(rng, 0.05);
      phi = 0.87 + gauss(rng, 0.12);
    } else if (state == 1) {
      theta = 2.10 + gauss(rng, 0.07);
      phi = -2.95 + gauss(rng, 0.2);
    } else {
      theta = 1.85 + gauss(rng, 0.15);
      phi = uniform(rng, -3.1, 3.1);
    }
    const auto k = c.coords.size();
    c.coords.push_back(place_from(c.coords[k - 3], c.coords[k - 2], c.coords[k - 1], 3.8 + gauss(rng, 0.02), theta, phi));
  }
  return c;
}

inline Ensemble single(const Chain& c) {
  Ensemble e;
  e.conformations.push_back(c);
  return e;
}

// Isotropic Gaussian jitter of every coordinate around `base`.
inline Ensemble jittered(const Chain& base, std::size_t members, double sigma, std::uint64_t seed) {
  Engine rng(seed);
  Ensemble e;
  for (std::size_t t = 0; t < members; ++t) {
    Chain c;
    c.label = base.label + "_" + std::to_string(t);
    for (const auto& p : base.coords) c.coords.push_back(p + Vec3(gauss(rng, sigma), gauss(rng, sigma), gauss(rng, sigma)));
    e.conformations.push_back(std::move(c));
  }
  return e;
}

// Jitter whose scale varies along the chain.
inline Ensemble jittered_profile(const Chain& base, std::size_t members, const std::vector<double>& sigma,
                                 std::uint64_t seed) {
  Engine rng(seed);
  Ensemble e;
  for (std::size_t t = 0; t < members; ++t) {
    Chain c;
    c.label = base.label + "_" + std::to_string(t);
    for (std::size_t i = 0; i < base.size(); ++i)
      c.coords.push_back(base.coords[i] + Vec3(gauss(rng, sigma[i]), gauss(rng, sigma[i]), gauss(rng, sigma[i])));
    e.conformations.push_back(std::move(c));
  }
  return e;
}

// Plain sum-of-squares RMSD with no superposition.
inline double raw_rmsd(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]).squaredNorm();
  return std::sqrt(s / static_cast<double>(a.size()));
}

// RMSD after applying rotation `r` about centroids, optimal translation.
inline double rmsd_under(const std::vector<Vec3>& mobile, const std::vector<Vec3>& target, const Mat3& r) {
  Vec3 cm = Vec3::Zero(), ct = Vec3::Zero();
  for (std::size_t i = 0; i < mobile.size(); ++i) {
    cm += mobile[i];
    ct += target[i];
  }
  cm /= static_cast<double>(mobile.size());
  ct /= static_cast<double>(target.size());
  double s = 0.0;
  for (std::size_t i = 0; i < mobile.size(); ++i) s += (r * (mobile[i] - cm) - (target[i] - ct)).squaredNorm();
  return std::sqrt(s / static_cast<double>(mobile.size()));
}

}  // namespace vqsyn::testing
