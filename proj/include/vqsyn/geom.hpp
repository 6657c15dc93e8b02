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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>

namespace vqsyn {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Ordered C-alpha trace of one conformation.
struct Chain {
  std::string label;
  std::vector<Vec3> coords;

  std::size_t size() const noexcept { return coords.size(); }
};

inline constexpr std::size_t kMinChainLength = 4;
inline constexpr double kMinCalphaSpacing = 0.5;
inline constexpr double kMaxCalphaSpacing = 10.0;

// Throws ChainTooShort, InvalidArgument (non-finite) or BrokenChain.
void validate_chain(const Chain& chain);

struct Superposition {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double rmsd = 0.0;

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  std::vector<Vec3> apply(std::span<const Vec3> points) const;
};

/// Proper rotation + translation minimizing the RMSD of `mobile` onto `target`.
///
/// Reflections are removed by flipping the smallest singular direction. Throws
/// MismatchedLengths, InvalidArgument (fewer than 3 points) or DegenerateGeometry
/// when the cross-covariance has rank below 2.
Superposition kabsch_superpose(std::span<const Vec3> mobile, std::span<const Vec3> target);

// Plain coordinate RMSD, no fitting.
double rmsd_direct(std::span<const Vec3> a, std::span<const Vec3> b);

double rmsd_aligned(std::span<const Vec3> a, std::span<const Vec3> b);
double rmsd_aligned(const Chain& a, const Chain& b);

// TM-score distance scale; requires L >= 16.
double tm_d0(std::size_t length);

// (1/L) * sum 1 / (1 + (d_i/d0)^2) for a fixed set of deviations.
double tm_score_from_deviations(std::span<const double> deviations, std::size_t length);

/// TM-score with identity residue mapping. The superposition is refined by
/// re-fitting on residues closer than d0 until that subset stops changing
/// (at most 20 refits); the best score seen is returned.
double tm_score(const Chain& model, const Chain& reference);

double bond_angle(const Vec3& a, const Vec3& b, const Vec3& c);
double dihedral_angle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Rotation-invariant fragment features of a window of `window` residues:
/// w-1 bond lengths, w-2 bond angles, then (sin, cos) of each of the w-3 dihedrals.
struct Descriptor {
  int window = 0;
  std::vector<double> values;
};

constexpr int descriptor_dim(int window) noexcept { return (window - 1) + (window - 2) + 2 * (window - 3); }

// Inverse of descriptor_dim; returns 0 when `dim` does not correspond to an odd window >= 5.
int window_for_dim(int dim) noexcept;

void check_window(int window);

Descriptor window_descriptor(std::span<const Vec3> window);

/// One descriptor per residue. Residue t uses the window centered on it;
/// the first and last (w-1)/2 residues reuse the clamped terminal windows.
std::vector<Descriptor> chain_descriptors(const Chain& chain, int window);

// First residue of the window assigned to residue t.
std::size_t window_start(std::size_t t, std::size_t length, int window) noexcept;

struct InternalCoord {
  double bond = 0.0;
  double angle = 0.0;     // radians
  double dihedral = 0.0;  // radians
};

// Internal coordinate that places residue `j` (0-based, 3 <= j < w) of a window
// from the preceding three, read from descriptor entries.
InternalCoord descriptor_step(std::span<const double> values, int window, int j);

struct InternalChain {
  std::array<Vec3, 3> seed;
  std::vector<InternalCoord> steps;
};

InternalChain extract_internal(const Chain& chain);

// Natural-extension placement of a fourth atom after a, b, c.
Vec3 place_atom(const Vec3& a, const Vec3& b, const Vec3& c, const InternalCoord& ic);

/// Rebuilds a chain by sequential placement. Throws InvalidInternalCoordinate
/// for non-positive bonds or angles outside (0, pi).
Chain rebuild_chain(std::span<const InternalCoord> steps, const std::array<Vec3, 3>& seed,
                    std::string label = {});

// Three points with the given two bond lengths and angle, first at the origin.
std::array<Vec3, 3> seed_frame(double bond1, double bond2, double angle);

}  // namespace vqsyn
