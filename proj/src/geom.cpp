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

#include "vqsyn/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "vqsyn/error.hpp"

namespace vqsyn {

namespace {

Vec3 centroid(std::span<const Vec3> pts) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

void check_internal(const InternalCoord& ic, std::size_t index) {
  if (!(ic.bond > 0.0) || !std::isfinite(ic.bond))
    fail(ErrorCode::InvalidInternalCoordinate, fmt::format("step {}: bond {} is not positive", index, ic.bond));
  if (!(ic.angle > 0.0 && ic.angle < std::numbers::pi))
    fail(ErrorCode::InvalidInternalCoordinate, fmt::format("step {}: angle {} outside (0, pi)", index, ic.angle));
  if (!std::isfinite(ic.dihedral))
    fail(ErrorCode::InvalidInternalCoordinate, fmt::format("step {}: dihedral is not finite", index));
}

}  // namespace

void validate_chain(const Chain& chain) {
  if (chain.size() < kMinChainLength)
    fail(ErrorCode::ChainTooShort,
         fmt::format("chain '{}' has {} residues, need at least {}", chain.label, chain.size(), kMinChainLength));
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (!chain.coords[i].allFinite())
      fail(ErrorCode::InvalidArgument, fmt::format("chain '{}' residue {}: non-finite coordinate", chain.label, i));
  }
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const double d = (chain.coords[i] - chain.coords[i - 1]).norm();
    if (!(d > kMinCalphaSpacing && d < kMaxCalphaSpacing))
      fail(ErrorCode::BrokenChain,
           fmt::format("chain '{}': CA spacing {:.3f} A between residues {} and {}", chain.label, d, i - 1, i));
  }
}

std::vector<Vec3> Superposition::apply(std::span<const Vec3> points) const {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(apply(p));
  return out;
}

Superposition kabsch_superpose(std::span<const Vec3> mobile, std::span<const Vec3> target) {
  if (mobile.size() != target.size())
    fail(ErrorCode::MismatchedLengths, fmt::format("{} vs {} points", mobile.size(), target.size()));
  if (mobile.size() < 3) fail(ErrorCode::InvalidArgument, "superposition needs at least 3 points");

  const Vec3 cm = centroid(mobile);
  const Vec3 ct = centroid(target);
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < mobile.size(); ++i) h += (mobile[i] - cm) * (target[i] - ct).transpose();

  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 s = svd.singularValues();
  if (!(s(0) > 0.0) || s(1) <= 1e-10 * s(0))
    fail(ErrorCode::DegenerateGeometry, "covariance rank < 2 (collinear or coincident points)");

  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;

  Superposition out;
  out.rotation = v * d * u.transpose();
  out.translation = ct - out.rotation * cm;
  double sum = 0.0;
  for (std::size_t i = 0; i < mobile.size(); ++i) sum += (out.apply(mobile[i]) - target[i]).squaredNorm();
  out.rmsd = std::sqrt(sum / static_cast<double>(mobile.size()));
  return out;
}

double rmsd_direct(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.size() != b.size()) fail(ErrorCode::MismatchedLengths, fmt::format("{} vs {} points", a.size(), b.size()));
  if (a.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]).squaredNorm();
  return std::sqrt(sum / static_cast<double>(a.size()));
}

double rmsd_aligned(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.size() == b.size() && a.size() >= 3 && std::equal(a.begin(), a.end(), b.begin())) return 0.0;
  // Superpose in a fixed argument order and average both directions so the
  // result is symmetric to rounding.
  const double ab = kabsch_superpose(a, b).rmsd;
  const double ba = kabsch_superpose(b, a).rmsd;
  return 0.5 * (ab + ba);
}

double rmsd_aligned(const Chain& a, const Chain& b) { return rmsd_aligned(a.coords, b.coords); }

double tm_d0(std::size_t length) {
  if (length < 16) fail(ErrorCode::ChainTooShort, fmt::format("TM-score needs L >= 16, got {}", length));
  return 1.24 * std::cbrt(static_cast<double>(length) - 15.0) - 1.8;
}

double tm_score_from_deviations(std::span<const double> deviations, std::size_t length) {
  const double d0 = tm_d0(length);
  double sum = 0.0;
  for (double d : deviations) {
    const double r = d / d0;
    sum += 1.0 / (1.0 + r * r);
  }
  return sum / static_cast<double>(length);
}

double tm_score(const Chain& model, const Chain& reference) {
  const std::size_t n = model.size();
  if (n != reference.size()) fail(ErrorCode::MismatchedLengths, fmt::format("{} vs {} residues", n, reference.size()));
  const double d0 = tm_d0(n);

  std::vector<double> dev(n);
  auto score_under = [&](const Superposition& sp) {
    for (std::size_t i = 0; i < n; ++i) dev[i] = (sp.apply(model.coords[i]) - reference.coords[i]).norm();
    return tm_score_from_deviations(dev, n);
  };

  Superposition sp = kabsch_superpose(model.coords, reference.coords);
  double best = score_under(sp);

  std::vector<std::size_t> subset;
  std::vector<std::size_t> previous;
  std::vector<Vec3> sub_model;
  std::vector<Vec3> sub_ref;
  for (int iter = 0; iter < 20; ++iter) {
    subset.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (dev[i] < d0) subset.push_back(i);
    if (subset == previous || subset.size() < 3) break;
    sub_model.clear();
    sub_ref.clear();
    for (std::size_t i : subset) {
      sub_model.push_back(model.coords[i]);
      sub_ref.push_back(reference.coords[i]);
    }
    try {
      sp = kabsch_superpose(sub_model, sub_ref);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateGeometry) break;
      throw;
    }
    best = std::max(best, score_under(sp));
    previous.swap(subset);
  }
  return best;
}

double bond_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u = a - b;
  const Vec3 v = c - b;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

double dihedral_angle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 b1 = b - a;
  const Vec3 b2 = c - b;
  const Vec3 b3 = d - c;
  const Vec3 n1 = b1.cross(b2);
  const Vec3 n2 = b2.cross(b3);
  const double x = n1.dot(n2);
  const double y = n1.cross(n2).dot(b2) / b2.norm();
  return std::atan2(y, x);
}

int window_for_dim(int dim) noexcept {
  if ((dim + 9) % 4 != 0) return 0;
  const int w = (dim + 9) / 4;
  return (w >= 5 && w % 2 == 1) ? w : 0;
}

void check_window(int window) {
  if (window % 2 == 0) fail(ErrorCode::EvenWindow, fmt::format("window {} is even", window));
  if (window < 5) fail(ErrorCode::InvalidArgument, fmt::format("window {} is below 5", window));
}

Descriptor window_descriptor(std::span<const Vec3> pts) {
  const int w = static_cast<int>(pts.size());
  check_window(w);
  Descriptor out;
  out.window = w;
  out.values.reserve(static_cast<std::size_t>(descriptor_dim(w)));
  for (int i = 0; i + 1 < w; ++i) out.values.push_back((pts[i + 1] - pts[i]).norm());
  for (int i = 0; i + 2 < w; ++i) out.values.push_back(bond_angle(pts[i], pts[i + 1], pts[i + 2]));
  for (int i = 0; i + 3 < w; ++i) {
    const Vec3 b1 = pts[i + 1] - pts[i];
    const Vec3 b2 = pts[i + 2] - pts[i + 1];
    const Vec3 b3 = pts[i + 3] - pts[i + 2];
    const Vec3 n1 = b1.cross(b2);
    const Vec3 n2 = b2.cross(b3);
    const double x = n1.dot(n2);
    const double y = n1.cross(n2).dot(b2) / b2.norm();
    const double r = std::hypot(x, y);
    if (!(r > 0.0)) fail(ErrorCode::DegenerateGeometry, fmt::format("undefined dihedral at window offset {}", i));
    out.values.push_back(y / r);
    out.values.push_back(x / r);
  }
  return out;
}

std::size_t window_start(std::size_t t, std::size_t length, int window) noexcept {
  const std::size_t h = static_cast<std::size_t>(window - 1) / 2;
  const std::size_t last = length - static_cast<std::size_t>(window);
  if (t < h) return 0;
  return std::min(t - h, last);
}

std::vector<Descriptor> chain_descriptors(const Chain& chain, int window) {
  check_window(window);
  if (chain.size() < static_cast<std::size_t>(window))
    fail(ErrorCode::ChainTooShort, fmt::format("chain '{}' has {} residues, window is {}", chain.label, chain.size(), window));
  std::vector<Descriptor> out;
  out.reserve(chain.size());
  const std::span<const Vec3> all(chain.coords);
  for (std::size_t t = 0; t < chain.size(); ++t)
    out.push_back(window_descriptor(all.subspan(window_start(t, chain.size(), window), static_cast<std::size_t>(window))));
  return out;
}

InternalCoord descriptor_step(std::span<const double> values, int window, int j) {
  const auto w = static_cast<std::size_t>(window);
  const auto k = static_cast<std::size_t>(j);
  InternalCoord ic;
  ic.bond = values[k - 1];
  ic.angle = values[(w - 1) + (k - 2)];
  const std::size_t dih = (w - 1) + (w - 2) + 2 * (k - 3);
  ic.dihedral = std::atan2(values[dih], values[dih + 1]);
  return ic;
}

InternalChain extract_internal(const Chain& chain) {
  if (chain.size() < 3) fail(ErrorCode::ChainTooShort, "need at least 3 residues");
  InternalChain out;
  out.seed = {chain.coords[0], chain.coords[1], chain.coords[2]};
  for (std::size_t j = 3; j < chain.size(); ++j) {
    const auto& c = chain.coords;
    out.steps.push_back({(c[j] - c[j - 1]).norm(), bond_angle(c[j - 2], c[j - 1], c[j]),
                         dihedral_angle(c[j - 3], c[j - 2], c[j - 1], c[j])});
  }
  return out;
}

Vec3 place_atom(const Vec3& a, const Vec3& b, const Vec3& c, const InternalCoord& ic) {
  const Vec3 bc = (c - b).normalized();
  const Vec3 n = (b - a).cross(bc).normalized();
  const Vec3 m = n.cross(bc);
  const double r = ic.bond;
  const Vec3 local(-r * std::cos(ic.angle), r * std::sin(ic.angle) * std::cos(ic.dihedral),
                   r * std::sin(ic.angle) * std::sin(ic.dihedral));
  return c + bc * local.x() + m * local.y() + n * local.z();
}

Chain rebuild_chain(std::span<const InternalCoord> steps, const std::array<Vec3, 3>& seed, std::string label) {
  Chain out;
  out.label = std::move(label);
  out.coords.reserve(steps.size() + 3);
  out.coords.assign(seed.begin(), seed.end());
  if ((seed[1] - seed[0]).cross(seed[2] - seed[1]).norm() <= 0.0)
    fail(ErrorCode::InvalidInternalCoordinate, "seed frame is collinear");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    check_internal(steps[i], i);
    const std::size_t k = out.coords.size();
    out.coords.push_back(place_atom(out.coords[k - 3], out.coords[k - 2], out.coords[k - 1], steps[i]));
  }
  return out;
}

std::array<Vec3, 3> seed_frame(double bond1, double bond2, double angle) {
  const Vec3 p0 = Vec3::Zero();
  const Vec3 p1(bond1, 0.0, 0.0);
  const Vec3 p2 = p1 + bond2 * Vec3(-std::cos(angle), std::sin(angle), 0.0);
  return {p0, p1, p2};
}

}  // namespace vqsyn
