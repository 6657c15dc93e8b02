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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "support.hpp"
#include "vqsyn/error.hpp"
#include "vqsyn/metrics.hpp"

using namespace vqsyn;
using namespace vqsyn::testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoError;
}

double textbook_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
    sab += a[i] * b[i];
  }
  return (n * sab - sa * sb) / (std::sqrt(n * saa - sa * sa) * std::sqrt(n * sbb - sb * sb));
}

double total_variance(const Ensemble& e) {
  const std::size_t n = e.residue_count();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 mean = Vec3::Zero();
    for (const auto& c : e.conformations) mean += c.coords[i];
    mean /= static_cast<double>(e.size());
    for (const auto& c : e.conformations) s += (c.coords[i] - mean).squaredNorm();
  }
  return s;
}

Ensemble rotate_members(const Ensemble& e, std::uint64_t seed) {
  Engine rng(seed);
  Ensemble out = e;
  for (auto& c : out.conformations) c.coords = transform(c.coords, random_rotation(rng), Vec3(gauss(rng, 9), gauss(rng, 9), 0));
  return out;
}

EnsembleReport hand_report(const std::string& label, double r, double pg, double pr, double md, double joint,
                           std::vector<double> rg, std::vector<double> rr) {
  EnsembleReport rep;
  rep.label = label;
  rep.per_target_rmsf_r = r;
  rep.mean_pairwise_rmsd_generated = pg;
  rep.mean_pairwise_rmsd_reference = pr;
  rep.md_pca_w2 = md;
  rep.joint_pca_w2 = joint;
  rep.rmsf_generated = std::move(rg);
  rep.rmsf_reference = std::move(rr);
  return rep;
}

}  // namespace

TEST_CASE("alignment of identical and rotated members") {
  const auto base = synthetic_chain(20, 1);
  Ensemble same;
  for (int i = 0; i < 5; ++i) same.conformations.push_back(base);
  const auto aligned = align_ensemble(same);
  for (const auto& c : aligned.conformations) CHECK(raw_rmsd(c.coords, base.coords) < 1e-12);
  for (double v : rmsf(aligned)) CHECK(v == 0.0);
  CHECK(raw_rmsd(mean_structure(aligned).coords, base.coords) < 1e-12);

  Ensemble pair;
  Engine rng(2);
  pair.conformations = {base, base};
  pair.conformations[1].coords = transform(base.coords, random_rotation(rng), Vec3(3, 4, 5));
  const auto ap = align_ensemble(pair);
  CHECK(raw_rmsd(ap.conformations[0].coords, ap.conformations[1].coords) < 1e-9);
}

TEST_CASE("alignment never increases total variance") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto e = rotate_members(jittered(synthetic_chain(30, seed), 20, 0.8, seed + 10), seed + 20);
    CHECK(total_variance(align_ensemble(e)) <= total_variance(e));
  }
}

TEST_CASE("RMSF limits and direct summation") {
  const auto base = synthetic_chain(12, 3);
  Ensemble same;
  for (int i = 0; i < 4; ++i) same.conformations.push_back(base);
  for (double v : rmsf(same)) CHECK(v == 0.0);

  Ensemble two_state;
  for (int t = 0; t < 6; ++t) {
    Chain c = base;
    c.coords[4] += Vec3(t % 2 == 0 ? 1.0 : -1.0, 0, 0);
    two_state.conformations.push_back(c);
  }
  const auto r2 = rmsf(two_state);
  CHECK(r2[4] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r2[3] < 1e-12);

  Engine rng(4);
  Ensemble five;
  for (int t = 0; t < 5; ++t) {
    Chain c = base;
    for (auto& p : c.coords) p += Vec3(gauss(rng), gauss(rng), gauss(rng));
    five.conformations.push_back(c);
  }
  const auto r = rmsf(five);
  for (std::size_t i = 0; i < base.size(); ++i) {
    double mx = 0, my = 0, mz = 0;
    for (const auto& c : five.conformations) {
      mx += c.coords[i].x();
      my += c.coords[i].y();
      mz += c.coords[i].z();
    }
    mx /= 5;
    my /= 5;
    mz /= 5;
    double s = 0.0;
    for (const auto& c : five.conformations) {
      const double dx = c.coords[i].x() - mx, dy = c.coords[i].y() - my, dz = c.coords[i].z() - mz;
      s += dx * dx + dy * dy + dz * dz;
    }
    CHECK(r[i] == doctest::Approx(std::sqrt(s / 5)).epsilon(1e-12));
  }
  CHECK(code_of([&] { rmsf(single(base)); }) == ErrorCode::SingleConformation);
}

TEST_CASE("RMSF is invariant to member rotations after alignment") {
  const auto e = jittered(synthetic_chain(25, 5), 30, 0.7, 6);
  const auto a = rmsf(align_ensemble(e));
  const auto b = rmsf(align_ensemble(rotate_members(e, 7)));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-5));
}

TEST_CASE("Pearson correlation") {
  const std::vector<double> a{1, 2, 3, 5, 8};
  std::vector<double> neg;
  for (double x : a) neg.push_back(-x);
  CHECK(pearson(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(a, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  const std::vector<double> x{1, 2, 3}, y{1, 2, 4};
  CHECK(pearson(x, y) == doctest::Approx(textbook_pearson(x, y)).epsilon(1e-12));
  CHECK(pearson(x, y) == doctest::Approx(3.0 / std::sqrt(2.0 * 14.0 / 3.0)).epsilon(1e-12));
  Engine rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(20), q(20);
    for (std::size_t i = 0; i < 20; ++i) {
      p[i] = gauss(rng);
      q[i] = 0.5 * p[i] + gauss(rng);
    }
    const double r = pearson(p, q);
    CHECK(r == doctest::Approx(textbook_pearson(p, q)).epsilon(1e-10));
    CHECK(r <= 1.0);
    CHECK(r >= -1.0);
    CHECK(pearson(q, p) == r);
  }
  const std::vector<double> flat{2, 2, 2};
  CHECK(code_of([&] { pearson(flat, x); }) == ErrorCode::ConstantInput);
  CHECK(code_of([&] { pearson(x, std::vector<double>{1, 2}); }) == ErrorCode::MismatchedLengths);
}

TEST_CASE("mean pairwise RMSD") {
  const auto base = synthetic_chain(15, 9);
  Ensemble same;
  for (int i = 0; i < 4; ++i) same.conformations.push_back(base);
  CHECK(mean_pairwise_rmsd(same) == 0.0);

  Ensemble pair = jittered(base, 2, 1.0, 10);
  CHECK(mean_pairwise_rmsd(pair) == rmsd_aligned(pair.conformations[0], pair.conformations[1]));

  const auto four = jittered(base, 4, 1.0, 11);
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) {
        sum += rmsd_aligned(four.conformations[i], four.conformations[j]);
        ++count;
      }
  CHECK(mean_pairwise_rmsd(four) == doctest::Approx(sum / count).epsilon(1e-12));

  const auto many = jittered(base, 40, 1.0, 12);
  CHECK(mean_pairwise_rmsd(many, 1) == mean_pairwise_rmsd(many, 6));
  CHECK(code_of([&] { mean_pairwise_rmsd(single(base)); }) == ErrorCode::SingleConformation);
}

TEST_CASE("PCA matches the covariance eigendecomposition") {
  const auto e = align_ensemble(jittered(synthetic_chain(8, 13), 10, 0.6, 14));
  const auto model = pca_fit(e, 5);
  const Eigen::MatrixXd x = flatten(e);
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const auto n = eig.eigenvalues().size();
  for (int k = 0; k < 5; ++k) CHECK(model.eigenvalues(k) == doctest::Approx(eig.eigenvalues()(n - 1 - k)).epsilon(1e-8));
  const Eigen::MatrixXd gram = model.components * model.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-9);

  const Eigen::MatrixXd proj = pca_project(model, x);
  for (int k = 0; k < 5; ++k) {
    const Eigen::VectorXd col = proj.col(k);
    CHECK(std::abs(col.mean()) < 1e-9);
    CHECK(col.squaredNorm() / 9.0 == doctest::Approx(model.eigenvalues(k)).epsilon(1e-9));
  }
}

TEST_CASE("PCA of a one-direction ensemble") {
  const auto base = synthetic_chain(10, 15);
  Engine rng(16);
  Eigen::VectorXd dir(30);
  for (auto& v : dir) v = gauss(rng);
  dir.normalize();
  Eigen::MatrixXd x(12, 30);
  for (int t = 0; t < 12; ++t)
    for (int j = 0; j < 30; ++j) x(t, j) = base.coords[static_cast<std::size_t>(j / 3)](j % 3) + (t - 5.5) * dir(j);
  const auto model = pca_fit(x, 2);
  CHECK(std::abs(model.eigenvalues(1)) < 1e-9);
  CHECK(std::abs(std::abs(model.components.row(0).dot(dir)) - 1.0) < 1e-9);
  CHECK(code_of([&] { pca_fit(Eigen::MatrixXd(x.topRows(2)), 2); }) == ErrorCode::TooFewConformations);
}

TEST_CASE("Gaussian fit") {
  Engine rng(17);
  Eigen::MatrixXd x(40, 3);
  for (auto& v : x.reshaped()) v = gauss(rng, 2.0);
  const auto g = fit_gaussian(x);
  for (int j = 0; j < 3; ++j) {
    CHECK(g.mean(j) == doctest::Approx(x.col(j).mean()).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) {
      double s = 0.0;
      for (int t = 0; t < 40; ++t) s += (x(t, j) - g.mean(j)) * (x(t, k) - g.mean(k));
      CHECK(g.cov(j, k) == doctest::Approx(s / 39.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("W2 closed forms") {
  Eigen::VectorXd m0 = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(2, 2);
  CHECK(w2_gaussian(m0, c, m0, c) == 0.0);

  Eigen::VectorXd a(2), b(2);
  a << 0, 0;
  b << 3, 0;
  Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(2, 2), s2 = Eigen::MatrixXd::Zero(2, 2);
  s1(0, 0) = 1;
  s2(0, 0) = 4;
  CHECK(w2_gaussian(a, s1, b, s2) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));

  Eigen::MatrixXd d1 = Eigen::Vector2d(4, 1).asDiagonal(), d2 = Eigen::Vector2d(1, 4).asDiagonal();
  const double w = w2_gaussian(m0, d1, m0, d2);
  CHECK(w * w == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("W2 properties") {
  Engine rng(18);
  auto random_spd = [&](int n) {
    Eigen::MatrixXd q(n, n);
    for (auto& v : q.reshaped()) v = gauss(rng);
    return Eigen::MatrixXd(q * q.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n));
  };
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 4;
    Eigen::VectorXd m1(n), m2(n);
    for (auto& v : m1) v = gauss(rng);
    for (auto& v : m2) v = gauss(rng);
    const auto c1 = random_spd(n), c2 = random_spd(n), c3 = random_spd(n);
    const double w12 = w2_gaussian(m1, c1, m2, c2);
    CHECK(w12 >= 0.0);
    CHECK(w12 == doctest::Approx(w2_gaussian(m2, c2, m1, c1)).epsilon(1e-9));
    CHECK(w12 <= w2_gaussian(m1, c1, m1, c3) + w2_gaussian(m1, c3, m2, c2) + 1e-9);
    CHECK(w2_gaussian(m1, c1, m2, c1) == doctest::Approx((m1 - m2).norm()).epsilon(1e-6));
  }
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0, 0, -1;
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(2);
  CHECK(code_of([&] { w2_gaussian(z, bad, z, bad); }) == ErrorCode::NonSPDCovariance);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0, 1;
  CHECK(code_of([&] { w2_gaussian(z, asym, z, Eigen::MatrixXd::Identity(2, 2)); }) == ErrorCode::NonSPDCovariance);
  CHECK(code_of([&] { w2_gaussian(z, Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("evaluating an ensemble against itself") {
  const auto e = jittered(synthetic_chain(30, 19), 20, 0.5, 20);
  const auto r = evaluate_ensembles(e, e, {}, "self");
  CHECK(r.label == "self");
  REQUIRE(r.per_target_rmsf_r);
  CHECK(*r.per_target_rmsf_r == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*r.md_pca_w2 == 0.0);
  CHECK(*r.joint_pca_w2 == 0.0);
  CHECK(*r.mean_pairwise_rmsd_generated == *r.mean_pairwise_rmsd_reference);
  CHECK(r.errors.empty());
}

TEST_CASE("evaluation ignores member order") {
  const auto ref = jittered(synthetic_chain(30, 21), 20, 0.5, 22);
  const auto gen = jittered(synthetic_chain(30, 21), 20, 0.5, 23);
  Ensemble shuffled = gen;
  std::reverse(shuffled.conformations.begin(), shuffled.conformations.end());
  std::rotate(shuffled.conformations.begin(), shuffled.conformations.begin() + 7, shuffled.conformations.end());
  const auto a = evaluate_ensembles(gen, ref);
  const auto b = evaluate_ensembles(shuffled, ref);
  CHECK(*a.per_target_rmsf_r == doctest::Approx(*b.per_target_rmsf_r).epsilon(1e-6));
  CHECK(*a.md_pca_w2 == doctest::Approx(*b.md_pca_w2).epsilon(1e-6));
  CHECK(*a.joint_pca_w2 == doctest::Approx(*b.joint_pca_w2).epsilon(1e-6));
  CHECK(*a.mean_pairwise_rmsd_generated == doctest::Approx(*b.mean_pairwise_rmsd_generated).epsilon(1e-12));
  for (std::size_t i = 0; i < a.rmsf_generated.size(); ++i)
    CHECK(a.rmsf_generated[i] == doctest::Approx(b.rmsf_generated[i]).epsilon(1e-6));
}

TEST_CASE("evaluation tracks a per-residue flexibility profile") {
  const auto base = synthetic_chain(40, 24);
  std::vector<double> sigma(40);
  for (std::size_t i = 0; i < 40; ++i) sigma[i] = 0.2 + 1.5 * std::pow(std::sin(static_cast<double>(i) * 0.15), 2);
  const auto ref = jittered_profile(base, 150, sigma, 25);
  const auto gen = jittered_profile(base, 150, sigma, 26);
  const auto r = evaluate_ensembles(gen, ref, {2, 4});
  CHECK(*r.per_target_rmsf_r > 0.9);
  std::vector<double> flat(40, 0.7);
  const auto other = evaluate_ensembles(jittered_profile(base, 150, flat, 27), ref);
  CHECK(*other.md_pca_w2 > *r.md_pca_w2);
}

TEST_CASE("evaluation preconditions and partial failures") {
  const auto base = synthetic_chain(20, 28);
  const auto ref = jittered(base, 10, 0.5, 29);
  auto shorter = jittered(synthetic_chain(19, 28), 10, 0.5, 30);
  CHECK(code_of([&] { evaluate_ensembles(shorter, ref); }) == ErrorCode::MismatchedLengths);
  auto two = jittered(base, 2, 0.5, 31);
  CHECK(code_of([&] { evaluate_ensembles(two, ref); }) == ErrorCode::TooFewConformations);

  Ensemble rigid;
  for (int i = 0; i < 5; ++i) rigid.conformations.push_back(base);
  const auto r = evaluate_ensembles(rigid, ref);
  CHECK_FALSE(r.per_target_rmsf_r);
  CHECK(r.errors.count("per_target_rmsf_r") == 1);
  REQUIRE(r.mean_pairwise_rmsd_generated);
  CHECK(*r.mean_pairwise_rmsd_generated == 0.0);
  CHECK(r.md_pca_w2);
}

TEST_CASE("median") {
  CHECK_FALSE(median({}));
  CHECK(*median({3.0}) == 3.0);
  CHECK(*median({5.0, 1.0, 3.0}) == 3.0);
  CHECK(*median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  Engine rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(1 + trial);
    for (auto& x : v) x = gauss(rng);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double expect = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2;
    CHECK(*median(v) == expect);
  }
}

TEST_CASE("corpus report") {
  const auto one = hand_report("a", 1.0, 2.0, 2.0, 0.0, 0.0, {1, 2, 3}, {1, 2, 3});
  const std::vector<EnsembleReport> single_target{one};
  const auto c1 = corpus_report(single_target);
  CHECK(c1.targets == 1);
  CHECK(*c1.median_per_target_rmsf_r == 1.0);
  CHECK_FALSE(c1.pairwise_rmsd_r);
  CHECK_FALSE(c1.global_rmsf_r);

  const std::vector<EnsembleReport> three{
      hand_report("a", 0.8, 2.0, 2.5, 0.4, 0.1, {1, 2}, {1.5, 2.5}),
      hand_report("b", 0.3, 1.0, 1.2, 0.9, 0.3, {0.5, 0.7, 0.9}, {0.4, 0.8, 1.1}),
      hand_report("c", 0.6, 3.0, 2.9, 0.2, 0.7, {2, 1}, {2.2, 0.9}),
  };
  const auto c3 = corpus_report(three);
  CHECK(*c3.median_per_target_rmsf_r == 0.6);
  CHECK(*c3.median_md_pca_w2 == 0.4);
  CHECK(*c3.median_joint_pca_w2 == 0.3);
  CHECK(*c3.pairwise_rmsd_r == doctest::Approx(textbook_pearson({2.0, 1.0, 3.0}, {2.5, 1.2, 2.9})).epsilon(1e-12));
  const std::vector<double> g{1, 2, 0.5, 0.7, 0.9, 2, 1}, r{1.5, 2.5, 0.4, 0.8, 1.1, 2.2, 0.9};
  CHECK(*c3.global_rmsf_r == doctest::Approx(textbook_pearson(g, r)).epsilon(1e-12));

  auto partial = three;
  partial[1].md_pca_w2.reset();
  CHECK(*corpus_report(partial).median_md_pca_w2 == doctest::Approx(0.3));
  CHECK(code_of([] { corpus_report({}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("report metadata names the estimators") {
  const auto& meta = report_metadata();
  CHECK(meta.at("pca_components") == "2");
  CHECK(meta.at("w2_estimator") == "gaussian_closed_form");
}
