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

#include "vqsyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "vqsyn/error.hpp"
#include "vqsyn/parallel.hpp"

namespace vqsyn {

namespace {

void check_uniform(const Ensemble& e) {
  validate_ensemble(e);
}

void superpose_all(std::vector<Chain>& members, std::span<const Vec3> target) {
  for (auto& member : members) {
    const Superposition sp = kabsch_superpose(member.coords, target);
    for (auto& p : member.coords) p = sp.apply(p);
  }
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, const char* which) {
  if (m.rows() != m.cols()) fail(ErrorCode::NonSPDCovariance, fmt::format("{} covariance is not square", which));
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    fail(ErrorCode::NonSPDCovariance, fmt::format("{} covariance is not symmetric", which));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  Eigen::VectorXd vals = eig.eigenvalues();
  if (vals.minCoeff() < -1e-10)
    fail(ErrorCode::NonSPDCovariance, fmt::format("{} covariance has eigenvalue {}", which, vals.minCoeff()));
  vals = vals.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

template <typename Fn>
void attempt(EnsembleReport& report, const char* field, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    report.errors[field] = e.what();
  }
}

}  // namespace

Chain mean_structure(const Ensemble& e) {
  check_uniform(e);
  Chain mean;
  mean.label = "mean";
  mean.coords.assign(e.residue_count(), Vec3::Zero());
  for (const auto& member : e.conformations)
    for (std::size_t i = 0; i < member.size(); ++i) mean.coords[i] += member.coords[i];
  for (auto& p : mean.coords) p /= static_cast<double>(e.size());
  return mean;
}

Ensemble align_ensemble(const Ensemble& e) {
  check_uniform(e);
  Ensemble out = e;
  const std::vector<Vec3> first = out.conformations.front().coords;
  superpose_all(out.conformations, first);
  Chain mean = mean_structure(out);
  for (int iter = 0; iter < kAlignMaxIters; ++iter) {
    superpose_all(out.conformations, mean.coords);
    Chain next = mean_structure(out);
    const double moved = rmsd_direct(next.coords, mean.coords);
    mean = std::move(next);
    if (moved < kAlignTolerance) break;
  }
  return out;
}

std::vector<double> rmsf(const Ensemble& aligned) {
  check_uniform(aligned);
  if (aligned.size() < 2) fail(ErrorCode::SingleConformation, "RMSF needs at least 2 conformations");
  const Chain mean = mean_structure(aligned);
  std::vector<double> out(aligned.residue_count(), 0.0);
  for (const auto& member : aligned.conformations)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (member.coords[i] - mean.coords[i]).squaredNorm();
  for (auto& v : out) {
    v = std::sqrt(v / static_cast<double>(aligned.size()));
    if (v < kRmsfFloor) v = 0.0;
  }
  return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::MismatchedLengths, fmt::format("{} vs {} values", a.size(), b.size()));
  if (a.size() < 2) fail(ErrorCode::InvalidArgument, "correlation needs at least 2 values");
  const auto n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) fail(ErrorCode::ConstantInput, "correlation undefined for constant input");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double mean_pairwise_rmsd(const Ensemble& e, int threads) {
  check_uniform(e);
  const std::size_t t = e.size();
  if (t < 2) fail(ErrorCode::SingleConformation, "pairwise RMSD needs at least 2 conformations");
  std::vector<double> per_row(t, 0.0);
  parallel_for(t, threads, [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = i + 1; j < t; ++j) s += rmsd_aligned(e.conformations[i], e.conformations[j]);
    per_row[i] = s;
  });
  double sum = 0.0;
  for (double v : per_row) sum += v;
  return sum / static_cast<double>(t * (t - 1) / 2);
}

Eigen::MatrixXd flatten(const Ensemble& e) {
  check_uniform(e);
  const auto l = static_cast<Eigen::Index>(e.residue_count());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(e.size()), 3 * l);
  for (Eigen::Index t = 0; t < out.rows(); ++t) {
    const auto& member = e.conformations[static_cast<std::size_t>(t)];
    for (Eigen::Index i = 0; i < l; ++i) out.block<1, 3>(t, 3 * i) = member.coords[static_cast<std::size_t>(i)].transpose();
  }
  return out;
}

PcaModel pca_fit(const Eigen::MatrixXd& samples, int n_components) {
  if (samples.rows() < 3) fail(ErrorCode::TooFewConformations, fmt::format("PCA needs at least 3 samples, got {}", samples.rows()));
  if (n_components < 1 || n_components > std::min(samples.rows(), samples.cols()))
    fail(ErrorCode::InvalidArgument, fmt::format("{} components requested from {}x{} data", n_components,
                                                 samples.rows(), samples.cols()));
  PcaModel model;
  model.mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - model.mean;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const double denom = static_cast<double>(samples.rows() - 1);
  model.components.resize(n_components, samples.cols());
  model.eigenvalues.resize(n_components);
  for (int k = 0; k < n_components; ++k) {
    Eigen::VectorXd axis = svd.matrixV().col(k);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0.0) axis = -axis;
    model.components.row(k) = axis.transpose();
    const double s = svd.singularValues()(k);
    model.eigenvalues(k) = s * s / denom;
  }
  return model;
}

PcaModel pca_fit(const Ensemble& aligned, int n_components) { return pca_fit(flatten(aligned), n_components); }

Eigen::MatrixXd pca_project(const PcaModel& model, const Eigen::MatrixXd& samples) {
  if (samples.cols() != model.mean.size())
    fail(ErrorCode::DimensionMismatch, fmt::format("{} columns vs model dimension {}", samples.cols(), model.mean.size()));
  return (samples.rowwise() - model.mean) * model.components.transpose();
}

Gaussian fit_gaussian(const Eigen::MatrixXd& samples) {
  if (samples.rows() < 2) fail(ErrorCode::TooFewConformations, "covariance needs at least 2 samples");
  Gaussian g;
  g.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - g.mean.transpose();
  g.cov = centered.transpose() * centered / static_cast<double>(samples.rows() - 1);
  return g;
}

double w2_gaussian(const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1, const Eigen::VectorXd& mean2,
                   const Eigen::MatrixXd& cov2) {
  if (mean1.size() != mean2.size() || cov1.rows() != mean1.size() || cov2.rows() != mean2.size())
    fail(ErrorCode::DimensionMismatch, "Gaussian dimensions differ");
  const Eigen::MatrixXd s1 = psd_sqrt(cov1, "first");
  const Eigen::MatrixXd s2 = psd_sqrt(cov2, "second");
  // tr((S2^1/2 S1 S2^1/2)^1/2) is the nuclear norm of S1^1/2 S2^1/2.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s1 * s2);
  const double cross = svd.singularValues().sum();
  const double scale = (mean1 - mean2).squaredNorm() + cov1.trace() + cov2.trace();
  const double sq = scale - 2.0 * cross;
  // Below the rounding floor of the traces the difference carries no signal.
  if (sq <= 64.0 * std::numeric_limits<double>::epsilon() * scale) return 0.0;
  return std::sqrt(sq);
}

EnsembleReport evaluate_ensembles(const Ensemble& generated, const Ensemble& reference, const EvaluateOptions& opts,
                                  std::string label) {
  check_uniform(generated);
  check_uniform(reference);
  if (generated.residue_count() != reference.residue_count())
    fail(ErrorCode::MismatchedLengths, fmt::format("generated ensemble has {} residues, reference has {}",
                                                   generated.residue_count(), reference.residue_count()));
  if (generated.size() < 3 || reference.size() < 3)
    fail(ErrorCode::TooFewConformations, fmt::format("need at least 3 conformations each, got {} and {}",
                                                     generated.size(), reference.size()));

  EnsembleReport report;
  report.label = std::move(label);

  Ensemble ref = align_ensemble(reference);
  Ensemble gen = align_ensemble(generated);
  const Chain ref_mean = mean_structure(ref);
  const Superposition frame = kabsch_superpose(mean_structure(gen).coords, ref_mean.coords);
  for (auto& member : gen.conformations)
    for (auto& p : member.coords) p = frame.apply(p);

  report.rmsf_generated = rmsf(gen);
  report.rmsf_reference = rmsf(ref);
  attempt(report, "per_target_rmsf_r", [&] { report.per_target_rmsf_r = pearson(report.rmsf_generated, report.rmsf_reference); });
  attempt(report, "mean_pairwise_rmsd_generated",
          [&] { report.mean_pairwise_rmsd_generated = mean_pairwise_rmsd(generated, opts.threads); });
  attempt(report, "mean_pairwise_rmsd_reference",
          [&] { report.mean_pairwise_rmsd_reference = mean_pairwise_rmsd(reference, opts.threads); });

  const Eigen::MatrixXd gen_flat = flatten(gen);
  const Eigen::MatrixXd ref_flat = flatten(ref);
  auto w2_in = [&](const PcaModel& model) {
    const Gaussian a = fit_gaussian(pca_project(model, gen_flat));
    const Gaussian b = fit_gaussian(pca_project(model, ref_flat));
    return w2_gaussian(a.mean, a.cov, b.mean, b.cov);
  };
  attempt(report, "md_pca_w2", [&] { report.md_pca_w2 = w2_in(pca_fit(ref_flat, opts.pca_components)); });
  attempt(report, "joint_pca_w2", [&] {
    Eigen::MatrixXd joint(gen_flat.rows() + ref_flat.rows(), gen_flat.cols());
    joint << gen_flat, ref_flat;
    report.joint_pca_w2 = w2_in(pca_fit(joint, opts.pca_components));
  });
  return report;
}

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

CorpusReport corpus_report(std::span<const EnsembleReport> reports) {
  if (reports.empty()) fail(ErrorCode::InvalidArgument, "corpus report needs at least one target");
  CorpusReport out;
  out.targets = reports.size();

  auto median_of = [&](std::optional<double> EnsembleReport::*field) {
    std::vector<double> values;
    for (const auto& r : reports)
      if (r.*field) values.push_back(*(r.*field));
    return median(std::move(values));
  };
  out.median_per_target_rmsf_r = median_of(&EnsembleReport::per_target_rmsf_r);
  out.median_md_pca_w2 = median_of(&EnsembleReport::md_pca_w2);
  out.median_joint_pca_w2 = median_of(&EnsembleReport::joint_pca_w2);

  auto try_pearson = [](const std::vector<double>& a, const std::vector<double>& b, std::size_t groups) {
    std::optional<double> r;
    if (groups < 2) return r;
    try {
      r = pearson(a, b);
    } catch (const Error&) {
    }
    return r;
  };

  std::vector<double> gen_means;
  std::vector<double> ref_means;
  for (const auto& r : reports) {
    if (r.mean_pairwise_rmsd_generated && r.mean_pairwise_rmsd_reference) {
      gen_means.push_back(*r.mean_pairwise_rmsd_generated);
      ref_means.push_back(*r.mean_pairwise_rmsd_reference);
    }
  }
  out.pairwise_rmsd_r = try_pearson(gen_means, ref_means, gen_means.size());

  std::vector<double> pooled_gen;
  std::vector<double> pooled_ref;
  std::size_t pooled_targets = 0;
  for (const auto& r : reports) {
    if (r.rmsf_generated.empty() || r.rmsf_generated.size() != r.rmsf_reference.size()) continue;
    pooled_gen.insert(pooled_gen.end(), r.rmsf_generated.begin(), r.rmsf_generated.end());
    pooled_ref.insert(pooled_ref.end(), r.rmsf_reference.begin(), r.rmsf_reference.end());
    ++pooled_targets;
  }
  out.global_rmsf_r = try_pearson(pooled_gen, pooled_ref, pooled_targets);
  return out;
}

const std::map<std::string, std::string>& report_metadata() {
  static const std::map<std::string, std::string> meta = {
      {"alignment", fmt::format("iterative_mean(max_iters={},tolerance_A={})", kAlignMaxIters, kAlignTolerance)},
      {"pairwise_rmsd_aggregate", "mean"},
      {"pca_components", std::to_string(kDefaultPcaComponents)},
      {"w2_estimator", "gaussian_closed_form"},
  };
  return meta;
}

}  // namespace vqsyn
