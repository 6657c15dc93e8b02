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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vqsyn/ensemble.hpp"

namespace vqsyn {

inline constexpr int kAlignMaxIters = 10;
inline constexpr double kAlignTolerance = 1e-6;
inline constexpr int kDefaultPcaComponents = 2;
// Fluctuations below this (A) are superposition round-off and reported as 0.
inline constexpr double kRmsfFloor = 1e-9;

Chain mean_structure(const Ensemble& e);

/// Superposes every member onto member 0, then repeatedly onto the running
/// mean until the mean moves less than 1e-6 A (RMSD) or 10 rounds pass.
Ensemble align_ensemble(const Ensemble& e);

// Per-residue root-mean-square fluctuation about the ensemble mean; expects an aligned ensemble.
std::vector<double> rmsf(const Ensemble& aligned);

// Sample Pearson correlation. Throws ConstantInput when either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

// Mean over unordered pairs of independently superposed RMSDs.
double mean_pairwise_rmsd(const Ensemble& e, int threads = 1);

// T x 3L matrix of member coordinates, x/y/z interleaved per residue.
Eigen::MatrixXd flatten(const Ensemble& e);

struct PcaModel {
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd components;  // n_components x 3L, orthonormal rows
  Eigen::VectorXd eigenvalues; // sample-covariance eigenvalues, non-increasing
};

PcaModel pca_fit(const Eigen::MatrixXd& samples, int n_components = kDefaultPcaComponents);
PcaModel pca_fit(const Ensemble& aligned, int n_components = kDefaultPcaComponents);

Eigen::MatrixXd pca_project(const PcaModel& model, const Eigen::MatrixXd& samples);

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Sample mean and (T-1)-normalized covariance of the rows.
Gaussian fit_gaussian(const Eigen::MatrixXd& samples);

/// Closed-form 2-Wasserstein distance between two Gaussians,
/// W2^2 = |m1 - m2|^2 + tr(S1 + S2 - 2 (S2^1/2 S1 S2^1/2)^1/2).
/// Throws NonSPDCovariance for asymmetric covariances or eigenvalues below -1e-10.
double w2_gaussian(const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1, const Eigen::VectorXd& mean2,
                   const Eigen::MatrixXd& cov2);

struct EnsembleReport {
  std::string label;
  std::optional<double> per_target_rmsf_r;
  std::optional<double> mean_pairwise_rmsd_generated;
  std::optional<double> mean_pairwise_rmsd_reference;
  std::optional<double> md_pca_w2;
  std::optional<double> joint_pca_w2;
  std::vector<double> rmsf_generated;
  std::vector<double> rmsf_reference;
  std::map<std::string, std::string> errors;  // field name -> reason it is undefined
};

struct EvaluateOptions {
  int pca_components = kDefaultPcaComponents;
  int threads = 1;
};

/// Metric bundle comparing a generated ensemble with a reference one. A metric
/// that cannot be computed is left empty and its reason recorded in `errors`.
EnsembleReport evaluate_ensembles(const Ensemble& generated, const Ensemble& reference,
                                  const EvaluateOptions& opts = {}, std::string label = {});

struct CorpusReport {
  std::size_t targets = 0;
  std::optional<double> median_per_target_rmsf_r;
  std::optional<double> pairwise_rmsd_r;
  std::optional<double> global_rmsf_r;
  std::optional<double> median_md_pca_w2;
  std::optional<double> median_joint_pca_w2;
};

std::optional<double> median(std::vector<double> values);

CorpusReport corpus_report(std::span<const EnsembleReport> reports);

// Estimator choices recorded alongside serialized reports.
const std::map<std::string, std::string>& report_metadata();

}  // namespace vqsyn
