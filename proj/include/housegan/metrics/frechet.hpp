#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "housegan/core/error.hpp"

namespace housegan {

/// Mean and covariance of a feature population.
struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int dim() const { return static_cast<int>(mean.size()); }
};

/// Sample statistics with the unbiased (n - 1) covariance; a single sample
/// has zero covariance.
inline GaussianStats gaussian_stats(const std::vector<std::vector<double>>& features) {
  if (features.empty()) throw ValidationError("cannot summarize an empty feature set");
  const auto d = static_cast<Eigen::Index>(features.front().size());
  const auto n = static_cast<Eigen::Index>(features.size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(features[static_cast<std::size_t>(i)].size()) != d) {
      throw ValidationError("feature vectors differ in length");
    }
    x.row(i) = Eigen::Map<const Eigen::RowVectorXd>(features[static_cast<std::size_t>(i)].data(), d);
  }
  GaussianStats s;
  s.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - s.mean.transpose();
  s.cov = n > 1 ? Eigen::MatrixXd((centered.transpose() * centered) / static_cast<double>(n - 1))
                : Eigen::MatrixXd::Zero(d, d);
  return s;
}

/// Square root of a symmetric positive semi-definite matrix; negative
/// eigenvalues from round-off are clamped to zero.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

/// ||mu1 - mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^(1/2)).
///
/// Tr((S1 S2)^(1/2)) is evaluated as the trace of the square root of the
/// symmetric matrix S1^(1/2) S2 S1^(1/2), which has the same eigenvalues as
/// S1 S2.
inline double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
  if (a.dim() != b.dim() || a.cov.rows() != a.dim() || b.cov.rows() != b.dim()) {
    throw ValidationError("Frechet distance needs statistics of equal dimension");
  }
  const Eigen::MatrixXd s1 = psd_sqrt(a.cov);
  const Eigen::MatrixXd inner = s1 * b.cov * s1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (inner + inner.transpose()), Eigen::EigenvaluesOnly);
  const double tr_sqrt = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double mean_term = (a.mean - b.mean).squaredNorm();
  const double value = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * tr_sqrt;
  return std::max(0.0, value);
}

}  // namespace housegan
