#include "optdict/rank_one.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "optdict/error.hpp"

namespace optdict {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

bool feasible_lengths(const RealSequence& eigs, const LengthProfile& profile, double tol) {
  const std::size_t r = eigs.size();
  if (r > profile.size()) return false;
  double prefix_c = 0.0;
  double prefix_l = 0.0;
  for (std::size_t j = 0; j + 1 < r; ++j) {
    prefix_c += profile[j];
    prefix_l += eigs[j];
    if (prefix_c > prefix_l + tol) return false;
  }
  return std::abs(profile.sum() - eigs.sum()) <= tol;
}

Rank1Decomposition rank_one_decompose(const MatrixXd& M, const LengthProfile& profile,
                                      const Rank1Options& options) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw InvalidInput("rank_one_decompose: matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidInput("rank_one_decompose: matrix is not symmetric");
  }
  const MatrixXd S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(S);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("rank_one_decompose: eigendecomposition failed");
  }
  const Index n = S.rows();
  const double lambda_max = eig.eigenvalues()(n - 1);
  if (eig.eigenvalues()(0) < -1e-10 * std::max(1.0, std::abs(lambda_max))) {
    throw InvalidInput("rank_one_decompose: matrix is not positive semidefinite");
  }
  std::vector<Index> kept;
  for (Index i = n - 1; i >= 0; --i) {
    if (lambda_max > 0.0 && eig.eigenvalues()(i) > options.rank_tol * lambda_max) kept.push_back(i);
  }
  if (kept.empty()) {
    throw Infeasible("rank_one_decompose: zero matrix admits no decomposition with positive lengths");
  }
  VectorXd values(static_cast<Index>(kept.size()));
  MatrixXd vectors(n, static_cast<Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    values(static_cast<Index>(j)) = eig.eigenvalues()(kept[j]);
    vectors.col(static_cast<Index>(j)) = eig.eigenvectors().col(kept[j]);
  }
  return rank_one_decompose_spectral(values, vectors, profile, options);
}

Rank1Decomposition rank_one_decompose_spectral(const VectorXd& eigenvalues,
                                               const MatrixXd& eigenvectors,
                                               const LengthProfile& profile,
                                               const Rank1Options& options) {
  const Index r = eigenvalues.size();
  if (r == 0 || eigenvectors.cols() != r) {
    throw InvalidInput("rank_one_decompose: spectrum and eigenvectors disagree in count");
  }
  const auto K = static_cast<Index>(profile.size());
  if (K < r) {
    throw Infeasible("rank_one_decompose: K=" + std::to_string(K) + " < rank r=" +
                     std::to_string(r));
  }
  const RealSequence spectrum(std::vector<double>(eigenvalues.data(), eigenvalues.data() + r));
  if (!spectrum.all_positive() || !spectrum.is_non_increasing()) {
    throw InvalidInput("rank_one_decompose: spectrum must be positive and non-increasing");
  }
  // Totals here are sums of floating-point eigenvalues; an absolute tolerance
  // would reject large profiles on rounding alone.
  const double maj_tol = options.majorization_tol * std::max(1.0, profile.sum());
  if (!feasible_lengths(spectrum, profile, maj_tol)) {
    throw Infeasible(
        "rank_one_decompose: length profile is not majorized by the spectrum padded with zeros");
  }

  MatrixXd Lambda = MatrixXd::Zero(K, K);
  Lambda.diagonal().head(r) = eigenvalues;
  MatrixXd C = MatrixXd::Zero(eigenvectors.rows(), K);
  for (Index i = 0; i < r; ++i) C.col(i) = std::sqrt(eigenvalues(i)) * eigenvectors.col(i);

  SchurHornOptions sh = options.schur_horn;
  sh.majorization_tol = maj_tol;
  const SchurHornResult basis = prescribed_diagonal_basis(Lambda, profile.as_sequence(), sh);
  return Rank1Decomposition{C * basis.basis};
}

}  // namespace optdict
