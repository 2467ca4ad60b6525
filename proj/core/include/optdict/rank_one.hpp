#pragma once

#include <Eigen/Dense>

#include "optdict/schur_horn.hpp"
#include "optdict/sequence.hpp"

namespace optdict {

struct Rank1Options {
  /// Eigenvalues below rank_tol * lambda_max count as zero.
  double rank_tol = 1e-9;
  double majorization_tol = kMajorizationTol;
  SchurHornOptions schur_horn{};
};

/// M = sum_i y_i y_i^T with <y_i, y_i> = c_i.
struct Rank1Decomposition {
  Eigen::MatrixXd vectors;  ///< n x K, column i is y_i

  [[nodiscard]] Eigen::Index source_dim() const noexcept { return vectors.rows(); }
  [[nodiscard]] Eigen::Index count() const noexcept { return vectors.cols(); }
};

/// Whether a decomposition with squared norms `profile` exists for a PSD
/// matrix with nonzero spectrum `eigs` (non-increasing, length r <= K):
/// equal totals and sum_{i<=j} c_i <= sum_{i<=j} lambda_i for j < r.
[[nodiscard]] bool feasible_lengths(const RealSequence& eigs, const LengthProfile& profile,
                                    double tol = kMajorizationTol);

/// Eigendecomposes `M`, then runs the prescribed-diagonal sweep on
/// diag(lambda_1..lambda_r, 0..0) and maps the basis through
/// C = (sqrt(lambda_1) u_1 ... sqrt(lambda_r) u_r 0 ... 0).
[[nodiscard]] Rank1Decomposition rank_one_decompose(const Eigen::MatrixXd& M,
                                                    const LengthProfile& profile,
                                                    const Rank1Options& options = {});

/// Same, for a matrix already given by its nonzero spectrum: `eigenvalues`
/// (non-increasing, positive) with orthonormal `eigenvectors` as columns.
[[nodiscard]] Rank1Decomposition rank_one_decompose_spectral(const Eigen::VectorXd& eigenvalues,
                                                             const Eigen::MatrixXd& eigenvectors,
                                                             const LengthProfile& profile,
                                                             const Rank1Options& options = {});

}  // namespace optdict
