#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "optdict/sequence.hpp"

namespace optdict {

struct SchurHornOptions {
  /// Exact-hit test: |b_1 - a_1| <= case_tol * max(1, |b_1|).
  double case_tol = 1e-11;
  /// Square-root arguments in [-sqrt_clamp * max(1, |b_1|), 0) are clamped to 0.
  double sqrt_clamp = 1e-12;
  /// A Gram-Schmidt pass runs when orthogonality drift exceeds this.
  double reorth_threshold = 1e-12;
  double majorization_tol = kMajorizationTol;
  /// Check the sweep-state validity triple after every step (throws
  /// NumericalError on violation). Off by default; O(K^3) per step.
  bool validate_steps = false;
};

/// Record of one sweep step, kept for diagnostics and tests.
struct SweepStep {
  std::size_t step = 0;
  bool blended = false;        ///< false: the leading vector already hit a_1
  std::size_t partner = 0;     ///< index i of the blended vector in the working set
  double theta = 0.0;
  double target = 0.0;         ///< a_1(t)
  double achieved = 0.0;       ///< <x_t, A x_t>
  double replacement_form = 0.0;      ///< <v, A v>
  double replacement_expected = 0.0;  ///< b_1 + b_i - a_1
  bool reorthonormalized = false;
};

struct SchurHornResult {
  Eigen::MatrixXd basis;  ///< K x K, column t is x_t
  std::vector<SweepStep> steps;
};

/// Stable reordering so that <v_1, A v_1> >= <v_2, A v_2> >= ...
[[nodiscard]] std::vector<Eigen::VectorXd> a_sort(const Eigen::MatrixXd& A,
                                                  std::vector<Eigen::VectorXd> vectors);

/// Blend weight that moves the unit vector
///   (theta u_1 + (1 - theta) u_i) / sqrt(theta^2 + (1 - theta)^2)
/// onto the quadratic-form value a1, given <u_1,Au_1> = b1 and <u_i,Au_i> = bi.
/// Requires bi <= a1 < b1.
[[nodiscard]] double blend_theta(double a1, double b1, double bi, double clamp = 1e-12);

/// Orthonormal basis (x_i) of R^K with <x_i, A x_i> = targets_i.
///
/// `A` is symmetrized once on entry. `targets` must be non-increasing and
/// majorized by the eigenvalues of (A + A^T)/2; Infeasible otherwise.
[[nodiscard]] SchurHornResult prescribed_diagonal_basis(const Eigen::MatrixXd& A,
                                                        const RealSequence& targets,
                                                        const SchurHornOptions& options = {});

}  // namespace optdict
