#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "optdict/chain_qp.hpp"
#include "optdict/rank_one.hpp"
#include "optdict/sequence.hpp"

namespace optdict {

/// Mean and population covariance of the random vector being represented.
/// The covariance is validated (square, symmetric within 1e-12 relative, PSD
/// within -1e-10 relative on eigenvalues) and stored symmetrized.
class MomentEstimate {
 public:
  MomentEstimate(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  [[nodiscard]] const Eigen::VectorXd& mean() const noexcept { return mean_; }
  [[nodiscard]] const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  [[nodiscard]] Eigen::Index dimension() const noexcept { return mean_.size(); }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
};

/// Retained eigenpairs of the covariance, eigenvalues descending.
/// Eigenvectors are sign-normalized: the largest-magnitude entry is positive.
struct SpectralData {
  Eigen::VectorXd eigenvalues;   ///< sigma_1 >= ... >= sigma_m > drop_tol * sigma_1
  Eigen::MatrixXd eigenvectors;  ///< n x m, orthonormal columns
  double drop_tol = 1e-9;

  [[nodiscard]] std::size_t rank() const noexcept {
    return static_cast<std::size_t>(eigenvalues.size());
  }
};

[[nodiscard]] SpectralData spectral_decompose(const MomentEstimate& moments,
                                              double drop_tol = 1e-9);

/// K vectors in R^n around a center, with their prescribed squared lengths.
/// Immutable after construction; the constructor re-validates every invariant
/// and throws InvalidInput naming the first one that fails.
class Dictionary {
 public:
  Dictionary(Eigen::VectorXd center, Eigen::MatrixXd vectors, LengthProfile profile,
             OptimalSpectrum spectrum, double cost);

  [[nodiscard]] const Eigen::VectorXd& center() const noexcept { return center_; }
  /// n x K, column i is d_i.
  [[nodiscard]] const Eigen::MatrixXd& vectors() const noexcept { return vectors_; }
  [[nodiscard]] const LengthProfile& profile() const noexcept { return profile_; }
  [[nodiscard]] const OptimalSpectrum& spectrum() const noexcept { return spectrum_; }
  [[nodiscard]] double cost() const noexcept { return cost_; }
  /// sum_i d_i d_i^T
  [[nodiscard]] const Eigen::MatrixXd& frame_operator() const noexcept { return frame_operator_; }
  /// Moore-Penrose pseudo-inverse of vectors(), K x n.
  [[nodiscard]] const Eigen::MatrixXd& pseudo_inverse() const noexcept { return pinv_; }
  [[nodiscard]] Eigen::Index dimension() const noexcept { return vectors_.rows(); }
  [[nodiscard]] Eigen::Index size() const noexcept { return vectors_.cols(); }

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd vectors_;
  LengthProfile profile_;
  OptimalSpectrum spectrum_;
  double cost_;
  Eigen::MatrixXd frame_operator_;
  Eigen::MatrixXd pinv_;
};

struct DictionaryOptions {
  /// Covariance eigenvalues <= drop_tol * sigma_1 are treated as zero.
  double drop_tol = 1e-9;
  /// Partition tolerance; defaults to 1e-10 * max(x*).
  std::optional<double> partition_tol;
  Rank1Options rank_one{};
};

/// Everything the pipeline computes on the way to the dictionary.
struct OptimalDesign {
  Dictionary dictionary;
  SpectralData spectral;
  RealSequence collapsed_lengths;  ///< c'
  ChainQpSolution dual;            ///< x*, q*
  BlockPartition partition;
  double j_cost;                   ///< J(sqrt(sigma), c', partition) = p*
};

/// Optimal design for the given moments and length profile: center at the
/// mean, frame operator sum_i lambda*_i u_i u_i^T, vectors by rank-1
/// decomposition. Throws Infeasible when K is below the effective rank and
/// InvalidInput for a zero covariance.
[[nodiscard]] OptimalDesign design_optimal_dictionary(const MomentEstimate& moments,
                                                      const LengthProfile& profile,
                                                      const DictionaryOptions& options = {});

[[nodiscard]] Dictionary build_optimal_dictionary(const MomentEstimate& moments,
                                                  const LengthProfile& profile,
                                                  const DictionaryOptions& options = {});

struct Encoding {
  Eigen::VectorXd coefficients;
  double residual = 0.0;     ///< ||D r - (v - c)||
  bool representable = true; ///< residual <= tol * max(1, ||v - c||)
};

/// Minimum-norm coefficients r = D^+ (v - c). Vectors outside the span get
/// the least-squares coefficients and representable = false.
[[nodiscard]] Encoding encode(const Dictionary& dict, const Eigen::VectorXd& v,
                              double tol = 1e-9);

/// c + sum_i r_i d_i
[[nodiscard]] Eigen::VectorXd reconstruct(const Dictionary& dict, const Eigen::VectorXd& r);

/// sum_i sigma_i / lambda_i
[[nodiscard]] double theoretical_cost(const SpectralData& spectral,
                                      const OptimalSpectrum& spectrum);

/// E ||D^+ (V - c)||^2 = trace((Sigma + (mu - c)(mu - c)^T) (D D^T)^+).
/// Throws InvalidInput when the centered distribution leaves the span.
[[nodiscard]] double expected_cost(const Dictionary& dict, const MomentEstimate& moments);

}  // namespace optdict
