#include "optdict/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "optdict/error.hpp"
#include "optdict/majorization.hpp"

namespace optdict {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

bool all_finite(const MatrixXd& m) { return m.allFinite(); }

// Pseudo-inverse of a symmetric PSD matrix, with the projector onto its range.
struct PsdPinv {
  MatrixXd pinv;
  MatrixXd projector;
};

PsdPinv psd_pinv(const MatrixXd& G) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(G);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Index n = G.rows();
  const double top = std::max(0.0, eig.eigenvalues()(n - 1));
  const double cut = 1e-12 * std::max(top, std::numeric_limits<double>::min());
  PsdPinv out{MatrixXd::Zero(n, n), MatrixXd::Zero(n, n)};
  for (Index i = 0; i < n; ++i) {
    const double s = eig.eigenvalues()(i);
    if (s > cut) {
      const auto u = eig.eigenvectors().col(i);
      out.pinv.noalias() += (1.0 / s) * u * u.transpose();
      out.projector.noalias() += u * u.transpose();
    }
  }
  return out;
}

}  // namespace

MomentEstimate::MomentEstimate(VectorXd mean, MatrixXd covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  const Index n = mean_.size();
  if (n == 0) throw InvalidInput("moments: dimension must be positive");
  if (covariance_.rows() != n || covariance_.cols() != n) {
    throw InvalidInput("moments: covariance must be " + std::to_string(n) + "x" +
                       std::to_string(n) + " to match the mean");
  }
  if (!mean_.allFinite() || !all_finite(covariance_)) {
    throw InvalidInput("moments: entries must be finite");
  }
  const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidInput("moments: covariance is not symmetric");
  }
  covariance_ = 0.5 * (covariance_ + covariance_.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(covariance_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues()(0) < -1e-10 * scale) {
    throw InvalidInput("moments: covariance is not positive semidefinite (smallest eigenvalue " +
                       fmt(eig.eigenvalues()(0)) + ")");
  }
}

SpectralData spectral_decompose(const MomentEstimate& moments, double drop_tol) {
  if (!(drop_tol >= 0.0)) throw InvalidInput("spectral_decompose: drop_tol must be >= 0");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(moments.covariance());
  if (eig.info() != Eigen::Success) {
    throw NumericalError("spectral_decompose: eigendecomposition failed");
  }
  const Index n = moments.dimension();
  const double top = eig.eigenvalues()(n - 1);
  if (!(top > 0.0)) {
    throw InvalidInput("spectral_decompose: covariance is zero, nothing to represent");
  }
  std::vector<Index> kept;
  for (Index i = n - 1; i >= 0; --i) {
    if (eig.eigenvalues()(i) > drop_tol * top) kept.push_back(i);
  }
  SpectralData out;
  out.drop_tol = drop_tol;
  out.eigenvalues.resize(static_cast<Index>(kept.size()));
  out.eigenvectors.resize(n, static_cast<Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    const auto jj = static_cast<Index>(j);
    out.eigenvalues(jj) = eig.eigenvalues()(kept[j]);
    VectorXd u = eig.eigenvectors().col(kept[j]);
    Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0.0) u = -u;
    out.eigenvectors.col(jj) = u;
  }
  return out;
}

Dictionary::Dictionary(VectorXd center, MatrixXd vectors, LengthProfile profile,
                       OptimalSpectrum spectrum, double cost)
    : center_(std::move(center)),
      vectors_(std::move(vectors)),
      profile_(std::move(profile)),
      spectrum_(std::move(spectrum)),
      cost_(cost) {
  const Index n = center_.size();
  const auto K = static_cast<Index>(profile_.size());
  if (n == 0) throw InvalidInput("dictionary: center must be non-empty");
  if (vectors_.rows() != n || vectors_.cols() != K) {
    throw InvalidInput("dictionary: expected " + std::to_string(K) + " vectors of dimension " +
                       std::to_string(n));
  }
  if (!center_.allFinite() || !vectors_.allFinite()) {
    throw InvalidInput("dictionary: entries must be finite");
  }
  for (Index i = 0; i < K; ++i) {
    const double len = vectors_.col(i).squaredNorm();
    const double c = profile_[static_cast<std::size_t>(i)];
    if (std::abs(len - c) > 1e-9 * std::max(1.0, c)) {
      throw InvalidInput("dictionary invariant violated: squared length of vector " +
                         std::to_string(i + 1) + " is " + fmt(len) + " but lengths[" +
                         std::to_string(i + 1) + "] = " + fmt(c));
    }
  }
  const auto& lambda = spectrum_.lambda;
  if (lambda.empty() || static_cast<Index>(lambda.size()) > n) {
    throw InvalidInput("dictionary invariant violated: spectrum must have between 1 and n entries");
  }
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] > 0.0) || !std::isfinite(lambda[i]) ||
        (i > 0 && lambda[i] > lambda[i - 1] * (1.0 + 1e-12))) {
      throw InvalidInput("dictionary invariant violated: spectrum must be positive and "
                         "non-increasing");
    }
  }
  if (!std::isfinite(cost_) || cost_ < 0.0) {
    throw InvalidInput("dictionary invariant violated: cost must be finite and nonnegative");
  }

  frame_operator_ = vectors_ * vectors_.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(frame_operator_, Eigen::EigenvaluesOnly);
  const double top = std::max(1.0, lambda.front());
  for (Index i = 0; i < n; ++i) {
    const double have = eig.eigenvalues()(n - 1 - i);
    const double want = i < static_cast<Index>(lambda.size()) ? lambda[static_cast<std::size_t>(i)] : 0.0;
    if (std::abs(have - want) > 1e-8 * top) {
      throw InvalidInput("dictionary invariant violated: frame operator eigenvalue " +
                         std::to_string(i + 1) + " is " + fmt(have) + " but spectrum gives " +
                         fmt(want));
    }
  }

  Eigen::JacobiSVD<MatrixXd> svd(vectors_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cut = 1e-12 * (sv.size() > 0 ? sv(0) : 0.0);
  VectorXd inv = VectorXd::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) inv(i) = 1.0 / sv(i);
  }
  pinv_ = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

OptimalDesign design_optimal_dictionary(const MomentEstimate& moments,
                                        const LengthProfile& profile,
                                        const DictionaryOptions& options) {
  SpectralData spectral = spectral_decompose(moments, options.drop_tol);
  const std::size_t m = spectral.rank();
  const std::size_t K = profile.size();
  if (K < m) {
    throw Infeasible("K=" + std::to_string(K) + " < effective rank m=" + std::to_string(m));
  }

  RealSequence collapsed = collapse_lengths(profile, m);
  std::vector<double> sigma(spectral.eigenvalues.data(), spectral.eigenvalues.data() + m);
  std::vector<double> root_sigma(m);
  std::transform(sigma.begin(), sigma.end(), root_sigma.begin(),
                 [](double s) { return std::sqrt(s); });

  const ChainQpProblem problem(collapsed.vector(), sigma);
  ChainQpSolution dual = solve_chain_qp(problem);
  BlockPartition partition = extract_partition(dual, options.partition_tol);
  const RealSequence roots(root_sigma);
  const RealSequence lambda = lambda_map(roots, collapsed, partition);
  const double j_cost = j_value(roots, collapsed, partition);

  VectorXd lambda_vec = Eigen::Map<const VectorXd>(lambda.vector().data(), static_cast<Index>(m));
  Rank1Decomposition decomposition = rank_one_decompose_spectral(
      lambda_vec, spectral.eigenvectors, profile, options.rank_one);

  Dictionary dict(moments.mean(), std::move(decomposition.vectors), profile,
                  OptimalSpectrum{lambda.vector()}, j_cost);
  return OptimalDesign{std::move(dict), std::move(spectral), std::move(collapsed),
                       std::move(dual), std::move(partition), j_cost};
}

Dictionary build_optimal_dictionary(const MomentEstimate& moments, const LengthProfile& profile,
                                    const DictionaryOptions& options) {
  return design_optimal_dictionary(moments, profile, options).dictionary;
}

Encoding encode(const Dictionary& dict, const VectorXd& v, double tol) {
  if (v.size() != dict.dimension()) {
    throw InvalidInput("encode: vector has dimension " + std::to_string(v.size()) +
                       ", dictionary has " + std::to_string(dict.dimension()));
  }
  const VectorXd centered = v - dict.center();
  Encoding out;
  out.coefficients = dict.pseudo_inverse() * centered;
  out.residual = (dict.vectors() * out.coefficients - centered).norm();
  out.representable = out.residual <= tol * std::max(1.0, centered.norm());
  return out;
}

VectorXd reconstruct(const Dictionary& dict, const VectorXd& r) {
  if (r.size() != dict.size()) {
    throw InvalidInput("reconstruct: expected " + std::to_string(dict.size()) +
                       " coefficients, got " + std::to_string(r.size()));
  }
  return dict.center() + dict.vectors() * r;
}

double theoretical_cost(const SpectralData& spectral, const OptimalSpectrum& spectrum) {
  if (static_cast<std::size_t>(spectral.eigenvalues.size()) != spectrum.lambda.size()) {
    throw InvalidInput("theoretical_cost: spectrum length mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < spectrum.lambda.size(); ++i) {
    if (!(spectrum.lambda[i] > 0.0)) throw InvalidInput("theoretical_cost: zero lambda");
    total += spectral.eigenvalues(static_cast<Index>(i)) / spectrum.lambda[i];
  }
  return total;
}

double expected_cost(const Dictionary& dict, const MomentEstimate& moments) {
  if (moments.dimension() != dict.dimension()) {
    throw InvalidInput("expected_cost: dimension mismatch");
  }
  const VectorXd offset = moments.mean() - dict.center();
  const MatrixXd second = moments.covariance() + offset * offset.transpose();
  const PsdPinv g = psd_pinv(dict.frame_operator());
  const MatrixXd outside = second - g.projector * second * g.projector;
  if (outside.norm() > 1e-8 * std::max(1.0, second.norm())) {
    throw InvalidInput("expected_cost: distribution is not confined to the dictionary span");
  }
  return (second * g.pinv).trace();
}

}  // namespace optdict
