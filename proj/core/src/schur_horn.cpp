#include "optdict/schur_horn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>

#include "optdict/error.hpp"
#include "optdict/majorization.hpp"

namespace optdict {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double form(const MatrixXd& S, const VectorXd& v) { return v.dot(S * v); }

double clamped_sqrt(double arg, double window, const char* what) {
  if (arg >= 0.0) return std::sqrt(arg);
  if (arg >= -window) return 0.0;
  throw NumericalError(std::string("Schur-Horn sweep: negative argument under square root (") +
                       what + " = " + std::to_string(arg) + ")");
}

double orthogonality_drift(const std::vector<VectorXd>& work, const MatrixXd& basis,
                           std::size_t emitted) {
  double drift = 0.0;
  for (std::size_t p = 0; p < work.size(); ++p) {
    drift = std::max(drift, std::abs(work[p].squaredNorm() - 1.0));
    for (std::size_t q = p + 1; q < work.size(); ++q) {
      drift = std::max(drift, std::abs(work[p].dot(work[q])));
    }
    for (std::size_t j = 0; j < emitted; ++j) {
      drift = std::max(drift, std::abs(work[p].dot(basis.col(static_cast<Eigen::Index>(j)))));
    }
  }
  return drift;
}

void gram_schmidt(std::vector<VectorXd>& work, const MatrixXd& basis, std::size_t emitted) {
  for (std::size_t p = 0; p < work.size(); ++p) {
    VectorXd& w = work[p];
    for (std::size_t j = 0; j < emitted; ++j) {
      const auto col = basis.col(static_cast<Eigen::Index>(j));
      w -= col.dot(w) * col;
    }
    for (std::size_t q = 0; q < p; ++q) w -= work[q].dot(w) * work[q];
    const double norm = w.norm();
    if (!(norm > 0.5)) {
      throw NumericalError("Schur-Horn sweep: re-orthonormalization failed (collapsed vector)");
    }
    w /= norm;
  }
}

// Properties (1)-(3) that every intermediate working set must satisfy.
void validate_state(const MatrixXd& S, const std::vector<VectorXd>& work,
                    std::span<const double> remaining, std::size_t step) {
  constexpr double kOrthTol = 1e-10;
  constexpr double kFormTol = 1e-8;
  const std::string where = " after step " + std::to_string(step + 1);
  std::vector<double> b(work.size());
  for (std::size_t p = 0; p < work.size(); ++p) {
    b[p] = form(S, work[p]);
    if (std::abs(work[p].squaredNorm() - 1.0) > kOrthTol) {
      throw NumericalError("Schur-Horn sweep: working vector not unit" + where);
    }
    if (p > 0 && b[p] > b[p - 1] + kFormTol) {
      throw NumericalError("Schur-Horn sweep: working set not A-sorted" + where);
    }
    for (std::size_t q = p + 1; q < work.size(); ++q) {
      if (std::abs(work[p].dot(work[q])) > kOrthTol) {
        throw NumericalError("Schur-Horn sweep: working vectors not orthogonal" + where);
      }
      if (std::abs(2.0 * work[p].dot(S * work[q])) > kFormTol) {
        throw NumericalError("Schur-Horn sweep: cross term <u_p,(A+A^T)u_q> nonzero" + where);
      }
    }
  }
  if (!work.empty()) {
    const double scale = std::max(1.0, std::abs(b.front()));
    if (!check_majorization(RealSequence(std::vector<double>(remaining.begin(), remaining.end())),
                            RealSequence(b), kFormTol * scale)) {
      throw NumericalError("Schur-Horn sweep: remaining targets no longer majorized" + where);
    }
  }
}

}  // namespace

std::vector<VectorXd> a_sort(const MatrixXd& A, std::vector<VectorXd> vectors) {
  if (A.rows() != A.cols()) throw InvalidInput("a_sort: operator must be square");
  std::vector<double> keys(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != A.rows()) throw InvalidInput("a_sort: dimension mismatch");
    keys[i] = form(A, vectors[i]);
  }
  std::vector<std::size_t> order(vectors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return keys[l] > keys[r]; });
  std::vector<VectorXd> out;
  out.reserve(vectors.size());
  for (std::size_t i : order) out.push_back(std::move(vectors[i]));
  return out;
}

double blend_theta(double a1, double b1, double bi, double clamp) {
  const double window = clamp * std::max(1.0, std::abs(b1));
  if (a1 - bi < -window || !(a1 < b1)) {
    throw InvalidInput("blend_theta: requires bi <= a1 < b1");
  }
  const double lower = clamped_sqrt(a1 - bi, window, "a1 - bi");
  const double upper = clamped_sqrt(b1 - a1, window, "b1 - a1");
  if (lower + upper == 0.0) throw InvalidInput("blend_theta: degenerate case a1 = b1 = bi");
  return lower / (lower + upper);
}

SchurHornResult prescribed_diagonal_basis(const MatrixXd& A, const RealSequence& targets,
                                          const SchurHornOptions& options) {
  if (A.rows() != A.cols()) throw InvalidInput("prescribed_diagonal_basis: A must be square");
  const auto K = static_cast<std::size_t>(A.rows());
  if (targets.size() != K) {
    throw InvalidInput("prescribed_diagonal_basis: expected " + std::to_string(K) +
                       " targets, got " + std::to_string(targets.size()));
  }
  if (!targets.is_non_increasing()) {
    throw InvalidInput("prescribed_diagonal_basis: targets must be non-increasing");
  }

  const MatrixXd S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(S);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("prescribed_diagonal_basis: eigendecomposition failed");
  }
  std::vector<double> spectrum(eig.eigenvalues().data(), eig.eigenvalues().data() + K);
  std::reverse(spectrum.begin(), spectrum.end());
  if (!check_majorization(targets, RealSequence(spectrum), options.majorization_tol)) {
    throw Infeasible(
        "prescribed_diagonal_basis: targets are not majorized by the eigenvalues of the "
        "symmetrized operator");
  }

  std::vector<VectorXd> work;
  work.reserve(K);
  for (std::size_t i = 0; i < K; ++i) work.emplace_back(eig.eigenvectors().col(static_cast<Eigen::Index>(i)));
  work = a_sort(S, std::move(work));

  SchurHornResult result;
  result.basis = MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
  result.steps.reserve(K);

  for (std::size_t t = 0; t < K; ++t) {
    const double a1 = targets[t];
    const std::size_t k = work.size();
    std::vector<double> b(k);
    for (std::size_t p = 0; p < k; ++p) b[p] = form(S, work[p]);
    const double scale = std::max(1.0, std::abs(b[0]));

    SweepStep rec;
    rec.step = t;
    rec.target = a1;
    VectorXd x;

    const double excess = b[0] - a1;
    if (std::abs(excess) > options.majorization_tol * 10.0 * scale && (excess < 0.0 || k == 1)) {
      throw NumericalError("Schur-Horn sweep: leading form drifted from its target at step " +
                           std::to_string(t + 1));
    }

    // The last vector, or a leading form that already equals a_1. With a
    // single vector left the excess is the accumulated total mismatch, which
    // the entry majorization check bounds by majorization_tol.
    if (excess <= options.case_tol * scale || k == 1) {
      x = work.front();
      work.erase(work.begin());
      work = a_sort(S, std::move(work));
    } else {
      std::size_t i = 1;
      while (i < k && b[i] > a1) ++i;
      if (i == k) i = k - 1;  // every b_p > a_1 only by rounding; clamp covers it
      const double theta = [&] {
        const double window = options.sqrt_clamp * scale;
        const double lower = clamped_sqrt(a1 - b[i], window, "a1 - bi");
        const double upper = clamped_sqrt(b[0] - a1, window, "b1 - a1");
        return lower / (lower + upper);
      }();
      const double norm = std::sqrt(theta * theta + (1.0 - theta) * (1.0 - theta));
      x = (theta * work[0] + (1.0 - theta) * work[i]) / norm;
      VectorXd v = ((1.0 - theta) * work[0] - theta * work[i]) / norm;

      rec.blended = true;
      rec.partner = i;
      rec.theta = theta;
      rec.replacement_expected = b[0] + b[i] - a1;
      rec.replacement_form = form(S, v);

      std::vector<VectorXd> next;
      next.reserve(k - 1);
      for (std::size_t p = 1; p < k; ++p) {
        if (p != i) next.push_back(std::move(work[p]));
      }
      next.push_back(std::move(v));
      work = a_sort(S, std::move(next));
    }

    result.basis.col(static_cast<Eigen::Index>(t)) = x;
    rec.achieved = form(S, x);

    if (!work.empty() &&
        orthogonality_drift(work, result.basis, t + 1) > options.reorth_threshold) {
      gram_schmidt(work, result.basis, t + 1);
      work = a_sort(S, std::move(work));
      rec.reorthonormalized = true;
    }
    if (options.validate_steps) {
      validate_state(S, work, targets.values().subspan(t + 1), t);
    }
    result.steps.push_back(rec);
  }
  return result;
}

}  // namespace optdict
