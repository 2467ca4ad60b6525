#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "optdict/sequence.hpp"

namespace optdict {

/// min  sum_t a_t x_t^2 - 2 sqrt(s_t) x_t   s.t.  0 <= x_1 <= ... <= x_m
///
/// Weights a_t are the collapsed squared lengths, targets s_t the covariance
/// eigenvalues. Invariants: equal lengths, a_t > 0, s_t >= 0, s non-increasing.
class ChainQpProblem {
 public:
  ChainQpProblem(std::vector<double> weights, std::vector<double> targets);

  [[nodiscard]] std::span<const double> weights() const noexcept { return a_; }
  [[nodiscard]] std::span<const double> targets() const noexcept { return s_; }
  [[nodiscard]] std::size_t size() const noexcept { return a_.size(); }

 private:
  std::vector<double> a_;
  std::vector<double> s_;
};

struct ChainQpSolution {
  std::vector<double> x;  ///< nondecreasing, strictly positive
  double objective = 0.0;
};

/// Non-increasing optimal spectrum lambda*.
struct OptimalSpectrum {
  std::vector<double> lambda;
};

/// Exact minimizer via pool-adjacent-violators on the equivalent weighted
/// isotonic regression of sqrt(s_t)/a_t with weights a_t. O(m).
///
/// Every target must be strictly positive; zero eigenvalues are removed by
/// effective-rank truncation before this point.
[[nodiscard]] ChainQpSolution solve_chain_qp(const ChainQpProblem& problem);

/// 1e-10 * max(x*).
[[nodiscard]] double default_partition_tol(const ChainQpSolution& solution);

/// Starts a new block at t whenever x*_{t-1} < x*_t - tol.
[[nodiscard]] BlockPartition extract_partition(const ChainQpSolution& solution,
                                               std::optional<double> tol = std::nullopt);

/// KKT recovery lambda*_i = sqrt(s_i) / x*_i.
[[nodiscard]] OptimalSpectrum spectrum_from_dual(std::span<const double> targets,
                                                 const ChainQpSolution& solution);

/// sum_t a_t x_t^2 - 2 sqrt(s_t) x_t. Does not check feasibility of x.
[[nodiscard]] double qp_objective(const ChainQpProblem& problem, std::span<const double> x);

}  // namespace optdict
