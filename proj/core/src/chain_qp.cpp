#include "optdict/chain_qp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "optdict/error.hpp"

namespace optdict {

ChainQpProblem::ChainQpProblem(std::vector<double> weights, std::vector<double> targets)
    : a_(std::move(weights)), s_(std::move(targets)) {
  if (a_.empty()) throw InvalidInput("chain QP: empty problem");
  if (a_.size() != s_.size()) {
    throw InvalidInput("chain QP: weights and targets differ in length");
  }
  for (std::size_t t = 0; t < a_.size(); ++t) {
    if (!std::isfinite(a_[t]) || a_[t] <= 0.0) {
      throw InvalidInput("chain QP: weight a_" + std::to_string(t + 1) + " must be positive");
    }
    if (!std::isfinite(s_[t]) || s_[t] < 0.0) {
      throw InvalidInput("chain QP: target s_" + std::to_string(t + 1) +
                         " must be nonnegative");
    }
    if (t > 0 && s_[t] > s_[t - 1]) {
      throw InvalidInput("chain QP: targets must be non-increasing");
    }
  }
}

ChainQpSolution solve_chain_qp(const ChainQpProblem& problem) {
  const auto a = problem.weights();
  const auto s = problem.targets();
  const std::size_t m = problem.size();
  for (std::size_t t = 0; t < m; ++t) {
    if (!(s[t] > 0.0)) {
      throw InvalidInput("chain QP: target s_" + std::to_string(t + 1) +
                         " must be strictly positive");
    }
  }

  // Objective = sum a_t (x_t - y_t)^2 + const with y_t = sqrt(s_t)/a_t, so a
  // block's value is (sum sqrt(s)) / (sum a) over the block.
  struct Block {
    double weight;
    double root_sum;
    std::size_t end;
    [[nodiscard]] double value() const { return root_sum / weight; }
  };
  std::vector<Block> stack;
  stack.reserve(m);
  for (std::size_t t = 0; t < m; ++t) {
    stack.push_back({a[t], std::sqrt(s[t]), t + 1});
    while (stack.size() >= 2 && stack[stack.size() - 2].value() >= stack.back().value()) {
      Block top = stack.back();
      stack.pop_back();
      stack.back().weight += top.weight;
      stack.back().root_sum += top.root_sum;
      stack.back().end = top.end;
    }
  }

  ChainQpSolution sol;
  sol.x.resize(m);
  std::size_t begin = 0;
  for (const Block& b : stack) {
    const double v = b.value();
    std::fill(sol.x.begin() + static_cast<std::ptrdiff_t>(begin),
              sol.x.begin() + static_cast<std::ptrdiff_t>(b.end), v);
    begin = b.end;
  }
  // x_1 >= 0 never binds: pooled means of positive targets are positive.
  assert(sol.x.front() > 0.0);
  sol.objective = qp_objective(problem, sol.x);
  return sol;
}

double default_partition_tol(const ChainQpSolution& solution) {
  if (solution.x.empty()) return 0.0;
  return 1e-10 * *std::max_element(solution.x.begin(), solution.x.end());
}

BlockPartition extract_partition(const ChainQpSolution& solution, std::optional<double> tol) {
  if (solution.x.empty()) throw InvalidInput("extract_partition: empty solution");
  const double eps = tol.value_or(default_partition_tol(solution));
  std::vector<std::size_t> starts{0};
  for (std::size_t t = 1; t < solution.x.size(); ++t) {
    if (solution.x[t - 1] < solution.x[t] - eps) starts.push_back(t);
  }
  return BlockPartition(std::move(starts), solution.x.size());
}

OptimalSpectrum spectrum_from_dual(std::span<const double> targets,
                                   const ChainQpSolution& solution) {
  if (targets.size() != solution.x.size()) {
    throw InvalidInput("spectrum_from_dual: length mismatch");
  }
  OptimalSpectrum out;
  out.lambda.resize(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!(solution.x[i] > 0.0)) {
      throw InvalidInput("spectrum_from_dual: dual variable x_" + std::to_string(i + 1) +
                         " is not positive");
    }
    out.lambda[i] = std::sqrt(targets[i]) / solution.x[i];
  }
  return out;
}

double qp_objective(const ChainQpProblem& problem, std::span<const double> x) {
  if (x.size() != problem.size()) throw InvalidInput("qp_objective: length mismatch");
  const auto a = problem.weights();
  const auto s = problem.targets();
  double total = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    total += a[t] * x[t] * x[t] - 2.0 * std::sqrt(s[t]) * x[t];
  }
  return total;
}

}  // namespace optdict
