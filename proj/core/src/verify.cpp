#include "optdict/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "optdict/error.hpp"

namespace optdict {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double chunk_sum(const MatrixXd& pinv, const VectorXd& center, const MatrixXd& rows, Index begin,
                 Index end, std::vector<double>& costs) {
  double total = 0.0;
  for (Index j = begin; j < end; ++j) {
    const VectorXd r = pinv * (rows.row(j).transpose() - center);
    const double c = r.squaredNorm();
    costs[static_cast<std::size_t>(j)] = c;
    total += c;
  }
  return total;
}

}  // namespace

MonteCarloEstimate monte_carlo_cost(const Dictionary& dict, const SampleSet& samples,
                                    const MonteCarloOptions& options) {
  if (samples.dimension() != dict.dimension()) {
    throw InvalidInput("monte_carlo_cost: samples have dimension " +
                       std::to_string(samples.dimension()) + ", dictionary has " +
                       std::to_string(dict.dimension()));
  }
  const Index N = samples.size();
  const MatrixXd& rows = samples.rows();
  std::vector<double> costs(static_cast<std::size_t>(N));

  const auto threads = static_cast<Index>(std::clamp<unsigned>(options.threads, 1u, 64u));
  const Index chunks = std::min(threads, N);
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
  if (chunks == 1) {
    partial[0] = chunk_sum(dict.pseudo_inverse(), dict.center(), rows, 0, N, costs);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(chunks));
    for (Index k = 0; k < chunks; ++k) {
      const Index begin = N * k / chunks;
      const Index end = N * (k + 1) / chunks;
      pool.emplace_back([&, k, begin, end] {
        partial[static_cast<std::size_t>(k)] =
            chunk_sum(dict.pseudo_inverse(), dict.center(), rows, begin, end, costs);
      });
    }
    for (auto& t : pool) t.join();
  }

  double total = 0.0;
  for (double p : partial) total += p;
  MonteCarloEstimate out;
  out.samples = N;
  out.mean = total / static_cast<double>(N);
  if (N > 1) {
    double ss = 0.0;
    for (double c : costs) ss += (c - out.mean) * (c - out.mean);
    out.std_dev = std::sqrt(ss / static_cast<double>(N - 1));
  }
  out.standard_error = out.std_dev / std::sqrt(static_cast<double>(N));
  return out;
}

double tight_frame_residual(const Dictionary& dict) {
  const Index n = dict.dimension();
  const double level = dict.profile().sum() / static_cast<double>(n);
  const MatrixXd diff = dict.frame_operator() - level * MatrixXd::Identity(n, n);
  return diff.norm() / std::sqrt(static_cast<double>(n));
}

GridOracleResult qp_grid_oracle(const ChainQpProblem& problem, std::size_t steps_per_axis,
                                std::size_t refine_levels) {
  const std::size_t m = problem.size();
  if (m > 4) {
    throw InvalidInput("qp_grid_oracle: m=" + std::to_string(m) + " exceeds the limit of 4");
  }
  if (steps_per_axis == 0) throw InvalidInput("qp_grid_oracle: steps_per_axis must be positive");

  const auto a = problem.weights();
  const auto s = problem.targets();
  double upper = 0.0;
  for (std::size_t t = 0; t < m; ++t) upper = std::max(upper, std::sqrt(s[t]) / a[t]);
  upper = upper > 0.0 ? 2.0 * upper : 1.0;
  const double h0 = upper / static_cast<double>(steps_per_axis);

  GridOracleResult best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<double> x(m);

  // Level 0: nondecreasing index sequences 0 <= k_1 <= ... <= k_m <= steps.
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t t, std::size_t lo) {
    if (t == m) {
      const double f = qp_objective(problem, x);
      if (f < best.objective) {
        best.objective = f;
        best.x = x;
      }
      return;
    }
    for (std::size_t k = lo; k <= steps_per_axis; ++k) {
      x[t] = h0 * static_cast<double>(k);
      walk(t + 1, k);
    }
  };
  walk(0, 0);

  constexpr int kHalfWidth = 10;
  double h = h0;
  for (std::size_t level = 0; level < refine_levels; ++level) {
    h /= 5.0;
    std::vector<double> z(m);
    z[0] = best.x[0];
    for (std::size_t t = 1; t < m; ++t) z[t] = best.x[t] - best.x[t - 1];

    std::vector<std::vector<double>> axis(m);
    for (std::size_t t = 0; t < m; ++t) {
      axis[t].push_back(0.0);
      for (int j = -kHalfWidth; j <= kHalfWidth; ++j) {
        const double v = z[t] + h * j;
        if (v > 0.0) axis[t].push_back(v);
      }
    }
    std::vector<double> zz(m);
    std::function<void(std::size_t)> scan = [&](std::size_t t) {
      if (t == m) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          acc += zz[i];
          x[i] = acc;
        }
        const double f = qp_objective(problem, x);
        if (f < best.objective) {
          best.objective = f;
          best.x = x;
        }
        return;
      }
      for (double v : axis[t]) {
        zz[t] = v;
        scan(t + 1);
      }
    };
    scan(0);
  }
  return best;
}

SampleSet sample_gaussian(const MomentEstimate& moments, Index count, std::uint64_t seed) {
  if (count < 1) throw InvalidInput("sample_gaussian: count must be positive");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(moments.covariance());
  const VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const MatrixXd A = eig.eigenvectors() * root.asDiagonal();
  const Index n = moments.dimension();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd rows(count, n);
  VectorXd z(n);
  for (Index j = 0; j < count; ++j) {
    for (Index i = 0; i < n; ++i) z(i) = normal(rng);
    rows.row(j) = (moments.mean() + A * z).transpose();
  }
  return SampleSet(std::move(rows));
}

std::vector<RobustnessRow> robustness_sweep(const MomentEstimate& moments,
                                            const LengthProfile& profile,
                                            const std::vector<double>& deltas,
                                            const RobustnessOptions& options) {
  for (double d : deltas) {
    if (!std::isfinite(d) || d < 0.0) {
      throw InvalidInput("robustness_sweep: deltas must be finite and >= 0");
    }
  }
  const Index n = moments.dimension();
  const Dictionary baseline_dict = build_optimal_dictionary(moments, profile, options.dictionary);
  const double baseline = expected_cost(baseline_dict, moments);

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd g(n);
  for (Index i = 0; i < n; ++i) g(i) = normal(rng);
  g.normalize();
  MatrixXd G(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) G(i, j) = normal(rng);
  }
  G = 0.5 * (G + G.transpose()).eval();
  G /= G.norm();

  const double mean_scale = moments.mean().norm();
  const double cov_scale = moments.covariance().norm();

  std::vector<RobustnessRow> rows;
  rows.reserve(deltas.size());
  for (double delta : deltas) {
    RobustnessRow row;
    row.delta = delta;
    if (delta == 0.0) {
      row.perturbed_cost = baseline;
      row.perturbed_mean = moments.mean();
      rows.push_back(row);
      continue;
    }
    VectorXd mu = moments.mean();
    if (options.perturb_mean) mu += delta * mean_scale * g;
    MatrixXd sigma = moments.covariance();
    if (options.perturb_covariance) {
      sigma += delta * cov_scale * G;
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sigma);
      if (eig.eigenvalues().minCoeff() < 0.0) {
        row.psd_clipped = true;
        sigma = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).asDiagonal() *
                eig.eigenvectors().transpose();
        sigma = 0.5 * (sigma + sigma.transpose()).eval();
      }
    }
    row.perturbed_mean = mu;
    const Dictionary perturbed =
        build_optimal_dictionary(MomentEstimate(mu, sigma), profile, options.dictionary);
    try {
      row.perturbed_cost = expected_cost(perturbed, moments);
      row.cost_gap = row.perturbed_cost - baseline;
    } catch (const InvalidInput&) {
      row.span_deficient = true;
      row.perturbed_cost = std::numeric_limits<double>::infinity();
      row.cost_gap = row.perturbed_cost;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace optdict
