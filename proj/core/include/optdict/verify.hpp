#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "optdict/chain_qp.hpp"
#include "optdict/dictionary.hpp"
#include "optdict/stats_io.hpp"

namespace optdict {

struct MonteCarloOptions {
  /// 1 sums sequentially. More threads split the samples into that many
  /// contiguous chunks and add the chunk sums in chunk order, so results are
  /// reproducible for a fixed thread count but may differ from the sequential
  /// sum in the last bits.
  unsigned threads = 1;
};

struct MonteCarloEstimate {
  double mean = 0.0;            ///< (1/N) sum ||D^+ (v_j - c)||^2
  double std_dev = 0.0;         ///< sample standard deviation of the per-sample cost
  double standard_error = 0.0;  ///< std_dev / sqrt(N)
  Eigen::Index samples = 0;
};

[[nodiscard]] MonteCarloEstimate monte_carlo_cost(const Dictionary& dict, const SampleSet& samples,
                                                  const MonteCarloOptions& options = {});

/// ||sum_i d_i d_i^T - (sum c / n) I||_F / sqrt(n). Zero exactly for tight frames.
[[nodiscard]] double tight_frame_residual(const Dictionary& dict);

struct GridOracleResult {
  std::vector<double> x;
  double objective = 0.0;
};

/// Brute-force minimizer of the chain QP, independent of the solver.
/// Level 0 enumerates every nondecreasing x on a uniform grid of
/// `steps_per_axis` intervals over [0, 2 max(sqrt(s_t)/a_t)]. Each refinement
/// level re-grids 21 points per coordinate around the incumbent, in the
/// increments z_1 = x_1, z_t = x_t - x_{t-1} >= 0, with a fifth of the previous
/// spacing. Only m <= 4 is accepted.
[[nodiscard]] GridOracleResult qp_grid_oracle(const ChainQpProblem& problem,
                                              std::size_t steps_per_axis,
                                              std::size_t refine_levels = 0);

/// N draws from the Gaussian with the given moments (mt19937_64, seeded).
[[nodiscard]] SampleSet sample_gaussian(const MomentEstimate& moments, Eigen::Index count,
                                        std::uint64_t seed);

struct RobustnessOptions {
  std::uint64_t seed = 0;
  bool perturb_mean = true;
  bool perturb_covariance = true;
  DictionaryOptions dictionary{};
};

struct RobustnessRow {
  double delta = 0.0;
  double cost_gap = 0.0;        ///< J(mu', Sigma') - J(mu, Sigma)
  double perturbed_cost = 0.0;  ///< J(mu', Sigma'), true cost of the perturbed design
  bool psd_clipped = false;     ///< perturbed covariance had negative eigenvalues set to 0
  /// The perturbed design misses part of the true support, so the true cost is
  /// infinite; perturbed_cost and cost_gap are +inf.
  bool span_deficient = false;
  Eigen::VectorXd perturbed_mean;
};

/// Rebuilds the optimal dictionary from moments perturbed by
///   mu'    = mu + delta ||mu|| g
///   Sigma' = Sigma + delta ||Sigma||_F G
/// (g a unit vector, G symmetric with unit Frobenius norm, both drawn once
/// from `seed` and shared by every delta) and scores it against the true
/// moments. This perturbation model is a stand-in for estimation error; it is
/// not prescribed by the continuity result it probes. Deltas must be finite
/// and >= 0.
[[nodiscard]] std::vector<RobustnessRow> robustness_sweep(const MomentEstimate& moments,
                                                          const LengthProfile& profile,
                                                          const std::vector<double>& deltas,
                                                          const RobustnessOptions& options = {});

}  // namespace optdict
