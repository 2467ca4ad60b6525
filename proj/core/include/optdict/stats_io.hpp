#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "optdict/dictionary.hpp"

namespace optdict {

/// N samples of dimension n, one per row. N >= 1, all entries finite.
class SampleSet {
 public:
  explicit SampleSet(Eigen::MatrixXd rows);

  [[nodiscard]] const Eigen::MatrixXd& rows() const noexcept { return rows_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return rows_.rows(); }
  [[nodiscard]] Eigen::Index dimension() const noexcept { return rows_.cols(); }

 private:
  Eigen::MatrixXd rows_;
};

/// Comma-separated numeric rows; a single leading non-numeric row is taken as
/// a header. Blank lines are ignored. Errors carry 1-based line/column.
[[nodiscard]] SampleSet parse_samples_csv(std::istream& in);
[[nodiscard]] SampleSet load_samples(const std::filesystem::path& path);
void write_samples_csv(std::ostream& out, const SampleSet& samples);

enum class CovarianceDivisor {
  kPopulation,  ///< 1/N, the expectation operator applied to the empirical law
  kUnbiased,    ///< 1/(N-1)
};

[[nodiscard]] MomentEstimate empirical_moments(
    const SampleSet& samples, CovarianceDivisor divisor = CovarianceDivisor::kPopulation);

/// Schema version written to meta.version of dictionary files and reports.
inline constexpr std::string_view kFormatVersion = "1";

/// Dictionary as JSON: center, vectors (one row per dictionary vector),
/// lengths, spectrum, frame_operator, cost, meta. Doubles round-trip exactly.
[[nodiscard]] std::string dictionary_to_json(const Dictionary& dict);
/// Parses and re-validates. Schema problems and violated invariants throw
/// InvalidInput naming the field or invariant.
[[nodiscard]] Dictionary dictionary_from_json(std::string_view text);

void save_dictionary(const Dictionary& dict, const std::filesystem::path& path);
[[nodiscard]] Dictionary load_dictionary(const std::filesystem::path& path);

/// Reads a covariance file (a JSON array of rows, or an object with a
/// "covariance" key and optional "mean") and an optional separate mean file
/// (a JSON array, or an object with a "mean" key). Missing mean means zero.
[[nodiscard]] MomentEstimate load_moments(const std::filesystem::path& covariance_path,
                                          const std::optional<std::filesystem::path>& mean_path);

}  // namespace optdict
