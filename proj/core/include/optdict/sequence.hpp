#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace optdict {

/// Default absolute tolerance for majorization and ordering comparisons.
inline constexpr double kMajorizationTol = 1e-9;

/// Finite, non-empty sequence of reals. Validated once on construction.
class RealSequence {
 public:
  explicit RealSequence(std::vector<double> values);
  RealSequence(std::initializer_list<double> values);

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] const std::vector<double>& vector() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] double sum() const noexcept;
  [[nodiscard]] bool is_non_increasing(double tol = 0.0) const noexcept;
  [[nodiscard]] bool all_positive() const noexcept;

  friend bool operator==(const RealSequence&, const RealSequence&) = default;

 private:
  std::vector<double> values_;
};

/// Prescribed squared lengths c_1 >= c_2 >= ... >= c_K > 0 of the K
/// dictionary vectors.
class LengthProfile {
 public:
  explicit LengthProfile(std::vector<double> squared_lengths);
  LengthProfile(std::initializer_list<double> squared_lengths);

  /// Sorts descending before validating. `was_sorted` reports whether the
  /// input already was non-increasing.
  static LengthProfile from_unsorted(std::vector<double> squared_lengths,
                                     bool* was_sorted = nullptr);

  [[nodiscard]] std::span<const double> values() const noexcept { return c_; }
  [[nodiscard]] const std::vector<double>& vector() const noexcept { return c_; }
  [[nodiscard]] std::size_t size() const noexcept { return c_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return c_[i]; }
  [[nodiscard]] double sum() const noexcept;
  [[nodiscard]] RealSequence as_sequence() const { return RealSequence(c_); }

  friend bool operator==(const LengthProfile&, const LengthProfile&) = default;

 private:
  std::vector<double> c_;
};

/// Partition of {0, ..., m-1} into consecutive blocks. Stored as 0-based block
/// starts; the first start is always 0 and starts are strictly increasing.
class BlockPartition {
 public:
  BlockPartition(std::vector<std::size_t> starts, std::size_t length);

  static BlockPartition single_block(std::size_t length);
  static BlockPartition singletons(std::size_t length);
  /// Builds from the conventional 1-based boundaries (n_1 = 1 < n_2 < ...).
  static BlockPartition from_one_based(const std::vector<std::size_t>& boundaries,
                                       std::size_t length);

  [[nodiscard]] std::size_t length() const noexcept { return length_; }
  [[nodiscard]] std::size_t block_count() const noexcept { return starts_.size(); }
  [[nodiscard]] std::size_t block_begin(std::size_t l) const { return starts_[l]; }
  [[nodiscard]] std::size_t block_end(std::size_t l) const {
    return l + 1 < starts_.size() ? starts_[l + 1] : length_;
  }
  [[nodiscard]] std::span<const std::size_t> starts() const noexcept { return starts_; }
  [[nodiscard]] std::vector<std::size_t> one_based_boundaries() const;

  friend bool operator==(const BlockPartition&, const BlockPartition&) = default;

 private:
  std::vector<std::size_t> starts_;
  std::size_t length_;
};

}  // namespace optdict
