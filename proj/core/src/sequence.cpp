#include "optdict/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "optdict/error.hpp"

namespace optdict {

RealSequence::RealSequence(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInput("sequence must contain at least one entry");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidInput("sequence entry " + std::to_string(i + 1) + " is not finite");
    }
  }
}

RealSequence::RealSequence(std::initializer_list<double> values)
    : RealSequence(std::vector<double>(values)) {}

double RealSequence::sum() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

bool RealSequence::is_non_increasing(double tol) const noexcept {
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (values_[i] > values_[i - 1] + tol) return false;
  }
  return true;
}

bool RealSequence::all_positive() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
}

LengthProfile::LengthProfile(std::vector<double> squared_lengths)
    : c_(std::move(squared_lengths)) {
  if (c_.empty()) throw InvalidInput("length profile must contain at least one entry");
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (!std::isfinite(c_[i]) || c_[i] <= 0.0) {
      throw InvalidInput("squared length c_" + std::to_string(i + 1) +
                         " must be positive and finite");
    }
    if (i > 0 && c_[i] > c_[i - 1]) {
      throw InvalidInput("length profile must be non-increasing (c_" + std::to_string(i + 1) +
                         " > c_" + std::to_string(i) + ")");
    }
  }
}

LengthProfile::LengthProfile(std::initializer_list<double> squared_lengths)
    : LengthProfile(std::vector<double>(squared_lengths)) {}

LengthProfile LengthProfile::from_unsorted(std::vector<double> squared_lengths,
                                           bool* was_sorted) {
  const bool sorted =
      std::is_sorted(squared_lengths.begin(), squared_lengths.end(), std::greater<>());
  if (was_sorted != nullptr) *was_sorted = sorted;
  if (!sorted) std::stable_sort(squared_lengths.begin(), squared_lengths.end(), std::greater<>());
  return LengthProfile(std::move(squared_lengths));
}

double LengthProfile::sum() const noexcept {
  return std::accumulate(c_.begin(), c_.end(), 0.0);
}

BlockPartition::BlockPartition(std::vector<std::size_t> starts, std::size_t length)
    : starts_(std::move(starts)), length_(length) {
  if (length_ == 0) throw InvalidInput("partition length must be positive");
  if (starts_.empty() || starts_.front() != 0) {
    throw InvalidInput("partition must start at the first index");
  }
  for (std::size_t l = 1; l < starts_.size(); ++l) {
    if (starts_[l] <= starts_[l - 1]) {
      throw InvalidInput("partition boundaries must be strictly increasing");
    }
  }
  if (starts_.back() >= length_) throw InvalidInput("partition boundary beyond sequence length");
}

BlockPartition BlockPartition::single_block(std::size_t length) {
  return BlockPartition({0}, length);
}

BlockPartition BlockPartition::singletons(std::size_t length) {
  std::vector<std::size_t> starts(length);
  std::iota(starts.begin(), starts.end(), std::size_t{0});
  return BlockPartition(std::move(starts), length);
}

BlockPartition BlockPartition::from_one_based(const std::vector<std::size_t>& boundaries,
                                              std::size_t length) {
  std::vector<std::size_t> starts;
  starts.reserve(boundaries.size());
  for (std::size_t b : boundaries) {
    if (b == 0) throw InvalidInput("1-based partition boundary cannot be 0");
    starts.push_back(b - 1);
  }
  return BlockPartition(std::move(starts), length);
}

std::vector<std::size_t> BlockPartition::one_based_boundaries() const {
  std::vector<std::size_t> out(starts_.begin(), starts_.end());
  for (auto& b : out) ++b;
  return out;
}

}  // namespace optdict
