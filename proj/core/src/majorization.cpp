#include "optdict/majorization.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "optdict/error.hpp"

namespace optdict {
namespace {

void require_consistent(const RealSequence& c, const RealSequence& a,
                        const BlockPartition& partition) {
  if (c.size() != a.size() || c.size() != partition.length()) {
    throw InvalidInput("lambda/J map: sequences and partition must have equal length (got " +
                       std::to_string(c.size()) + ", " + std::to_string(a.size()) + ", " +
                       std::to_string(partition.length()) + ")");
  }
  if (!c.all_positive() || !a.all_positive()) {
    throw InvalidInput("lambda/J map: entries must be positive");
  }
}

struct BlockSums {
  double c = 0.0;
  double a = 0.0;
};

BlockSums block_sums(const RealSequence& c, const RealSequence& a,
                     const BlockPartition& partition, std::size_t l) {
  BlockSums s;
  for (std::size_t j = partition.block_begin(l); j < partition.block_end(l); ++j) {
    s.c += c[j];
    s.a += a[j];
  }
  return s;
}

}  // namespace

bool check_majorization(const RealSequence& a, const RealSequence& b, double tol) {
  if (a.size() != b.size()) {
    throw InvalidInput("majorization: sequences differ in length (" + std::to_string(a.size()) +
                       " vs " + std::to_string(b.size()) + ")");
  }
  if (!a.is_non_increasing(tol) || !b.is_non_increasing(tol)) {
    throw InvalidInput("majorization: both sequences must be non-increasing");
  }
  double prefix_a = 0.0;
  double prefix_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    prefix_a += a[i];
    prefix_b += b[i];
    if (i + 1 < a.size() && prefix_a > prefix_b + tol) return false;
  }
  return std::abs(prefix_a - prefix_b) <= tol;
}

RealSequence collapse_lengths(const LengthProfile& profile, std::size_t m) {
  if (m < 1 || m > profile.size()) {
    throw InvalidInput("collapse_lengths: m must lie in [1, K] (m=" + std::to_string(m) +
                       ", K=" + std::to_string(profile.size()) + ")");
  }
  std::vector<double> out(profile.values().begin(), profile.values().begin() + (m - 1));
  double tail = 0.0;
  for (std::size_t j = m - 1; j < profile.size(); ++j) tail += profile[j];
  out.push_back(tail);
  return RealSequence(std::move(out));
}

RealSequence lambda_map(const RealSequence& c, const RealSequence& a,
                        const BlockPartition& partition) {
  require_consistent(c, a, partition);
  std::vector<double> lambda(c.size());
  for (std::size_t l = 0; l < partition.block_count(); ++l) {
    const BlockSums s = block_sums(c, a, partition, l);
    const double ratio = s.a / s.c;
    for (std::size_t i = partition.block_begin(l); i < partition.block_end(l); ++i) {
      lambda[i] = c[i] * ratio;
    }
  }
  return RealSequence(std::move(lambda));
}

double j_value(const RealSequence& c, const RealSequence& a, const BlockPartition& partition) {
  require_consistent(c, a, partition);
  double total = 0.0;
  for (std::size_t l = 0; l < partition.block_count(); ++l) {
    const BlockSums s = block_sums(c, a, partition, l);
    total += s.c * s.c / s.a;
  }
  return total;
}

}  // namespace optdict
