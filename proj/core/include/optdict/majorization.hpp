#pragma once

#include <cstddef>

#include "optdict/sequence.hpp"

namespace optdict {

/// True iff `a` is majorized by `b`: every prefix sum of `a` is at most the
/// matching prefix sum of `b`, and the totals agree. Each comparison uses the
/// absolute tolerance `tol`.
///
/// Both sequences must have the same length and be non-increasing (within
/// `tol`); otherwise InvalidInput is thrown.
[[nodiscard]] bool check_majorization(const RealSequence& a, const RealSequence& b,
                                      double tol = kMajorizationTol);

/// Collapses a profile of K squared lengths onto m slots: the first m-1
/// entries are kept and the tail c_m + ... + c_K is summed into the last slot.
/// The result preserves the total but may increase at the last index.
[[nodiscard]] RealSequence collapse_lengths(const LengthProfile& profile, std::size_t m);

/// Block-averaged spectrum: inside block [b, e) every entry is
/// c_i * (sum a over block) / (sum c over block).
[[nodiscard]] RealSequence lambda_map(const RealSequence& c, const RealSequence& a,
                                      const BlockPartition& partition);

/// Cost attached to `lambda_map`: sum over blocks of (sum c)^2 / (sum a).
[[nodiscard]] double j_value(const RealSequence& c, const RealSequence& a,
                             const BlockPartition& partition);

}  // namespace optdict
