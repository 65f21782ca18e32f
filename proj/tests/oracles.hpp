#pragma once

// Test-only oracles, independent of the library's quorum logic: brute-force
// subset enumeration over small weight vectors.

#include <cstdint>
#include <vector>

namespace woc_test {

/// All subsets whose weight sum meets sum/2, as bitmasks.
inline std::vector<std::uint32_t> quorum_masks(const std::vector<double>& weights)
{
    const int n = static_cast<int>(weights.size());
    double total = 0.0;
    for (double w : weights)
        total += w;
    const double threshold = total / 2.0;

    std::vector<std::uint32_t> quorums;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i))
                sum += weights[static_cast<std::size_t>(i)];
        if (sum >= threshold)
            quorums.push_back(mask);
    }
    return quorums;
}

/// True iff every pair of threshold-meeting subsets shares a member.
/// Positive weights make the complement the largest disjoint set, so checking
/// each quorum against its complement is exhaustive.
inline bool all_quorums_intersect(const std::vector<double>& weights)
{
    const int n = static_cast<int>(weights.size());
    double total = 0.0;
    for (double w : weights)
        total += w;
    const double threshold = total / 2.0;

    for (std::uint32_t mask : quorum_masks(weights)) {
        const std::uint32_t comp = ((1u << n) - 1u) ^ mask;
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            if (comp & (1u << i))
                sum += weights[static_cast<std::size_t>(i)];
        if (sum >= threshold)
            return false;
    }
    return true;
}

} // namespace woc_test
