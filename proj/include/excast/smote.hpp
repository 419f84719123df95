#pragma once

#include <cstdint>
#include <vector>

namespace excast {

struct SmoteResult {
    std::vector<std::vector<double>> X;
    std::vector<std::uint8_t> b;
    std::size_t synthetic_count = 0;
};

/**
 * Balances a binary dataset to 1:1 by interpolating synthetic minority
 * rows between each sampled minority point and one of its k nearest
 * minority neighbors. Original rows are preserved unchanged, synthetics
 * appended after them. Already-balanced input is returned as-is.
 */
SmoteResult smote_resample(const std::vector<std::vector<double>>& X,
                           const std::vector<std::uint8_t>& b, int k, std::uint64_t seed);

}  // namespace excast
