#include "excast/smote.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "excast/rng.hpp"

namespace excast {

SmoteResult smote_resample(const std::vector<std::vector<double>>& X,
                           const std::vector<std::uint8_t>& b, int k, std::uint64_t seed) {
    if (X.size() != b.size()) throw std::invalid_argument("X and b length mismatch");
    if (k < 1) throw std::invalid_argument("k must be >= 1");

    std::vector<std::size_t> minority, majority;
    for (std::size_t i = 0; i < b.size(); ++i) (b[i] ? minority : majority).push_back(i);
    std::uint8_t minority_label = 1;
    if (minority.size() > majority.size()) {
        std::swap(minority, majority);
        minority_label = 0;
    }

    SmoteResult out;
    out.X = X;
    out.b = b;
    if (minority.size() == majority.size()) return out;  // already balanced
    if (minority.size() < 2)
        throw std::runtime_error("SMOTE needs at least 2 minority rows");

    const std::size_t n_min = minority.size();
    const std::size_t k_eff = std::min<std::size_t>(static_cast<std::size_t>(k), n_min - 1);

    // k nearest minority neighbors of each minority row (Euclidean).
    std::vector<std::vector<std::size_t>> neighbors(n_min);
    std::vector<double> dist(n_min);
    std::vector<std::size_t> order(n_min);
    for (std::size_t a = 0; a < n_min; ++a) {
        for (std::size_t c = 0; c < n_min; ++c) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < X[minority[a]].size(); ++j) {
                const double d = X[minority[a]][j] - X[minority[c]][j];
                d2 += d * d;
            }
            dist[c] = d2;
        }
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t u, std::size_t v) {
            return dist[u] != dist[v] ? dist[u] < dist[v] : u < v;
        });
        // order[0] is the row itself (distance 0)
        neighbors[a].assign(order.begin() + 1, order.begin() + 1 + static_cast<std::ptrdiff_t>(k_eff));
    }

    std::mt19937_64 gen(rng::mix(seed));
    const std::size_t needed = majority.size() - n_min;
    for (std::size_t s = 0; s < needed; ++s) {
        const std::size_t a = rng::bounded(gen, n_min);
        const std::size_t c = neighbors[a][rng::bounded(gen, k_eff)];
        const double u = rng::uniform01(gen);
        const auto& base = X[minority[a]];
        const auto& nn = X[minority[c]];
        std::vector<double> synth(base.size());
        for (std::size_t j = 0; j < base.size(); ++j)
            synth[j] = base[j] + u * (nn[j] - base[j]);
        out.X.push_back(std::move(synth));
        out.b.push_back(minority_label);
    }
    out.synthetic_count = needed;
    return out;
}

}  // namespace excast
