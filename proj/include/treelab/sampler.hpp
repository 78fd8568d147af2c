#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treelab/common.hpp"
#include "treelab/offspring.hpp"
#include "treelab/rng.hpp"
#include "treelab/tree.hpp"

namespace treelab {

/// Index r such that the cyclic rotation starting at r of the degree
/// sequence is a valid Lukasiewicz path.  Requires sum(k_i) = n - 1; the
/// cycle lemma guarantees exactly one such rotation, the one beginning just
/// after the first global minimum of the walk sum(k_i - 1).
inline std::size_t cycle_lemma_rotation(std::span<const std::uint32_t> degrees) {
    long long walk = 0, best = 0;
    std::size_t best_pos = 0;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        walk += static_cast<long long>(degrees[i]) - 1;
        if (walk < best) {
            best = walk;
            best_pos = i + 1;
        }
    }
    return best_pos % degrees.size();
}

/// Exact sample of a critical GW tree conditioned on |tau| = p.
///
/// Degree-sequence rejection (resample until the degrees sum to p-1, with an
/// early abort once the partial sum overshoots) followed by the cycle-lemma
/// rotation.  `max_proposals` caps the rejection loop for pathological
/// (distribution, size) pairs.
inline Tree sample_conditioned_gw(const OffspringDistribution& dist, std::uint64_t p,
                                  CounterRng& rng, std::uint64_t max_proposals = 10'000'000) {
    if (!dist.feasible_size(p))
        throw InfeasibleSize("no tree of size " + std::to_string(p) + " under " + dist.describe());
    std::vector<std::uint32_t> degs(p);
    const std::uint64_t target = p - 1;
    for (std::uint64_t proposal = 0; proposal < max_proposals; ++proposal) {
        std::uint64_t sum = 0;
        bool ok = true;
        for (std::uint64_t i = 0; i < p; ++i) {
            std::uint32_t k = dist.sample(rng);
            sum += k;
            if (sum > target) {
                ok = false;
                break;
            }
            degs[i] = k;
        }
        if (!ok || sum != target) continue;
        std::size_t r = cycle_lemma_rotation(degs);
        std::rotate(degs.begin(), degs.begin() + static_cast<std::ptrdiff_t>(r), degs.end());
        return tree_from_degrees(degs);
    }
    throw RejectionBudgetExceeded("no valid degree sequence after " +
                                  std::to_string(max_proposals) + " proposals");
}

/// Uniform full binary ordered tree with n internal nodes (2n+1 nodes,
/// C_n = (2n)!/(n!^2 (n+1)) shapes).
inline Tree sample_uniform_full_binary(std::uint64_t n, CounterRng& rng) {
    static const OffspringDistribution binary = OffspringDistribution::binary();
    return sample_conditioned_gw(binary, 2 * n + 1, rng);
}

}  // namespace treelab
