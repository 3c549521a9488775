#pragma once

#include <cstdint>
#include <vector>

#include "cmg/rng.hpp"
#include "cmg/types.hpp"

namespace cmg {

// Joint mask of i.i.d. fair bits over m*n attributes.
Mask random_mask(int n, int m, uint64_t seed);
Mask random_mask(int n, int m, Rng& rng);

struct GreedyResult {
    Mask mask;                    // per-device mask (length n), shared across x
    double loss = 0.0;            // estimated defender loss of the final mask
    std::vector<int> masked_order;
};

// Forward greedy: start from all-ones, repeatedly mask the attribute with the
// greatest positive loss reduction under an empirical best-responding
// attacker; stop when no reduction remains. Ties break to the smallest index.
GreedyResult greedy_mask(const GameSpec& game, int eval_budget, uint64_t seed);

}  // namespace cmg
