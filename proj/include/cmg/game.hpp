#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "cmg/rng.hpp"
#include "cmg/types.hpp"

namespace cmg {

// x~ = x (.) y. Works on device or joint vectors; lengths must match.
Obs observe(const Config& x, const Mask& y);

// Mask recovered from the zero entries of an observation.
Mask mask_of(const Obs& obs);

// True iff x_i in X^e_i for every required attribute (per device).
bool matches(const Config& x, const Exploit& e);

// Hash for grouping observations / configurations.
struct VecHash {
    size_t operator()(const std::vector<int>& v) const {
        uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (int x : v) {
            h ^= static_cast<uint64_t>(static_cast<int64_t>(x)) + 0x9e3779b97f4a7c15ULL +
                 (h << 6) + (h >> 2);
        }
        return static_cast<size_t>(h);
    }
};

// Exhaustive joint support with probabilities (explicit-table or uniform-binary
// priors). Refuses above the enumeration cap.
constexpr uint64_t kEnumerationCap = 1ULL << 20;
std::vector<std::pair<Config, double>> enumerate_support(const GameSpec& game);

// Defender mixed strategy as an explicit table: q[i] is a distribution over
// all 2^(m*n) joint masks for support configuration i.
struct DefenderTable {
    std::vector<Config> support;         // joint configurations
    std::vector<double> prior;           // p(x) aligned with support
    std::vector<std::vector<double>> q;  // per-row distribution over masks
    int mask_bits = 0;                   // m*n

    uint64_t mask_count() const { return 1ULL << mask_bits; }
    void validate() const;  // simplex rows within 1e-7
};

Mask mask_from_index(uint64_t idx, int len);
uint64_t mask_index(const Mask& y);

// Attacker posterior b(x; x~) for an explicit defender table. The mask is
// recovered from the zero entries of obs. Throws DomainError if the
// observation has zero marginal probability.
std::unordered_map<Config, double, VecHash> posterior(const DefenderTable& q,
                                                      const GameSpec& game, const Obs& obs);

// Draw a joint configuration from the prior.
Config sample_joint(const GameSpec& game, Rng& rng);

// Structured instances in the layout
// [OS flags x3 | OS versions x3 | app flag/version pairs | ports (last half)].
GameSpec generate_structured_instance(int n, int m, int num_exploits, int V, uint64_t seed,
                                      double mask_cost_c = 0.01);

}  // namespace cmg
