#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "cmg/game.hpp"
#include "cmg/gam.hpp"
#include "cmg/lp_exact.hpp"
#include "cmg/types.hpp"

namespace cmg {

// Draws one (joint configuration, joint mask) pair from a defender strategy.
using DefenderSampler = std::function<void(Rng&, Config&, Mask&)>;

DefenderSampler make_table_sampler(const GameSpec& game, const DefenderTable& q);
DefenderSampler make_gam_sampler(const GameSpec& game, const GeneratorNet& gen);
// Fixed per-device mask (length n), tiled over devices.
DefenderSampler make_fixed_mask_sampler(const GameSpec& game, const Mask& device_mask);
// Uniform i.i.d. fair-bit mask per draw.
DefenderSampler make_random_mask_sampler(const GameSpec& game);

struct BestResponse {
    double value = 0.0;
    std::unordered_map<Obs, int, VecHash> choice;
};

// Groups M samples by observation and best-responds per group; ties break
// toward the smallest exploit index.
BestResponse empirical_best_response(const DefenderSampler& sampler, const GameSpec& game,
                                     int M, uint64_t seed);

struct EvalReport {
    double defender_loss = 0.0;  // attack_value + cost_term, exactly
    double attack_value = 0.0;
    double cost_term = 0.0;
    int M = 0;
    uint64_t seed = 0;
    std::vector<double> exploit_freq;  // average selection probability per exploit
};

EvalReport evaluate(const DefenderSampler& sampler, const GameSpec& game, int M, uint64_t seed);

// Attacker policy: distribution over exploits given an observation.
using AttackerPolicy = std::function<std::vector<double>(const Obs&)>;

AttackerPolicy make_table_attacker(const MixedAttackStrategy& z, int num_exploits);
AttackerPolicy make_net_attacker(const AttackerNet& atk);

// Best-response value minus the given attacker's value on the same samples
// (nonnegative up to the grouping being exact on shared samples).
double equilibrium_gap(const DefenderSampler& sampler, const AttackerPolicy& attacker,
                       const GameSpec& game, int M, uint64_t seed);

}  // namespace cmg
