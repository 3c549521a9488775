#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "cmg/game.hpp"
#include "cmg/lp.hpp"
#include "cmg/types.hpp"

namespace cmg {

// Deterministic attack: one exploit index per observation.
struct PureAttackStrategy {
    std::unordered_map<Obs, int, VecHash> choice;
};

struct MixedAttackStrategy {
    std::unordered_map<Obs, std::vector<double>, VecHash> z;
};

struct EquilibriumResult {
    DefenderTable defender;
    MixedAttackStrategy attacker;
    double defender_loss = 0.0;
    double attacker_value = 0.0;
    int iterations = 0;
    double gap = 0.0;
};

// Every observation x (.) y over the support and all masks, sorted
// lexicographically for deterministic iteration.
std::vector<Obs> enumerate_observations(const GameSpec& game,
                                        const std::vector<std::pair<Config, double>>& support);

// Exact best response by per-observation argmax (the attacker's LP decomposes
// per observation); ties break toward the smallest exploit index.
std::pair<PureAttackStrategy, double> attacker_best_response(const DefenderTable& q,
                                                             const GameSpec& game);

// Defender LP restricted to the attack strategies in Z. Variables are the
// q(y;x) table entries followed by one nonnegative attack-value variable per
// observation; Z contributes one row per distinct (observation, exploit) pair.
LinearProgramSpec build_defender_lp(const GameSpec& game,
                                    const std::vector<PureAttackStrategy>& Z);

// Constraint generation until |LP objective - expected cost - best-response
// value| <= eps.
EquilibriumResult solve_lp_cg(const GameSpec& game, double eps = 1e-5, uint64_t seed = 0,
                              int max_rounds = 500);

// Strategy-dump document: per-x mask support, per-observation exploit
// distribution and the equilibrium scalars.
std::string equilibrium_to_json(const EquilibriumResult& result, const GameSpec& game);

}  // namespace cmg
