#include "cmg/lp_exact.hpp"

#include <algorithm>
#include <set>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "cmg/errors.hpp"
#include "cmg/rng.hpp"

namespace cmg {

namespace {

// q(y;x) values per (support row, exploit): sum_k v(x^k) delta(x^k in X^e).
std::vector<std::vector<double>> exploit_values(const GameSpec& game,
                                                const std::vector<std::pair<Config, double>>& sup) {
    std::vector<std::vector<double>> val(sup.size());
    for (size_t i = 0; i < sup.size(); ++i) val[i] = game.delta_vector(sup[i].first);
    return val;
}

void check_capacity(const GameSpec& game, size_t support_size) {
    const int bits = game.joint_len();
    if (bits >= 20 || (support_size << bits) > kEnumerationCap)
        throw CapacityError("q-table size exceeds the 2^20 enumeration cap; use the GAM solver");
}

}  // namespace

std::vector<Obs> enumerate_observations(const GameSpec& game,
                                        const std::vector<std::pair<Config, double>>& support) {
    const int len = game.joint_len();
    const uint64_t masks = 1ULL << len;
    std::unordered_map<Obs, bool, VecHash> seen;
    std::vector<Obs> out;
    for (const auto& [x, p] : support) {
        for (uint64_t yi = 0; yi < masks; ++yi) {
            Obs obs(len);
            for (int i = 0; i < len; ++i) obs[i] = ((yi >> i) & 1ULL) ? x[i] : 0;
            if (!seen.emplace(obs, true).second) continue;
            out.push_back(std::move(obs));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::pair<PureAttackStrategy, double> attacker_best_response(const DefenderTable& q,
                                                             const GameSpec& game) {
    PureAttackStrategy br;
    if (game.exploits.empty()) return {br, 0.0};

    const int len = q.mask_bits;
    const uint64_t masks = q.mask_count();
    const size_t ne = game.exploits.size();

    std::vector<std::pair<Config, double>> sup(q.support.size());
    for (size_t i = 0; i < q.support.size(); ++i) sup[i] = {q.support[i], q.prior[i]};
    const auto val = exploit_values(game, sup);

    // Accumulate per-observation exploit weights over all (x, y) pairs.
    std::unordered_map<Obs, std::vector<double>, VecHash> weight;
    Obs obs(len);
    for (size_t i = 0; i < q.support.size(); ++i) {
        for (uint64_t yi = 0; yi < masks; ++yi) {
            const double w = q.prior[i] * q.q[i][yi];
            for (int b = 0; b < len; ++b) obs[b] = ((yi >> b) & 1ULL) ? q.support[i][b] : 0;
            auto [it, fresh] = weight.try_emplace(obs, ne, 0.0);
            if (w <= 0.0) continue;
            for (size_t e = 0; e < ne; ++e) it->second[e] += w * val[i][e];
        }
    }

    double total = 0.0;
    for (const auto& [o, we] : weight) {
        int best = 0;
        for (size_t e = 1; e < ne; ++e)
            if (we[e] > we[best]) best = static_cast<int>(e);
        br.choice[o] = best;
        total += we[best];
    }
    return {br, total};
}

namespace {

// Precomputed geometry shared by the LP builder and the generation loop.
struct LpContext {
    std::vector<std::pair<Config, double>> support;
    std::vector<Obs> observations;
    std::unordered_map<Obs, size_t, VecHash> obs_index;
    std::vector<size_t> cell_obs;             // (support row, mask) -> observation index
    std::vector<std::vector<double>> val;     // per-(support row, exploit) value
    int len = 0;
    uint64_t masks = 0;
    size_t nq = 0;
};

LpContext make_lp_context(const GameSpec& game) {
    LpContext ctx;
    ctx.support = enumerate_support(game);
    check_capacity(game, ctx.support.size());
    ctx.len = game.joint_len();
    ctx.masks = 1ULL << ctx.len;
    ctx.nq = ctx.support.size() * ctx.masks;
    ctx.observations = enumerate_observations(game, ctx.support);
    for (size_t o = 0; o < ctx.observations.size(); ++o)
        ctx.obs_index.emplace(ctx.observations[o], o);
    ctx.val = exploit_values(game, ctx.support);
    ctx.cell_obs.resize(ctx.nq);
    Obs obs(ctx.len);
    for (size_t i = 0; i < ctx.support.size(); ++i) {
        for (uint64_t yi = 0; yi < ctx.masks; ++yi) {
            for (int b = 0; b < ctx.len; ++b)
                obs[b] = ((yi >> b) & 1ULL) ? ctx.support[i].first[b] : 0;
            ctx.cell_obs[i * ctx.masks + yi] = ctx.obs_index.at(obs);
        }
    }
    return ctx;
}

// One row per (observation, exploit) cut: attack weight at that observation
// must not exceed its value variable.
LinearProgramSpec build_lp_from_cuts(const GameSpec& game, const LpContext& ctx,
                                     const std::vector<std::pair<size_t, int>>& cuts) {
    const size_t nobs = ctx.observations.size();
    LinearProgramSpec lp;
    lp.objective.assign(ctx.nq + nobs, 0.0);
    lp.free_vars.assign(ctx.nq + nobs, 0);  // attack weights are nonnegative, so u_o >= 0
    for (size_t o = 0; o < nobs; ++o) lp.objective[ctx.nq + o] = 1.0;
    for (size_t i = 0; i < ctx.support.size(); ++i)
        for (uint64_t yi = 0; yi < ctx.masks; ++yi)
            lp.objective[i * ctx.masks + yi] =
                ctx.support[i].second * game.mask_cost(mask_from_index(yi, ctx.len));

    for (const auto& [oi, e] : cuts) {
        LpRow row;
        row.coeffs.assign(ctx.nq + nobs, 0.0);
        row.sense = RowSense::LessEqual;
        row.rhs = 0.0;
        row.coeffs[ctx.nq + oi] = -1.0;
        for (size_t i = 0; i < ctx.support.size(); ++i)
            for (uint64_t yi = 0; yi < ctx.masks; ++yi)
                if (ctx.cell_obs[i * ctx.masks + yi] == oi)
                    row.coeffs[i * ctx.masks + yi] = ctx.support[i].second * ctx.val[i][e];
        lp.rows.push_back(std::move(row));
    }

    // Per-x simplex equalities.
    for (size_t i = 0; i < ctx.support.size(); ++i) {
        LpRow row;
        row.coeffs.assign(ctx.nq + nobs, 0.0);
        row.sense = RowSense::Equal;
        row.rhs = 1.0;
        for (uint64_t yi = 0; yi < ctx.masks; ++yi) row.coeffs[i * ctx.masks + yi] = 1.0;
        lp.rows.push_back(std::move(row));
    }
    return lp;
}

}  // namespace

LinearProgramSpec build_defender_lp(const GameSpec& game,
                                    const std::vector<PureAttackStrategy>& Z) {
    LpContext ctx = make_lp_context(game);
    std::vector<std::pair<size_t, int>> cuts;
    std::set<std::pair<size_t, int>> seen;
    for (const auto& z : Z)
        for (const auto& [obs, e] : z.choice) {
            auto it = ctx.obs_index.find(obs);
            if (it == ctx.obs_index.end()) continue;
            if (seen.emplace(it->second, e).second) cuts.emplace_back(it->second, e);
        }
    std::sort(cuts.begin(), cuts.end());
    return build_lp_from_cuts(game, ctx, cuts);
}

EquilibriumResult solve_lp_cg(const GameSpec& game, double eps, uint64_t seed, int max_rounds) {
    (void)seed;
    game.validate();
    LpContext ctx = make_lp_context(game);

    EquilibriumResult result;
    result.defender.mask_bits = ctx.len;
    for (const auto& [x, p] : ctx.support) {
        result.defender.support.push_back(x);
        result.defender.prior.push_back(p);
    }

    // Degenerate game: nothing to attack, so never pay masking cost.
    if (game.exploits.empty()) {
        result.defender.q.assign(ctx.support.size(), std::vector<double>(ctx.masks, 0.0));
        for (auto& row : result.defender.q) row[ctx.masks - 1] = 1.0;
        return result;
    }

    const size_t ne = game.exploits.size();
    std::vector<std::pair<size_t, int>> cuts;
    std::set<std::pair<size_t, int>> seen;

    double last_err = 0.0;
    for (int round = 1; round <= max_rounds; ++round) {
        LinearProgramSpec lp = build_lp_from_cuts(game, ctx, cuts);
        LpSolution sol = solve_linear_program(lp);
        if (sol.status != LpStatus::Optimal)
            throw SolverError("defender LP is not optimal (status != Optimal)");

        result.defender.q.assign(ctx.support.size(), std::vector<double>(ctx.masks, 0.0));
        for (size_t i = 0; i < ctx.support.size(); ++i) {
            double total = 0.0;
            for (uint64_t yi = 0; yi < ctx.masks; ++yi) {
                double v = std::max(0.0, sol.x[i * ctx.masks + yi]);
                result.defender.q[i][yi] = v;
                total += v;
            }
            for (uint64_t yi = 0; yi < ctx.masks; ++yi) result.defender.q[i][yi] /= total;
        }
        result.attacker_value = 0.0;
        for (size_t o = 0; o < ctx.observations.size(); ++o)
            result.attacker_value += sol.x[ctx.nq + o];
        result.defender_loss = sol.value;
        result.iterations = round;

        double cost_term = 0.0;
        for (size_t i = 0; i < ctx.support.size(); ++i)
            for (uint64_t yi = 0; yi < ctx.masks; ++yi)
                cost_term += ctx.support[i].second * result.defender.q[i][yi] *
                             game.mask_cost(mask_from_index(yi, ctx.len));

        auto [z_new, br_value] = attacker_best_response(result.defender, game);
        last_err = std::abs(sol.value - cost_term - br_value);
        result.gap = last_err;

        if (last_err <= eps) {
            // Equilibrium attacker from the cut duals: the rows binding at the
            // optimum carry the attacker's per-observation mixture.
            std::vector<std::vector<double>> z(ctx.observations.size(),
                                               std::vector<double>(ne, 0.0));
            for (size_t r = 0; r < cuts.size(); ++r)
                z[cuts[r].first][cuts[r].second] += std::abs(sol.duals[r]);
            for (size_t o = 0; o < ctx.observations.size(); ++o) {
                double total = 0.0;
                for (double v : z[o]) total += v;
                if (total > 0.0) {
                    for (double& v : z[o]) v /= total;
                } else {
                    z[o][z_new.choice.at(ctx.observations[o])] = 1.0;
                }
                result.attacker.z[ctx.observations[o]] = std::move(z[o]);
            }
            return result;
        }

        // Add the violated best-response cuts.
        bool grew = false;
        for (const auto& [obs, e] : z_new.choice) {
            const size_t oi = ctx.obs_index.at(obs);
            if (seen.emplace(oi, e).second) {
                cuts.emplace_back(oi, e);
                grew = true;
            }
        }
        if (!grew)
            throw SolverError("constraint generation stalled without closing the gap");
    }
    std::ostringstream ss;
    ss << "constraint generation did not converge within " << max_rounds
       << " rounds (last gap " << last_err << ")";
    throw SolverError(ss.str());
}

std::string equilibrium_to_json(const EquilibriumResult& result, const GameSpec& game) {
    nlohmann::json j;
    j["defender_loss"] = result.defender_loss;
    j["attacker_value"] = result.attacker_value;
    j["gap"] = result.gap;
    j["iterations"] = result.iterations;

    nlohmann::json defender = nlohmann::json::array();
    const int len = result.defender.mask_bits;
    for (size_t i = 0; i < result.defender.support.size(); ++i) {
        nlohmann::json entry;
        entry["x"] = result.defender.support[i];
        entry["p"] = result.defender.prior[i];
        nlohmann::json masks = nlohmann::json::array();
        for (uint64_t yi = 0; yi < result.defender.mask_count(); ++yi) {
            const double p = result.defender.q[i][yi];
            if (p <= 1e-6) continue;
            const Mask y = mask_from_index(yi, len);
            masks.push_back({{"y", std::vector<int>(y.begin(), y.end())}, {"p", p}});
        }
        entry["masks"] = masks;
        defender.push_back(entry);
    }
    j["defender"] = defender;

    nlohmann::json attacker = nlohmann::json::array();
    std::vector<Obs> keys;
    for (const auto& [o, dist] : result.attacker.z) keys.push_back(o);
    std::sort(keys.begin(), keys.end());
    for (const auto& o : keys)
        attacker.push_back({{"obs", o}, {"z", result.attacker.z.at(o)}});
    j["attacker"] = attacker;
    (void)game;
    return j.dump(2);
}

}  // namespace cmg
