#pragma once

// Independent minimax oracle for tiny games, used to cross-check the LP
// solver. Runs fictitious play with exact best responses on both sides and
// reports certified bounds: any fixed defender table gives an upper bound on
// the minimax value (attacker best-responds exactly), any fixed attacker
// strategy gives a lower bound (defender best-responds exactly).

#include <algorithm>
#include <limits>
#include <unordered_map>
#include <vector>

#include "cmg/game.hpp"
#include "cmg/types.hpp"

namespace cmg_test {

struct MinimaxBounds {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

class MinimaxOracle {
  public:
    explicit MinimaxOracle(const cmg::GameSpec& game) : game_(game) {
        support_ = cmg::enumerate_support(game);
        len_ = game.joint_len();
        masks_ = 1ULL << len_;
        ne_ = game.exploits.size();
        for (const auto& [x, p] : support_) deltas_.push_back(game.delta_vector(x));
        for (uint64_t yi = 0; yi < masks_; ++yi) {
            cmg::Mask y = cmg::mask_from_index(yi, len_);
            costs_.push_back(game.mask_cost(y));
        }
    }

    // Attacker value of a defender table against an exact best response,
    // plus the expected masking cost.
    double upper_bound(const std::vector<std::vector<double>>& q) const {
        std::unordered_map<cmg::Obs, std::vector<double>, cmg::VecHash> w;
        double cost = 0.0;
        for (size_t i = 0; i < support_.size(); ++i) {
            for (uint64_t yi = 0; yi < masks_; ++yi) {
                const double mass = support_[i].second * q[i][yi];
                if (mass == 0.0) continue;
                cost += mass * costs_[yi];
                if (ne_ == 0) continue;
                cmg::Obs obs =
                    cmg::observe(support_[i].first, cmg::mask_from_index(yi, len_));
                auto& acc = w.try_emplace(obs, ne_, 0.0).first->second;
                for (size_t e = 0; e < ne_; ++e) acc[e] += mass * deltas_[i][e];
            }
        }
        double attack = 0.0;
        for (const auto& [obs, acc] : w) attack += *std::max_element(acc.begin(), acc.end());
        return attack + cost;
    }

    // Defender best response to a fixed complete attacker strategy; the
    // strategy plays uniformly on observations missing from the map.
    double lower_bound(
        const std::unordered_map<cmg::Obs, std::vector<double>, cmg::VecHash>& z,
        std::vector<std::vector<double>>* br = nullptr) const {
        double total = 0.0;
        if (br) br->assign(support_.size(), std::vector<double>(masks_, 0.0));
        for (size_t i = 0; i < support_.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            uint64_t best_y = 0;
            for (uint64_t yi = 0; yi < masks_; ++yi) {
                double v = costs_[yi];
                if (ne_ > 0) {
                    cmg::Obs obs =
                        cmg::observe(support_[i].first, cmg::mask_from_index(yi, len_));
                    auto it = z.find(obs);
                    if (it != z.end()) {
                        for (size_t e = 0; e < ne_; ++e) v += it->second[e] * deltas_[i][e];
                    } else {
                        for (size_t e = 0; e < ne_; ++e) v += deltas_[i][e] / ne_;
                    }
                }
                if (v < best - 1e-15) {
                    best = v;
                    best_y = yi;
                }
            }
            total += support_[i].second * best;
            if (br) (*br)[i][best_y] = 1.0;
        }
        return total;
    }

    MinimaxBounds solve(int max_iters = 4000, double tol = 1e-3) const {
        MinimaxBounds out;
        // Average defender table, seeded with the no-mask pure strategy.
        std::vector<std::vector<double>> qbar(support_.size(),
                                              std::vector<double>(masks_, 0.0));
        for (auto& row : qbar) row[masks_ - 1] = 1.0;
        std::unordered_map<cmg::Obs, std::vector<double>, cmg::VecHash> zbar, zsum;

        for (int t = 1; t <= max_iters; ++t) {
            out.iterations = t;
            out.upper = std::min(out.upper, upper_bound(qbar));

            // Attacker best response to qbar, accumulated into the average.
            std::unordered_map<cmg::Obs, std::vector<double>, cmg::VecHash> w;
            for (size_t i = 0; i < support_.size(); ++i) {
                for (uint64_t yi = 0; yi < masks_ && ne_ > 0; ++yi) {
                    const double mass = support_[i].second * qbar[i][yi];
                    if (mass == 0.0) continue;
                    cmg::Obs obs =
                        cmg::observe(support_[i].first, cmg::mask_from_index(yi, len_));
                    auto& acc = w.try_emplace(obs, ne_, 0.0).first->second;
                    for (size_t e = 0; e < ne_; ++e) acc[e] += mass * deltas_[i][e];
                }
            }
            for (const auto& [obs, acc] : w) {
                const size_t pick =
                    std::max_element(acc.begin(), acc.end()) - acc.begin();
                auto& sum = zsum.try_emplace(obs, ne_, 0.0).first->second;
                sum[pick] += 1.0;
            }
            zbar.clear();
            for (const auto& [obs, sum] : zsum) {
                double total = 0.0;
                for (double v : sum) total += v;
                std::vector<double> row(sum);
                for (double& v : row) v /= total;
                zbar.emplace(obs, std::move(row));
            }

            // Defender best response to zbar, folded into the running average.
            std::vector<std::vector<double>> qbr;
            out.lower = std::max(out.lower, lower_bound(zbar, &qbr));
            const double w_old = static_cast<double>(t) / (t + 1);
            for (size_t i = 0; i < qbar.size(); ++i)
                for (uint64_t yi = 0; yi < masks_; ++yi)
                    qbar[i][yi] = w_old * qbar[i][yi] + (1.0 - w_old) * qbr[i][yi];

            if (out.upper - out.lower <= tol) break;
        }
        return out;
    }

  private:
    const cmg::GameSpec& game_;
    std::vector<std::pair<cmg::Config, double>> support_;
    std::vector<std::vector<double>> deltas_;
    std::vector<double> costs_;
    int len_ = 0;
    uint64_t masks_ = 1;
    size_t ne_ = 0;
};

}  // namespace cmg_test
