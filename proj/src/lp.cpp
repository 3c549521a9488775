#include "cmg/lp.hpp"

#include <cmath>
#include <limits>

#include "cmg/errors.hpp"

namespace cmg {

namespace {
constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr int kMaxPivots = 500000;
}  // namespace

void LinearProgramSpec::validate() const {
    for (const auto& row : rows)
        if (row.coeffs.size() != num_vars())
            throw SolverError("LP row width does not match the variable count");
    if (!free_vars.empty() && free_vars.size() != num_vars())
        throw SolverError("LP free-variable flags do not match the variable count");
}

LpSolution solve_linear_program(const LinearProgramSpec& lp) {
    lp.validate();
    const int nv = static_cast<int>(lp.num_vars());
    const int nr = static_cast<int>(lp.rows.size());

    // Structural columns: original variables, then negative parts of free vars.
    std::vector<int> neg_col(nv, -1);
    int ns = nv;
    for (int j = 0; j < nv; ++j)
        if (!lp.free_vars.empty() && lp.free_vars[j]) neg_col[j] = ns++;

    int nslack = 0;
    for (const auto& row : lp.rows)
        if (row.sense != RowSense::Equal) ++nslack;

    const int art_start = ns + nslack;
    const int ncols = art_start + nr;

    // Tableau rows (rhs in the last slot), starting from an artificial basis.
    std::vector<std::vector<double>> T(nr, std::vector<double>(ncols + 1, 0.0));
    std::vector<int> basis(nr);
    std::vector<int> row_origin(nr);
    std::vector<bool> flipped(nr, false);

    int slack_at = ns;
    for (int i = 0; i < nr; ++i) {
        const LpRow& row = lp.rows[i];
        double sign = 1.0;
        RowSense sense = row.sense;
        if (row.rhs < 0.0) {
            sign = -1.0;
            flipped[i] = true;
            if (sense == RowSense::LessEqual)
                sense = RowSense::GreaterEqual;
            else if (sense == RowSense::GreaterEqual)
                sense = RowSense::LessEqual;
        }
        for (int j = 0; j < nv; ++j) {
            T[i][j] = sign * row.coeffs[j];
            if (neg_col[j] >= 0) T[i][neg_col[j]] = -sign * row.coeffs[j];
        }
        if (row.sense != RowSense::Equal) {
            T[i][slack_at] = (sense == RowSense::LessEqual) ? 1.0 : -1.0;
            ++slack_at;
        }
        T[i][art_start + i] = 1.0;
        T[i][ncols] = sign * row.rhs;
        basis[i] = art_start + i;
        row_origin[i] = i;
    }

    // Reduced-cost rows for phase 1 (sum of artificials) and phase 2.
    std::vector<double> obj1(ncols + 1, 0.0), obj2(ncols + 1, 0.0);
    for (int i = 0; i < nr; ++i) obj1[art_start + i] = 1.0;
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j <= ncols; ++j) obj1[j] -= T[i][j];
    for (int j = 0; j < nv; ++j) {
        obj2[j] = lp.objective[j];
        if (neg_col[j] >= 0) obj2[neg_col[j]] = -lp.objective[j];
    }

    auto pivot = [&](int r, int e) {
        const double p = T[r][e];
        for (double& v : T[r]) v /= p;
        for (int i = 0; i < static_cast<int>(T.size()); ++i) {
            if (i == r || std::abs(T[i][e]) < kPivotTol * 1e-3) continue;
            const double f = T[i][e];
            for (int j = 0; j <= ncols; ++j) T[i][j] -= f * T[r][j];
            T[i][e] = 0.0;
        }
        for (auto* obj : {&obj1, &obj2}) {
            const double f = (*obj)[e];
            if (std::abs(f) < kPivotTol * 1e-3) continue;
            for (int j = 0; j <= ncols; ++j) (*obj)[j] -= f * T[r][j];
            (*obj)[e] = 0.0;
        }
        basis[r] = e;
    };

    // Lex comparison order: rhs first, then the initial identity basis, so all
    // rows start lex-positive and stay that way under lex-min ratio pivots.
    std::vector<int> lex_order;
    lex_order.push_back(ncols);
    for (int j = art_start; j < ncols; ++j) lex_order.push_back(j);
    for (int j = 0; j < art_start; ++j) lex_order.push_back(j);

    // Dantzig's rule while the objective moves, Bland's rule (smallest eligible
    // entering column) once it stalls so degenerate bases cannot cycle.
    auto iterate = [&](const std::vector<double>& obj, bool* unbounded) {
        int pivots = 0;
        int stalled = 0;
        double last_val = obj[ncols];
        while (true) {
            const bool bland = stalled > 50;
            int enter = -1;
            double best = -kPivotTol;
            for (int j = 0; j < art_start; ++j) {
                if (obj[j] < best) {
                    enter = j;
                    if (bland) break;
                    best = obj[j];
                }
            }
            if (enter < 0) return;
            // Lexicographic ratio test: strict row order breaks degenerate ties
            // so the basis cannot cycle.
            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < static_cast<int>(T.size()); ++i) {
                if (T[i][enter] <= kPivotTol) continue;
                const double ratio = T[i][ncols] / T[i][enter];
                if (leave < 0 || ratio < best_ratio - kPivotTol) {
                    best_ratio = ratio;
                    leave = i;
                } else if (ratio < best_ratio + kPivotTol) {
                    best_ratio = std::min(best_ratio, ratio);
                    for (int j : lex_order) {
                        const double a = T[i][j] / T[i][enter];
                        const double b = T[leave][j] / T[leave][enter];
                        if (a < b - 1e-12) {
                            leave = i;
                            break;
                        }
                        if (a > b + 1e-12) break;
                    }
                }
            }
            if (leave < 0) {
                *unbounded = true;
                return;
            }
            pivot(leave, enter);
            if (std::abs(obj[ncols] - last_val) > 1e-12) {
                stalled = 0;
                last_val = obj[ncols];
            } else {
                ++stalled;
            }
            if (++pivots > kMaxPivots) throw SolverError("simplex exceeded the pivot limit");
        }
    };

    LpSolution sol;
    bool unbounded = false;

    iterate(obj1, &unbounded);
    if (unbounded) throw SolverError("phase-1 LP is unbounded (internal error)");
    if (-obj1[ncols] > kFeasTol) {
        sol.status = LpStatus::Infeasible;
        return sol;
    }

    // Drive leftover artificials out of the basis; drop redundant rows.
    for (int i = static_cast<int>(T.size()) - 1; i >= 0; --i) {
        if (basis[i] < art_start) continue;
        int col = -1;
        for (int j = 0; j < art_start; ++j) {
            if (std::abs(T[i][j]) > kFeasTol) {
                col = j;
                break;
            }
        }
        if (col >= 0) {
            pivot(i, col);
        } else {
            T.erase(T.begin() + i);
            basis.erase(basis.begin() + i);
            row_origin.erase(row_origin.begin() + i);
        }
    }

    iterate(obj2, &unbounded);
    if (unbounded) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    sol.status = LpStatus::Optimal;
    sol.value = -obj2[ncols];
    std::vector<double> full(ncols, 0.0);
    for (int i = 0; i < static_cast<int>(T.size()); ++i) full[basis[i]] = T[i][ncols];
    sol.x.resize(nv);
    for (int j = 0; j < nv; ++j)
        sol.x[j] = full[j] - (neg_col[j] >= 0 ? full[neg_col[j]] : 0.0);

    // Dual of row i = -reduced cost of its artificial column (phase-2 cost 0),
    // sign-corrected for rows that were negated to make rhs nonnegative.
    sol.duals.assign(nr, 0.0);
    for (int i = 0; i < nr; ++i) {
        double y = -obj2[art_start + i];
        sol.duals[i] = flipped[i] ? -y : y;
    }
    return sol;
}

}  // namespace cmg
