#pragma once

#include <cstdint>
#include <vector>

namespace cmg {

enum class LpStatus { Optimal, Infeasible, Unbounded };

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct LpRow {
    std::vector<double> coeffs;
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
};

// min c'x subject to the rows; variables are >= 0 unless marked free.
struct LinearProgramSpec {
    std::vector<double> objective;
    std::vector<LpRow> rows;
    std::vector<uint8_t> free_vars;  // empty, or one flag per variable

    size_t num_vars() const { return objective.size(); }
    void validate() const;  // dimension consistency
};

struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    double value = 0.0;
    std::vector<double> x;
    // One multiplier per constraint row, signed so that
    // value == sum_i duals[i]*rhs[i] for LPs whose objective has no constant.
    std::vector<double> duals;
};

// Dense two-phase simplex with Bland's anti-cycling rule.
LpSolution solve_linear_program(const LinearProgramSpec& lp);

}  // namespace cmg
