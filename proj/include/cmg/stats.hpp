#pragma once

#include <vector>

namespace cmg {

double mean(const std::vector<double>& v);
double sample_std(const std::vector<double>& v);

struct PairedTTest {
    double t = 0.0;
    double p_value = 1.0;  // one-sided, H1: mean(a) < mean(b)
    int dof = 0;
    double mean_diff = 0.0;
};

// Paired one-sided t-test of H1: mean(a - b) < 0.
PairedTTest paired_t_test_less(const std::vector<double>& a, const std::vector<double>& b);

// CDF of Student's t with dof degrees of freedom.
double student_t_cdf(double t, int dof);

}  // namespace cmg
