#include "cmg/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace cmg {

double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean of empty vector");
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) throw std::invalid_argument("sample_std needs at least 2 values");
    const double mu = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / (v.size() - 1));
}

namespace {

// Regularized incomplete beta via Lentz's continued fraction.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14, kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

double inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_cdf(double t, int dof) {
    if (dof <= 0) throw std::invalid_argument("t cdf needs positive dof");
    const double x = dof / (dof + t * t);
    const double tail = 0.5 * inc_beta(0.5 * dof, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

PairedTTest paired_t_test_less(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("paired t-test needs matched samples, at least 2");
    std::vector<double> d(a.size());
    for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    PairedTTest out;
    out.dof = static_cast<int>(d.size()) - 1;
    out.mean_diff = mean(d);
    const double sd = sample_std(d);
    if (sd == 0.0) {
        out.t = out.mean_diff < 0.0 ? -1e30 : (out.mean_diff > 0.0 ? 1e30 : 0.0);
        out.p_value = out.mean_diff < 0.0 ? 0.0 : (out.mean_diff > 0.0 ? 1.0 : 0.5);
        return out;
    }
    out.t = out.mean_diff / (sd / std::sqrt(static_cast<double>(d.size())));
    out.p_value = student_t_cdf(out.t, out.dof);
    return out;
}

}  // namespace cmg
