#include <doctest.h>

#include <stdexcept>

#include "cmg/stats.hpp"

using namespace cmg;

TEST_SUITE("stats") {

TEST_CASE("mean and sample standard deviation") {
    CHECK(mean({1.0, 2.0, 3.0, 4.0}) == doctest::Approx(2.5));
    CHECK(sample_std({2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) ==
          doctest::Approx(2.138089935).epsilon(1e-8));
    CHECK_THROWS_AS(mean({}), std::invalid_argument);
    CHECK_THROWS_AS(sample_std({1.0}), std::invalid_argument);
}

TEST_CASE("student t cdf against reference values") {
    // Reference values from standard t tables.
    CHECK(student_t_cdf(0.0, 5) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(student_t_cdf(2.015, 5) == doctest::Approx(0.95).epsilon(1e-3));
    CHECK(student_t_cdf(-2.015, 5) == doctest::Approx(0.05).epsilon(2e-2));
    CHECK(student_t_cdf(1.725, 20) == doctest::Approx(0.95).epsilon(1e-3));
    CHECK(student_t_cdf(2.528, 20) == doctest::Approx(0.99).epsilon(1e-3));
    CHECK(student_t_cdf(12.706, 1) == doctest::Approx(0.975).epsilon(1e-3));
}

TEST_CASE("paired test flags a consistent improvement") {
    std::vector<double> a = {1.0, 1.1, 0.9, 1.05, 0.95, 1.02, 0.98, 1.07, 0.93, 1.01};
    std::vector<double> b;
    for (double v : a) b.push_back(v + 0.1);
    PairedTTest t = paired_t_test_less(a, b);
    CHECK(t.mean_diff == doctest::Approx(-0.1));
    CHECK(t.p_value < 1e-6);

    PairedTTest rev = paired_t_test_less(b, a);
    CHECK(rev.p_value > 0.999);
}

TEST_CASE("paired test is inconclusive on identical noise") {
    std::vector<double> a = {1.0, 2.0, 3.0, 4.0, 5.0};
    PairedTTest t = paired_t_test_less(a, a);
    CHECK(t.p_value == doctest::Approx(0.5));
}

TEST_CASE("paired test needs matched samples") {
    CHECK_THROWS_AS(paired_t_test_less({1.0, 2.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(paired_t_test_less({1.0}, {2.0}), std::invalid_argument);
}

}  // TEST_SUITE
