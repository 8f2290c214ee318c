#include "doctest.h"
#include "oracles.hpp"

#include "cornn/error.hpp"
#include "cornn/stats.hpp"

#include <cmath>
#include <random>

using namespace cornn;

namespace {

std::vector<double> draw(std::mt19937_64& gen, std::size_t n, double shift, bool ties) {
    std::normal_distribution<double> nd(shift, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = ties ? std::round(nd(gen) * 2.0) / 2.0 : nd(gen);
    return v;
}

} // namespace

TEST_CASE("worked examples") {
    const std::vector<double> a = {1, 2, 3}, b = {4, 5, 6};
    const auto r = mann_whitney(a, b, UTestMethod::Exact);
    CHECK(r.u_statistic == 0.0);
    CHECK(r.p_one_tailed_a_less == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(r.p_two_tailed == doctest::Approx(0.1).epsilon(1e-15));

    const std::vector<double> c = {1, 3, 5}, d = {2, 4, 6};
    CHECK(u_statistic(c, d) == 3.0);

    const std::vector<double> same = {0.2, 0.2, 0.2, 0.2};
    for (auto method : {UTestMethod::Exact, UTestMethod::NormalApproxTieCorrected}) {
        CHECK(mann_whitney(same, same, method).p_two_tailed == 1.0);
        CHECK(compare(same, same, 0.5, method) == Outcome::Draw);
    }
}

TEST_CASE("midranks") {
    const std::vector<double> v = {3.0, 1.0, 3.0, 2.0, 3.0};
    CHECK(midranks(v) == std::vector<double>{4.0, 1.0, 4.0, 2.0, 4.0});
}

TEST_CASE("U statistic matches pair counting and sums to mn") {
    std::mt19937_64 gen(1);
    for (int rep = 0; rep < 200; ++rep) {
        const auto a = draw(gen, 1 + rep % 13, 0.0, rep % 2 == 0);
        const auto b = draw(gen, 1 + rep % 7, 0.3, rep % 2 == 0);
        const double ua = u_statistic(a, b);
        CHECK(ua == oracle::pair_count_u(a, b));
        CHECK(ua + u_statistic(b, a) == static_cast<double>(a.size() * b.size()));
    }
}

TEST_CASE("exact p-values equal brute-force enumeration") {
    std::mt19937_64 gen(2);
    for (std::size_t m = 1; m <= 8; ++m) {
        for (std::size_t n = 1; n <= 8; ++n) {
            for (int rep = 0; rep < 5; ++rep) {
                const auto a = draw(gen, m, 0.0, rep % 2 == 1);
                const auto b = draw(gen, n, 0.5, rep % 2 == 1);
                const auto r = mann_whitney(a, b, UTestMethod::Exact);
                const auto o = oracle::brute_force_p(a, b);
                CAPTURE(m);
                CAPTURE(n);
                CHECK(r.p_one_tailed_a_less == doctest::Approx(o.one_tailed_a_less).epsilon(1e-12));
                CHECK(r.p_two_tailed == doctest::Approx(o.two_tailed).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("normal approximation tracks a permutation estimate") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> shift(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const auto a = draw(gen, 30, 0.0, rep % 2 == 1);
        const auto b = draw(gen, 30, shift(gen), rep % 2 == 1);
        const double mc = oracle::monte_carlo_two_tailed(a, b, 20000, gen);
        CHECK(std::abs(mann_whitney(a, b).p_two_tailed - mc) <= 0.02);
    }
}

TEST_CASE("invariance under monotone transforms") {
    std::mt19937_64 gen(4);
    const auto a = draw(gen, 11, 0.0, false);
    const auto b = draw(gen, 9, 0.7, false);
    std::vector<double> ea, eb;
    for (double x : a) ea.push_back(std::exp(3.0 * x) + 7.0);
    for (double x : b) eb.push_back(std::exp(3.0 * x) + 7.0);
    for (auto method : {UTestMethod::Exact, UTestMethod::NormalApproxTieCorrected}) {
        const auto r = mann_whitney(a, b, method);
        const auto s = mann_whitney(ea, eb, method);
        CHECK(r.u_statistic == s.u_statistic);
        CHECK(r.p_two_tailed == s.p_two_tailed);
        CHECK(r.p_one_tailed_a_less == s.p_one_tailed_a_less);
    }
}

TEST_CASE("compare decisions") {
    std::vector<double> low, high;
    for (int i = 0; i < 30; ++i) {
        low.push_back(0.01 + 1e-4 * i);
        high.push_back(0.5 + 1e-3 * i);
    }
    CHECK(compare(low, high) == Outcome::AWins);
    CHECK(compare(high, low) == Outcome::BWins);

    std::mt19937_64 gen(5);
    for (int rep = 0; rep < 100; ++rep) {
        const auto a = draw(gen, 10, 0.0, rep % 3 == 0);
        const auto b = draw(gen, 10, 0.8, rep % 3 == 0);
        const auto ab = compare(a, b);
        const auto ba = compare(b, a);
        CHECK((ab == Outcome::AWins) == (ba == Outcome::BWins));
        CHECK((ab == Outcome::Draw) == (ba == Outcome::Draw));
    }

    // p exactly at alpha is not significant.
    const std::vector<double> a = {1, 2, 3}, b = {4, 5, 6};
    const double p = mann_whitney(a, b, UTestMethod::Exact).p_two_tailed;
    CHECK(compare(a, b, p, UTestMethod::Exact) == Outcome::Draw);
    CHECK(compare(a, b, std::nextafter(p, 1.0), UTestMethod::Exact) == Outcome::AWins);
}

TEST_CASE("input validation") {
    const std::vector<double> empty, one = {1.0}, nan = {std::nan("")};
    CHECK_THROWS_AS(mann_whitney(empty, one), InvalidArgument);
    CHECK_THROWS_AS(mann_whitney(nan, one), InvalidArgument);
    const std::vector<double> big(11, 1.0);
    CHECK_THROWS_AS(mann_whitney(big, big, UTestMethod::Exact), InvalidArgument);
    CHECK_THROWS_AS(compare(one, one, 0.0), InvalidArgument);
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-12));
}
