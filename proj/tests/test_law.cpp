#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "bullets/law.hpp"

using namespace bullets;

TEST_CASE("hand-checked small laws") {
    auto q0 = q_exact(0);
    REQUIRE(q0.mass.size() == 1);
    CHECK(q0(0) == Rat(1));

    auto q1 = q_exact(1);
    REQUIRE(q1.mass.size() == 1);
    CHECK(q1(1) == Rat(1));

    auto q2 = q_exact(2);
    REQUIRE(q2.mass.size() == 2);
    CHECK(q2(0) == Rat(1, 2));
    CHECK(q2(2) == Rat(1, 2));

    auto q3 = q_exact(3);
    REQUIRE(q3.mass.size() == 2);
    CHECK(q3(1) == Rat(5, 6));
    CHECK(q3(3) == Rat(1, 6));

    auto q4 = q_exact(4);
    REQUIRE(q4.mass.size() == 3);
    CHECK(q4(0) == Rat(3, 8));
    CHECK(q4(2) == Rat(7, 12));
    CHECK(q4(4) == Rat(1, 24));
}

TEST_CASE("exact normalization and parity support up to n = 500") {
    auto laws = q_exact_upto(500);
    REQUIRE(laws.size() == 501);
    for (int n = 0; n <= 500; ++n) {
        const auto& d = laws[static_cast<std::size_t>(n)];
        CHECK(d.n == n);
        Rat total;
        for (const auto& [k, p] : d.mass) {
            total += p;
            CHECK(p.sign() > 0);
            CHECK(k >= 0);
            CHECK(k <= n);
            CHECK((k % 2) == (n % 2));
        }
        CHECK(total == Rat(1));
    }
}

TEST_CASE("batch and single computations agree") {
    auto laws = q_exact_upto(30);
    for (int n : {5, 17, 30}) {
        auto single = q_exact(n);
        CHECK(single.mass == laws[static_cast<std::size_t>(n)].mass);
    }
}

TEST_CASE("even laws hit zero with the double-factorial product") {
    auto laws = q_exact_upto(200);
    Rat prod(1);
    for (int m = 1; m <= 100; ++m) {
        prod *= Rat(1) - Rat(1, 2L * m);
        CHECK(laws[static_cast<std::size_t>(2 * m)](0) == prod);
    }
}

TEST_CASE("exact moments of small laws") {
    auto [m2, v2] = q_moments_exact(2);
    CHECK(m2 == Rat(1));
    CHECK(v2 == Rat(1));
    auto [m3, v3] = q_moments_exact(3);
    CHECK(m3 == Rat(4, 3));
    CHECK(v3 == Rat(5, 9)); // E[X²] = 5/6 + 3/2 = 7/3; 7/3 − 16/9
    CHECK_THROWS_AS(q_moments_exact(100, 50), SizeLimit);
}

TEST_CASE("floating recurrences track the exact moments") {
    for (int n : {1, 2, 3, 10, 100, 500}) {
        auto [em, ev] = q_moments_exact(n);
        FloatMoments f = q_moments_float(n);
        CHECK(std::abs(f.mean - em.to_double()) < 1e-9);
        CHECK(std::abs(f.variance - ev.to_double()) < 1e-9);
    }
}

TEST_CASE("floating skewness matches the exact law at n = 1000") {
    // Independent route: third central moment straight from the exact mass.
    auto d = q_exact(1000);
    double m1 = 0, m2 = 0, m3 = 0;
    for (const auto& [k, p] : d.mass) {
        double x = k, w = p.to_double();
        m1 += x * w;
        m2 += x * x * w;
        m3 += x * x * x * w;
    }
    double var = m2 - m1 * m1;
    double skew_exact = (m3 - 3 * m1 * m2 + 2 * m1 * m1 * m1) / std::pow(var, 1.5);
    FloatMoments f = q_moments_float(1000);
    CHECK(std::abs(f.mean - m1) < 1e-9);
    CHECK(std::abs(f.variance - var) < 1e-9);
    CHECK(std::abs(f.skewness - skew_exact) < 1e-9);
    CHECK(f.skewness == doctest::Approx(0.4413).epsilon(0.01));
}

TEST_CASE("mean and variance grow like half the logarithm") {
    FloatMoments f = q_moments_float(1000000);
    const double half_log = 0.5 * std::log(1e6);
    CHECK(std::abs(f.mean - half_log) <= 1.0);
    CHECK(std::abs(f.variance - half_log) <= 1.5);
    // The skewness decays (slowly) as n grows.
    double s3 = q_moments_float(1000).skewness;
    double s4 = q_moments_float(10000).skewness;
    double s5 = q_moments_float(100000).skewness;
    CHECK(s3 > s4);
    CHECK(s4 > s5);
    CHECK(s5 > 0);
}

TEST_CASE("chain sampler") {
    SUBCASE("degenerate sizes") {
        Rng rng(1);
        CHECK(sample_markov(0, rng) == 0);
        CHECK(sample_markov(1, rng) == 1);
    }
    SUBCASE("parity equals the parity of n") {
        Rng rng(424242);
        for (int trial = 0; trial < 500; ++trial) {
            int n = static_cast<int>(rng.below(40));
            Rng sub = rng.derive(trial);
            CHECK(sample_markov(n, sub) % 2 == n % 2);
        }
    }
    SUBCASE("empirical law at n = 10 is close to the exact one") {
        const int kSamples = 100000;
        auto d = q_exact(10);
        std::map<int, long> counts;
        Rng rng(20240601);
        for (int i = 0; i < kSamples; ++i) {
            Rng sub = rng.derive(static_cast<std::uint64_t>(i));
            ++counts[sample_markov(10, sub)];
        }
        double tv = 0;
        for (int k = 0; k <= 10; ++k) {
            double emp = counts.count(k) ? static_cast<double>(counts[k]) / kSamples : 0.0;
            tv += std::abs(emp - d(k).to_double());
        }
        tv /= 2;
        CHECK(tv < 0.02);
    }
}
