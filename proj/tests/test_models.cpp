#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bullets/enumeration.hpp"
#include "bullets/errors.hpp"
#include "bullets/law.hpp"
#include "bullets/models.hpp"
#include "bullets/rng.hpp"

using namespace bullets;

namespace {

// Mean and standard error of a sample of counts.
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<long long>& xs) {
    double m = 0.0;
    for (const long long x : xs) m += static_cast<double>(x);
    m /= static_cast<double>(xs.size());
    double var = 0.0;
    for (const long long x : xs) var += (static_cast<double>(x) - m) * (static_cast<double>(x) - m);
    var /= static_cast<double>(xs.size() - 1);
    return {m, std::sqrt(var / static_cast<double>(xs.size()))};
}

SurvivorDistribution table_law(const CountTable& t) {
    SurvivorDistribution out;
    for (const auto& [k, c] : t.count) {
        out.n = std::max(out.n, k);
        out.mass[k] = Rat(c, t.total);
    }
    return out;
}

} // namespace

TEST_CASE("speed samplers draw exact rationals") {
    Rng rng(101);
    const SpeedSampler u = SpeedSampler::uniform01();
    for (int i = 0; i < 200; ++i) {
        const Rat v = u.draw(rng);
        CHECK(v.sign() >= 0);
        CHECK(v < Rat(1));
        // The rational is the exact value of the double it came from.
        CHECK(Rat::from_double(v.to_double()) == v);
    }

    const SpeedSampler e = SpeedSampler::exponential(2.0);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const Rat v = e.draw(rng);
        CHECK(v.sign() >= 0);
        sum += v.to_double();
    }
    CHECK(sum / 20000.0 == doctest::Approx(0.5).epsilon(0.05));

    const SpeedSampler t = SpeedSampler::table({Rat(1, 3), Rat(2, 3), Rat(5, 3)});
    for (int i = 0; i < 50; ++i) {
        const Rat v = t.draw(rng);
        CHECK((v == Rat(1, 3) || v == Rat(2, 3) || v == Rat(5, 3)));
    }
    const auto distinct = t.draw_distinct(3, rng);
    CHECK(distinct.size() == 3);
    CHECK_THROWS_AS(t.draw_distinct(4, rng), Invalid); // only three values exist

    CHECK_THROWS_AS(SpeedSampler::exponential(0.0), Invalid);
    CHECK_THROWS_AS(SpeedSampler::table({}), Invalid);
}

TEST_CASE("random-speed models: trivial sizes and parity") {
    Rng rng(7321);
    const SpeedSampler u = SpeedSampler::uniform01();
    CHECK(sample_ru(0, u, rng) == 0);
    CHECK(sample_ru(1, u, rng) == 1);
    CHECK(sample_rr(0, u, u, rng) == 0);
    CHECK(sample_rr(1, u, u, rng) == 1);
    for (int rep = 0; rep < 300; ++rep) {
        CHECK(sample_ru(7, u, rng) % 2 == 1);
        CHECK(sample_rr(6, u, u, rng) % 2 == 0);
    }
}

TEST_CASE("unit-delay empirical law matches the exact law") {
    Rng rng(0x9d2c5680u);
    const SpeedSampler u = SpeedSampler::uniform01();
    std::vector<int> ks;
    ks.reserve(100000);
    for (int i = 0; i < 100000; ++i) ks.push_back(sample_ru(10, u, rng));
    const Comparison c = compare_empirical(ks, q_exact(10));
    CHECK(c.tv < 0.02);
    CHECK(c.p_value > 1e-3);
}

TEST_CASE("random-delay empirical law matches the exact law and the unit-delay one") {
    Rng rng(0xa341316c00000001ULL);
    const SpeedSampler u = SpeedSampler::uniform01();
    const SpeedSampler e = SpeedSampler::exponential(1.0);
    std::vector<int> rr, ru;
    for (int i = 0; i < 100000; ++i) rr.push_back(sample_rr(8, u, e, rng));
    for (int i = 0; i < 100000; ++i) ru.push_back(sample_ru(8, u, rng));
    const Comparison c = compare_empirical(rr, q_exact(8));
    CHECK(c.tv < 0.02);
    CHECK(c.p_value > 1e-3);

    // The two empirical laws also sit within 0.02 of each other.
    std::map<int, double> ha, hb;
    for (const int k : rr) ha[k] += 1.0 / 100000.0;
    for (const int k : ru) hb[k] += 1.0 / 100000.0;
    double tv = 0.0;
    for (int k = 0; k <= 8; ++k) {
        const double a = ha.count(k) ? ha.at(k) : 0.0;
        const double b = hb.count(k) ? hb.at(k) : 0.0;
        tv += std::abs(a - b);
    }
    CHECK(tv / 2.0 < 0.02);
}

TEST_CASE("fixed-parameter sampler matches the exhaustive sweep") {
    Parameter p;
    p.speeds = {Rat(1), Rat(10), Rat(11), Rat(12), Rat(25, 2), Rat(13)};
    p.delays = {Rat(1), Rat(2, 7), Rat(5, 11), Rat(3, 13), Rat(7, 17)};
    const FfSampler sampler(p); // certifies genericity once
    const SurvivorDistribution exact = table_law(enumerate_ff(p));

    Rng rng(0xc0ffee);
    std::vector<int> ks;
    for (int i = 0; i < 100000; ++i) ks.push_back(sampler(rng));
    const Comparison c = compare_empirical(ks, exact);
    CHECK(c.tv < 0.02);
    CHECK(c.p_value > 1e-3);

    Parameter singular;
    singular.speeds = {Rat(1), Rat(2), Rat(3)};
    singular.delays = {Rat(1), Rat(1, 3)};
    CHECK_THROWS_AS(FfSampler{singular}, NotGeneric);
}

TEST_CASE("accelerating bullets reduce exactly to the linear problem") {
    ImpetusProblem ip;
    ip.impetuses = {Rat(1), Rat(10), Rat(11), Rat(12), Rat(25, 2), Rat(13)};
    ip.delays = {Rat(1), Rat(2, 7), Rat(5, 11), Rat(3, 13), Rat(7, 17)};

    Parameter linear;
    linear.speeds = ip.impetuses;
    linear.delays = ip.delays;
    const FfSampler ff(linear);

    // The identity profile reproduces the linear sampler draw for draw.
    ip.f.kind = Acceleration::Kind::Custom;
    ip.f.graph = {{0.0, 0.0}, {1.0, 1.0}};
    {
        const FafSampler faf(ip);
        Rng ra(42), rb(42);
        for (int i = 0; i < 1000; ++i) CHECK(faf(ra) == ff(rb));
    }

    // Monotone profiles leave the survivor set untouched.
    for (const auto kind :
         {Acceleration::Kind::Square, Acceleration::Kind::Sqrt, Acceleration::Kind::OneMinusExp}) {
        ip.f = Acceleration{kind, {}};
        const FafSampler faf(ip);
        Rng ra(4242), rb(4242);
        for (int i = 0; i < 1000; ++i) {
            const Diagram da = faf.sample_diagram(ra);
            const Diagram db = ff.sample_diagram(rb);
            REQUIRE(da.survivors == db.survivors);
        }
        Rng audit_rng(77);
        CHECK(faf.audit(1000, audit_rng));
    }
}

TEST_CASE("impetus problem validation") {
    ImpetusProblem ip;
    ip.impetuses = {Rat(1), Rat(2)};
    ip.delays = {Rat(1)};
    CHECK_NOTHROW(ip.validate());

    ImpetusProblem bad = ip;
    bad.impetuses = {Rat(1), Rat(1)};
    CHECK_THROWS_AS(bad.validate(), Invalid);
    bad = ip;
    bad.impetuses = {Rat(0), Rat(1)};
    CHECK_THROWS_AS(bad.validate(), Invalid);
    bad = ip;
    bad.delays = {Rat(-1)};
    CHECK_THROWS_AS(bad.validate(), Invalid);

    bad = ip;
    bad.f.kind = Acceleration::Kind::Custom;
    bad.f.graph = {{0.0, 0.0}, {1.0, 2.0}, {2.0, 1.5}}; // not increasing
    CHECK_THROWS_AS(bad.validate(), Invalid);
    bad.f.graph = {{0.0, 0.5}, {1.0, 2.0}}; // f(0) != 0
    CHECK_THROWS_AS(bad.validate(), Invalid);
    bad.f.graph = {{0.0, 0.0}, {1.0, 2.0}, {3.0, 4.5}};
    CHECK_NOTHROW(bad.validate());
    CHECK(bad.f(0.5) == doctest::Approx(1.0));
    CHECK(bad.f(2.0) == doctest::Approx(3.25)); // interpolated on the second segment
}

TEST_CASE("flock runs by hand") {
    const FlockRun r = flock_run({0.5, 0.3, 0.7});
    CHECK(r.sizes == std::vector<int>{1, 2, 1});
    CHECK(r.final_size == 1);

    // Strictly decreasing speeds: every bullet is a new slowest.
    const FlockRun d = flock_run({5.0, 4.0, 3.0, 2.0, 1.0});
    CHECK(d.final_size == 5);

    CHECK_THROWS_AS(flock_run({1.0, 1.0}), Invalid);
    CHECK(flock_run({}).final_size == 0);
}

TEST_CASE("flock final sizes over all orderings follow the exact law") {
    for (int n = 1; n <= 8; ++n) {
        std::vector<double> speeds(static_cast<std::size_t>(n));
        std::iota(speeds.begin(), speeds.end(), 1.0);
        std::map<int, long long> hist;
        long long total = 0;
        do {
            const FlockRun r = flock_run(speeds);
            hist[r.final_size] += 1;
            ++total;
            // Sizes alternate parity with the step index.
            for (std::size_t j = 0; j < r.sizes.size(); ++j)
                REQUIRE((r.sizes[j] - static_cast<int>(j) - 1) % 2 == 0);
        } while (std::next_permutation(speeds.begin(), speeds.end()));
        REQUIRE(total == factorial(n));
        const SurvivorDistribution q = q_exact(n);
        for (int k = 0; k <= n; ++k) {
            const Rat freq(hist.count(k) ? hist.at(k) : 0, total);
            CHECK(freq == q(k));
        }
    }
}

TEST_CASE("a long flock run returns to empty") {
    Rng rng(0xfeedface);
    std::vector<double> speeds;
    speeds.reserve(100000);
    for (int i = 0; i < 100000; ++i) speeds.push_back(rng.unit());
    const FlockRun r = flock_run(speeds);
    bool returned = false;
    for (std::size_t j = 10; j < r.sizes.size(); ++j) returned = returned || r.sizes[j] == 0;
    CHECK(returned);
}

TEST_CASE("flock destruction times") {
    Rng rng(0xdeadbeef);
    for (int i = 0; i < 20; ++i) CHECK(flock_destruction_time(0.0, rng) == 1);
    CHECK_THROWS_AS(flock_destruction_time(1.0, rng), Invalid);
    CHECK_THROWS_AS(flock_destruction_time(-0.1, rng), Invalid);

    // Sample means against the closed form 1/(1-x)^2.
    std::vector<long long> at_half, at_nine;
    for (int i = 0; i < 1000000; ++i) at_half.push_back(flock_destruction_time(0.5, rng));
    for (int i = 0; i < 1000000; ++i) at_nine.push_back(flock_destruction_time(0.9, rng));
    const MeanSe h = mean_se(at_half);
    CHECK(std::abs(h.mean - 4.0) < 3.0 * h.se);
    const MeanSe n9 = mean_se(at_nine);
    CHECK(std::abs(n9.mean - 100.0) < 3.0 * n9.se);
}

TEST_CASE("destruction times satisfy the shielding identity") {
    // E[T_x] = 1 + x (E[T_{Ux}] + E[T_x]) with U uniform on [0,1].
    Rng rng(0x5eed5eed);
    for (const double x : {0.25, 0.5}) {
        std::vector<long long> direct, shielded;
        for (int i = 0; i < 400000; ++i) direct.push_back(flock_destruction_time(x, rng));
        for (int i = 0; i < 400000; ++i)
            shielded.push_back(flock_destruction_time(rng.unit() * x, rng));
        const MeanSe d = mean_se(direct);
        const MeanSe s = mean_se(shielded);
        const double rhs = 1.0 + x * (s.mean + d.mean);
        const double tolerance = 3.0 * std::sqrt(d.se * d.se + x * x * (s.se * s.se + d.se * d.se));
        CHECK(std::abs(d.mean - rhs) < tolerance);
    }
}

TEST_CASE("odd cycle counts") {
    CHECK(odd_cycle_count({0, 1, 2}) == 3);       // identity: three fixed points
    CHECK(odd_cycle_count({1, 2, 0}) == 1);       // one 3-cycle
    CHECK(odd_cycle_count({0, 2, 1}) == 1);       // fixed point + 2-cycle
    CHECK(odd_cycle_count({}) == 0);
    CHECK_THROWS_AS(odd_cycle_count({0, 0}), Invalid);
    CHECK_THROWS_AS(odd_cycle_count({1, 2}), Invalid);
}

TEST_CASE("odd cycles over the whole symmetric group follow the exact law") {
    for (int n = 1; n <= 8; ++n) {
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        std::map<int, long long> hist;
        long long total = 0;
        do {
            const int z = odd_cycle_count(perm);
            REQUIRE((z - n) % 2 == 0);
            hist[z] += 1;
            ++total;
        } while (std::next_permutation(perm.begin(), perm.end()));
        const SurvivorDistribution q = q_exact(n);
        for (int k = 0; k <= n; ++k) {
            const Rat freq(hist.count(k) ? hist.at(k) : 0, total);
            CHECK(freq == q(k));
        }
    }
}

TEST_CASE("matrix extremes by hand") {
    CHECK(matrix_extremes_run({{1, 2}, {3, 4}}) == 2);
    CHECK(matrix_extremes_run({{2, 1}, {3, 4}}) == 0);
    CHECK(matrix_extremes_run({{5}}) == 1); // a 1x1 round is forcibly diagonal
    CHECK(matrix_extremes_run({}) == 0);
    CHECK_THROWS_AS(matrix_extremes_run({{1, 2}, {3, 4}, {5, 6}}), Invalid);
    CHECK_THROWS_AS(matrix_extremes_run({{1, 2}, {2, 4}}), Invalid);
}

TEST_CASE("matrix extremes sampling matches the exact law") {
    Rng rng(0xbadcafe);
    std::vector<int> ks;
    ks.reserve(100000);
    std::vector<std::vector<double>> m(8, std::vector<double>(8));
    for (int rep = 0; rep < 100000; ++rep) {
        for (auto& row : m)
            for (double& x : row) x = rng.unit();
        const int k = matrix_extremes_run(m);
        REQUIRE(k % 2 == 0);
        ks.push_back(k);
    }
    const Comparison c = compare_empirical(ks, q_exact(8));
    CHECK(c.tv < 0.02);
    CHECK(c.p_value > 1e-3);
}

TEST_CASE("two-step distances by hand and by recurrence") {
    CHECK(two_step_distance({1, 1, 1, 1}) == 4); // every step red
    CHECK(two_step_distance({1, 0}) == 0);       // 2 -> 0 in one black step
    CHECK(two_step_distance({1, 1, 0}) == 1);    // 3 -> 1 -> 0
    CHECK(two_step_distance({}) == 0);
    CHECK_THROWS_AS(two_step_distance({0}), Invalid);
    CHECK_THROWS_AS(two_step_distance({0, 0, 1}), Invalid); // path 3 -> 1 needs B_1 = 1

    // One realization: distances from every start node obey
    // D_m = B_m (1 + D_{m-1}) + (1 - B_m) D_{m-2}, and the even- and
    // odd-indexed subsequences are non-decreasing.
    Rng rng(0x1234321);
    std::vector<unsigned char> b{1};
    for (int m = 2; m <= 200; ++m)
        b.push_back(rng.bernoulli_inv(static_cast<std::uint64_t>(m)) ? 1 : 0);
    std::vector<int> dist(201, 0);
    for (int m = 1; m <= 200; ++m) {
        dist[static_cast<std::size_t>(m)] =
            b[static_cast<std::size_t>(m - 1)]
                ? 1 + dist[static_cast<std::size_t>(m - 1)]
                : dist[static_cast<std::size_t>(m - 2)];
        const std::vector<unsigned char> prefix(b.begin(), b.begin() + m);
        REQUIRE(two_step_distance(prefix) == dist[static_cast<std::size_t>(m)]);
    }
    for (int m = 2; m <= 200; ++m) CHECK(dist[static_cast<std::size_t>(m)] >= dist[static_cast<std::size_t>(m - 2)]);
}

TEST_CASE("two-step law by convolution equals the survivor law") {
    for (const int n : {0, 1, 2, 3, 10, 100, 500}) {
        const SurvivorDistribution a = two_step_law(n);
        const SurvivorDistribution b = q_exact(n);
        REQUIRE(a.mass.size() == b.mass.size());
        for (const auto& [k, mass] : a.mass) CHECK(mass == b(k));
    }
}

TEST_CASE("two-step path sampler matches the exact law") {
    Rng rng(0x777);
    CHECK(sample_two_step(0, rng) == 0);
    CHECK(sample_two_step(1, rng) == 1);
    std::vector<int> ks;
    ks.reserve(100000);
    for (int i = 0; i < 100000; ++i) ks.push_back(sample_two_step(10, rng));
    const Comparison c = compare_empirical(ks, q_exact(10));
    CHECK(c.tv < 0.02);
    CHECK(c.p_value > 1e-3);
}

TEST_CASE("large-n sampled moments approach the exact moments") {
    // Mean and variance of 20000 path-walk samples at n = 10^4, against the
    // float recurrence for the exact law.
    const long n = 10000;
    const FloatMoments m = q_moments_float(n);
    Rng rng(0x31337);
    std::vector<long long> ks;
    for (int i = 0; i < 20000; ++i) ks.push_back(sample_two_step(n, rng));
    const MeanSe s = mean_se(ks);
    double var = 0.0;
    for (const long long k : ks) var += (static_cast<double>(k) - s.mean) * (static_cast<double>(k) - s.mean);
    var /= static_cast<double>(ks.size() - 1);
    CHECK(std::abs(s.mean - m.mean) / m.mean < 0.1);
    CHECK(std::abs(var - m.variance) / m.variance < 0.1);
}

TEST_CASE("empirical comparison utilities") {
    CHECK_THROWS_AS(compare_empirical({}, q_exact(4)), EmptySample);

    // Counts exactly proportional to the law: zero distance, p-value 1 by
    // construction of the statistic.
    std::vector<int> exact24;
    for (int i = 0; i < 9; ++i) exact24.push_back(0);
    for (int i = 0; i < 14; ++i) exact24.push_back(2);
    exact24.push_back(4);
    const Comparison same = compare_empirical(exact24, q_exact(4));
    CHECK(same.tv == doctest::Approx(0.0));
    CHECK(same.chi_square == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(same.p_value > 0.99);

    // Degenerate mismatch: all samples at the rarest support point.
    const std::vector<int> all_ten(1000, 10);
    const Comparison degen = compare_empirical(all_ten, q_exact(10));
    CHECK(degen.tv > 0.9);
    CHECK(degen.p_value < 1e-6);

    // Observations outside the support: impossible odd value under q_4.
    const Comparison outside = compare_empirical({3, 0, 2}, q_exact(4));
    CHECK(outside.p_value == 0.0);
    CHECK(std::isinf(outside.chi_square));
}

TEST_CASE("comparison is calibrated on true draws") {
    Rng rng(0xcaca0);
    const SurvivorDistribution q10 = q_exact(10);
    int good = 0;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<int> ks;
        ks.reserve(100000);
        Rng sub = rng.derive(static_cast<std::uint64_t>(rep));
        for (int i = 0; i < 100000; ++i) ks.push_back(sample_markov(10, sub));
        if (compare_empirical(ks, q10).p_value > 1e-3) ++good;
    }
    CHECK(good >= 99);
}
