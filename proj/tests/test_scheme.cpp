#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "bullets/rng.hpp"
#include "bullets/scheme.hpp"

using namespace bullets;

namespace {

Parameter param(std::vector<Rat> speeds, std::vector<Rat> delays) {
    Parameter p;
    p.speeds = std::move(speeds);
    p.delays = std::move(delays);
    p.validate();
    return p;
}

/// Random parameter with dyadic entries; 30-bit numerators make accidental
/// three-line concurrency astronomically unlikely.
Parameter random_param(Rng& rng, int n, bool zero_first = false) {
    std::set<unsigned long> nums;
    while (static_cast<int>(nums.size()) < n) nums.insert(rng.below(1u << 30));
    Parameter p;
    for (unsigned long u : nums) p.speeds.push_back(Rat(static_cast<long>(u), 1L << 20));
    if (zero_first) p.speeds.front() = Rat(0);
    for (int i = 0; i + 1 < n; ++i)
        p.delays.push_back(Rat(static_cast<long>(rng.below(1u << 20)) + 1, 1L << 10));
    p.validate();
    return p;
}

/// Applies f to every configuration (sigma, tau) of an n-bullet parameter.
template <typename F>
void for_each_configuration(int n, F&& f) {
    std::vector<int> sigma(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) sigma[i] = i;
    do {
        std::vector<int> tau(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
        for (int i = 0; i + 1 < n; ++i) tau[i] = i;
        do {
            f(Configuration{sigma, tau});
        } while (std::next_permutation(tau.begin(), tau.end()));
    } while (std::next_permutation(sigma.begin(), sigma.end()));
}

/// Multiplies every speed by an exact relative factor 1 + delta with
/// |delta| <= 2^-40, resampling until the result is a generic parameter.
Parameter perturb_generic(Rng& rng, const Parameter& p) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Parameter q;
        q.delays = p.delays;
        for (const Rat& v : p.speeds) {
            double mag = std::ldexp(static_cast<double>(rng.below(1ull << 40)) - std::ldexp(1, 39),
                                    -79);
            q.speeds.push_back(v * (Rat(1) + Rat::from_double(mag)));
        }
        bool ordered = true;
        for (std::size_t i = 1; i < q.speeds.size(); ++i)
            ordered = ordered && q.speeds[i - 1] < q.speeds[i];
        if (!ordered || q.speeds.front().sign() < 0) continue;
        if (!is_generic(q)) continue;
        return q;
    }
    throw std::runtime_error("perturbation kept failing; generator is broken");
}

} // namespace

TEST_CASE("pattern scan on hand-checked parameters") {
    SUBCASE("V=(1,2,3), delays (1,2): no concurrency anywhere") {
        auto pats = find_critical_patterns(param({Rat(1), Rat(2), Rat(3)}, {Rat(1), Rat(2)}));
        CHECK(pats.empty());
        CHECK(is_generic(param({Rat(1), Rat(2), Rat(3)}, {Rat(1), Rat(2)})));
    }
    SUBCASE("V=(1,2,3), delays (1,1/3): exactly one bi-triangle") {
        auto pats =
            find_critical_patterns(param({Rat(1), Rat(2), Rat(3)}, {Rat(1), Rat(1, 3)}));
        REQUIRE(pats.size() == 1);
        const CriticalPattern& cp = pats[0];
        CHECK(cp.v_m == Rat(1));
        CHECK(cp.v_l == Rat(2));
        CHECK(cp.v_r == Rat(3));
        CHECK(cp.d_l == Rat(1));
        CHECK(cp.d_r == Rat(1, 3));
        CHECK(cp.left_indices == std::vector<int>{0});
        CHECK(cp.right_indices == std::vector<int>{1});
        CHECK(cp.triple_height == Rat(2));
        CHECK(cp.minimal);
        CHECK(!is_generic(param({Rat(1), Rat(2), Rat(3)}, {Rat(1), Rat(1, 3)})));
    }
    SUBCASE("two bullets admit no triple") {
        CHECK(find_critical_patterns(param({Rat(1), Rat(2)}, {Rat(1)})).empty());
        CHECK(is_generic(param({Rat(1), Rat(2)}, {Rat(1)})));
    }
    SUBCASE("exhaustive bound is enforced") {
        CHECK_THROWS_AS(
            find_critical_patterns(param({Rat(1), Rat(2), Rat(3)}, {Rat(1), Rat(2)}), 2),
            SizeLimit);
    }
}

TEST_CASE("random rational parameters are generic") {
    Rng rng(46811);
    for (int draw = 0; draw < 100; ++draw) {
        Rng sub = rng.derive(draw);
        CHECK(is_generic(random_param(sub, 5)));
    }
}

TEST_CASE("pattern scan commutes with similarity scaling") {
    Parameter p = param({Rat(1), Rat(2), Rat(3)}, {Rat(1), Rat(1, 3)});
    Rat c(5, 3);
    Parameter q;
    for (const Rat& v : p.speeds) q.speeds.push_back(v * c);
    for (const Rat& d : p.delays) q.delays.push_back(d * c);
    auto a = find_critical_patterns(p);
    auto b = find_critical_patterns(q);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(b[i].v_m == a[i].v_m * c);
        CHECK(b[i].v_l == a[i].v_l * c);
        CHECK(b[i].v_r == a[i].v_r * c);
        CHECK(b[i].d_l == a[i].d_l * c);
        CHECK(b[i].d_r == a[i].d_r * c);
        CHECK(b[i].left_indices == a[i].left_indices);
        CHECK(b[i].right_indices == a[i].right_indices);
        CHECK(b[i].triple_height == a[i].triple_height * c * c);
        CHECK(b[i].minimal == a[i].minimal);
    }
}

TEST_CASE("sign table of a two-bullet configuration is the collision bit") {
    Parameter p = param({Rat(1), Rat(2)}, {Rat(1)});
    TcsTable meet = compute_tcs(p, Configuration{{0, 1}, {0}});
    CHECK(meet.pair_collides(0, 1)); // slow first, fast catches it
    TcsTable miss = compute_tcs(p, Configuration{{1, 0}, {0}});
    CHECK(!miss.pair_collides(0, 1)); // fast first, gap only widens
}

TEST_CASE("sign table worked example with three bullets") {
    // Identity configuration of V=(1,2,3), delays (1,2): bullets born at
    // 0, 1, 3.  The first two meet at (2,2); the third line has height
    // 3·(2−3) = −3 there, so the meeting point lies above it.
    Parameter p = param({Rat(1), Rat(2), Rat(3)}, {Rat(1), Rat(2)});
    TcsTable t = compute_tcs(p, Configuration{{0, 1, 2}, {0, 1}});
    CHECK(t.entry(0, 1, 2) == 1);
    CHECK(t.entry(1, 0, 2) == 1); // symmetric in the pair
    CHECK(t.pair_collides(0, 1));
    // Bullet 3 is the fastest and shot last: it meets both others.
    CHECK(t.pair_collides(1, 2));
    CHECK(t.pair_collides(0, 2));
}

TEST_CASE("a configuration revealing a triple point is refused") {
    Parameter p = param({Rat(1), Rat(2), Rat(3)}, {Rat(1), Rat(1, 3)});
    // Identity: births 0, 1, 4/3; all three lines pass through (2,2).
    CHECK_THROWS_AS(compute_tcs(p, Configuration{{0, 1, 2}, {0, 1}}), NotGeneric);
}

TEST_CASE("survivor decision on hand-built tables") {
    SUBCASE("all-zero table: everyone survives") {
        TcsTable t(4, std::vector<signed char>(4 * 3 / 2 * 4, 0));
        CHECK(survivors_from_tcs(t) == std::vector<int>{0, 1, 2, 3});
    }
    SUBCASE("two bullets") {
        CHECK(survivors_from_tcs(TcsTable(2, {1})).empty());
        CHECK(survivors_from_tcs(TcsTable(2, {0})) == std::vector<int>{0, 1});
    }
    SUBCASE("single bullet") {
        CHECK(survivors_from_tcs(TcsTable(1, {})) == std::vector<int>{0});
    }
}

TEST_CASE("table decision matches the engine on every small configuration") {
    Rng rng(90210);
    for (int n = 1; n <= 5; ++n) {
        std::vector<Parameter> params;
        Rng sub = rng.derive(n);
        params.push_back(random_param(sub, n));
        if (n >= 2) params.push_back(random_param(sub, n, /*zero_first=*/true));
        for (const Parameter& p : params) {
            REQUIRE(is_generic(p));
            for_each_configuration(n, [&](const Configuration& c) {
                TcsTable t = compute_tcs(p, c);
                std::vector<int> from_table = survivors_from_tcs(t);
                std::vector<int> from_engine = resolve(realize(p, c)).survivors;
                REQUIRE(from_table == from_engine);
            });
        }
    }
}

TEST_CASE("sign tables are locally constant under tiny speed perturbations") {
    Rng rng(5150);
    for (int n = 2; n <= 4; ++n) {
        Rng sub = rng.derive(n);
        Parameter p = random_param(sub, n);
        REQUIRE(is_generic(p));
        Parameter q = perturb_generic(sub, p);
        for_each_configuration(n, [&](const Configuration& c) {
            REQUIRE(compute_tcs(p, c) == compute_tcs(q, c));
        });
    }
}

TEST_CASE("identical sign tables force identical survivor sets") {
    Rng rng(31416);
    for (int n = 2; n <= 4; ++n) {
        Rng sub = rng.derive(n);
        Parameter p = random_param(sub, n);
        REQUIRE(is_generic(p));

        // Two families with provably equal tables: a similarity rescaling,
        // and a tiny generic perturbation.
        Parameter scaled;
        for (const Rat& v : p.speeds) scaled.speeds.push_back(v * Rat(7, 5));
        for (const Rat& d : p.delays) scaled.delays.push_back(d * Rat(7, 5));
        Parameter jittered = perturb_generic(sub, p);

        for (const Parameter* q : {&scaled, &jittered}) {
            for_each_configuration(n, [&](const Configuration& c) {
                REQUIRE(compute_tcs(p, c) == compute_tcs(*q, c));
                REQUIRE(resolve(realize(p, c)).survivors == resolve(realize(*q, c)).survivors);
            });
        }
    }
}
