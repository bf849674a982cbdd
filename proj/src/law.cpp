#include "bullets/law.hpp"

#include <cmath>
#include <string>

#include "bullets/errors.hpp"

#include <gmpxx.h>

namespace bullets {

namespace {

/// Numerator rows a_N(k) = N!·q_N(k), which obey the integer recurrence
/// a_N(k) = a_{N−1}(k−1) + (N−1)²·a_{N−2}(k) with a_0(0) = a_1(1) = 1.
/// Row N is dense over 0..N; entries off the parity of N are zero.
std::vector<mpz_class> next_row(const std::vector<mpz_class>& prev1,
                                const std::vector<mpz_class>& prev2, int N) {
    std::vector<mpz_class> row(static_cast<std::size_t>(N) + 1);
    const mpz_class w = mpz_class(N - 1) * (N - 1);
    for (int k = 0; k <= N; ++k) {
        mpz_class v = 0;
        if (k >= 1 && k - 1 < static_cast<int>(prev1.size())) v += prev1[k - 1];
        if (k < static_cast<int>(prev2.size())) v += w * prev2[k];
        row[static_cast<std::size_t>(k)] = std::move(v);
    }
    return row;
}

SurvivorDistribution from_row(const std::vector<mpz_class>& row, int n,
                              const mpz_class& factorial) {
    SurvivorDistribution d;
    d.n = n;
    for (int k = 0; k <= n; ++k) {
        if (row[static_cast<std::size_t>(k)] == 0) continue;
        Rat p;
        p.raw() = mpq_class(row[static_cast<std::size_t>(k)], factorial);
        p.raw().canonicalize();
        d.mass.emplace(k, std::move(p));
    }
    return d;
}

} // namespace

SurvivorDistribution q_exact(int n) {
    if (n < 0) throw Invalid("law: n must be nonnegative");
    std::vector<mpz_class> prev2{1};    // a_0
    std::vector<mpz_class> prev1{0, 1}; // a_1
    mpz_class factorial = 1;
    if (n == 0) return from_row(prev2, 0, factorial);
    if (n == 1) return from_row(prev1, 1, factorial);
    std::vector<mpz_class> row;
    for (int N = 2; N <= n; ++N) {
        row = next_row(prev1, prev2, N);
        prev2 = std::move(prev1);
        prev1 = std::move(row);
        factorial *= N;
    }
    return from_row(prev1, n, factorial);
}

std::vector<SurvivorDistribution> q_exact_upto(int n) {
    if (n < 0) throw Invalid("law: n must be nonnegative");
    std::vector<SurvivorDistribution> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    std::vector<mpz_class> prev2{1};
    std::vector<mpz_class> prev1{0, 1};
    mpz_class factorial = 1;
    out.push_back(from_row(prev2, 0, factorial));
    if (n >= 1) out.push_back(from_row(prev1, 1, factorial));
    for (int N = 2; N <= n; ++N) {
        std::vector<mpz_class> row = next_row(prev1, prev2, N);
        factorial *= N;
        out.push_back(from_row(row, N, factorial));
        prev2 = std::move(prev1);
        prev1 = std::move(row);
    }
    return out;
}

std::pair<Rat, Rat> q_moments_exact(int n, int exact_bound) {
    if (n > exact_bound)
        throw SizeLimit("exact moments: n = " + std::to_string(n) +
                        " exceeds the exact-mode bound " + std::to_string(exact_bound) +
                        "; use the floating recurrences instead");
    SurvivorDistribution d = q_exact(n);
    Rat mean, second;
    for (const auto& [k, p] : d.mass) {
        mean += Rat(k) * p;
        second += Rat(k) * Rat(k) * p;
    }
    return {mean, second - mean * mean};
}

FloatMoments q_moments_float(long n) {
    if (n < 0) throw Invalid("law: n must be nonnegative");
    // Raw-moment recurrences induced by the memory-two chain: conditioning
    // on the Bernoulli(1/N) step gives, for r = 1, 2, 3,
    //   E[X_N^r] = (1/N)·E[(1+X_{N−1})^r] + (1 − 1/N)·E[X_{N−2}^r].
    double m1p2 = 0, m2p2 = 0, m3p2 = 0; // moments of X_{N-2}
    double m1p1 = 1, m2p1 = 1, m3p1 = 1; // moments of X_{N-1}
    if (n == 0) return {0.0, 0.0, 0.0};
    double m1 = m1p1, m2 = m2p1, m3 = m3p1;
    for (long N = 2; N <= n; ++N) {
        const double inv = 1.0 / static_cast<double>(N);
        m1 = inv * (1 + m1p1) + (1 - inv) * m1p2;
        m2 = inv * (1 + 2 * m1p1 + m2p1) + (1 - inv) * m2p2;
        m3 = inv * (1 + 3 * m1p1 + 3 * m2p1 + m3p1) + (1 - inv) * m3p2;
        m1p2 = m1p1;
        m2p2 = m2p1;
        m3p2 = m3p1;
        m1p1 = m1;
        m2p1 = m2;
        m3p1 = m3;
    }
    const double var = m2 - m1 * m1;
    const double central3 = m3 - 3 * m1 * m2 + 2 * m1 * m1 * m1;
    const double skew = var > 0 ? central3 / std::pow(var, 1.5) : 0.0;
    return {m1, var, skew};
}

int sample_markov(int n, Rng& rng) {
    if (n < 0) throw Invalid("law: n must be nonnegative");
    int prev2 = 0; // X_0
    if (n == 0) return prev2;
    rng.bernoulli_inv(1); // B_1 = 1 almost surely; consume the draw anyway
    int prev1 = 1;         // X_1
    for (int m = 2; m <= n; ++m) {
        int x = rng.bernoulli_inv(static_cast<std::uint64_t>(m)) ? 1 + prev1 : prev2;
        prev2 = prev1;
        prev1 = x;
    }
    return prev1;
}

} // namespace bullets
