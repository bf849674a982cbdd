#include "bullets/scheme.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <utility>

#include "bullets/geometry.hpp"

namespace bullets {

namespace {

/// One ordered pair of disjoint nonempty delay-index subsets with its sums.
struct SubsetPair {
    Rat d_l, d_r;
    std::vector<int> left, right;
};

/// All 3^m assignments of m delay indices to {left, right, neither},
/// keeping those where both subsets are nonempty.
std::vector<SubsetPair> subset_pairs(const std::vector<Rat>& delays) {
    const int m = static_cast<int>(delays.size());
    std::vector<SubsetPair> out;
    std::vector<int> a(static_cast<std::size_t>(m), 0);
    while (true) {
        SubsetPair sp;
        for (int i = 0; i < m; ++i) {
            if (a[i] == 1) {
                sp.d_l += delays[i];
                sp.left.push_back(i);
            } else if (a[i] == 2) {
                sp.d_r += delays[i];
                sp.right.push_back(i);
            }
        }
        if (!sp.left.empty() && !sp.right.empty()) out.push_back(std::move(sp));
        int i = 0;
        while (i < m && a[i] == 2) a[i++] = 0;
        if (i == m) break;
        ++a[i];
    }
    return out;
}

} // namespace

std::vector<CriticalPattern> find_critical_patterns(const Parameter& p, int exhaustive_bound) {
    p.validate();
    const int n = p.n();
    if (n > exhaustive_bound)
        throw SizeLimit("pattern scan: n = " + std::to_string(n) + " exceeds the exhaustive bound " +
                        std::to_string(exhaustive_bound) + " (subset pairs grow as 3^(n-1))");
    if (n < 3) return {};

    const std::vector<SubsetPair> pairs = subset_pairs(p.delays);

    // Ordered triples of distinct speed indices, flattened for the parallel
    // scan; per-triple buckets keep the output order deterministic.
    std::vector<std::array<int, 3>> triples;
    for (int m = 0; m < n; ++m)
        for (int l = 0; l < n; ++l)
            for (int r = 0; r < n; ++r)
                if (m != l && m != r && l != r) triples.push_back({m, l, r});

    std::vector<std::vector<CriticalPattern>> buckets(triples.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t t = 0; t < triples.size(); ++t) {
        const Rat& vm = p.speeds[triples[t][0]];
        const Rat& vl = p.speeds[triples[t][1]];
        const Rat& vr = p.speeds[triples[t][2]];
        for (const SubsetPair& sp : pairs) {
            HalfLine hm{vm, Rat(0)};
            HalfLine hl{vl, sp.d_l};
            HalfLine hr{vr, sp.d_l + sp.d_r};
            if (!concurrent(hm, hl, hr)) continue;
            CriticalPattern cp;
            cp.v_m = vm;
            cp.v_l = vl;
            cp.v_r = vr;
            cp.d_l = sp.d_l;
            cp.d_r = sp.d_r;
            cp.left_indices = sp.left;
            cp.right_indices = sp.right;
            cp.triple_height = collision_point(hm, hl)->position;
            cp.minimal = sp.left.size() == 1 && sp.right.size() == 1;
            buckets[t].push_back(std::move(cp));
        }
    }

    std::vector<CriticalPattern> out;
    for (auto& b : buckets)
        for (auto& cp : b) out.push_back(std::move(cp));
    return out;
}

bool is_generic(const Parameter& p, int exhaustive_bound) {
    return find_critical_patterns(p, exhaustive_bound).empty();
}

namespace {

int pair_rank(int n, int i, int j) {
    // Rank of (i, j), i < j, in lexicographic order over all such pairs.
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

} // namespace

int TcsTable::entry(int i, int j, int k) const {
    if (n_ < 3) throw Invalid("sign table: per-line entries need at least three bullets");
    if (i == j || k == i || k == j || i < 0 || j < 0 || k < 0 || i >= n_ || j >= n_ || k >= n_)
        throw Invalid("sign table: indices must be three distinct bullets");
    if (i > j) std::swap(i, j);
    return signs_[static_cast<std::size_t>(pair_rank(n_, i, j) * n_ + k)];
}

bool TcsTable::pair_collides(int i, int j) const {
    if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_)
        throw Invalid("sign table: indices must be two distinct bullets");
    if (n_ == 2) return signs_[0] != 0;
    if (i > j) std::swap(i, j);
    for (int k = 0; k < n_; ++k)
        if (k != i && k != j)
            return signs_[static_cast<std::size_t>(pair_rank(n_, i, j) * n_ + k)] != 0;
    return false; // unreachable for n_ >= 3
}

TcsTable compute_tcs(const Parameter& p, const Configuration& c) {
    p.validate();
    const int n = p.n();
    ShotSequence shots = realize(p, c);

    if (n < 2) return TcsTable(n, {});
    if (n == 2) {
        auto m = collision_point({shots[0].speed, shots[0].birth}, {shots[1].speed, shots[1].birth});
        return TcsTable(2, {static_cast<signed char>(m ? 1 : 0)});
    }

    std::vector<signed char> signs(static_cast<std::size_t>(n * (n - 1) / 2 * n), 0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            auto m = collision_point({shots[i].speed, shots[i].birth},
                                     {shots[j].speed, shots[j].birth});
            if (!m) continue;
            for (int k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                int s = side_of_line(*m, {shots[k].speed, shots[k].birth});
                if (s == 0)
                    throw NotGeneric("trajectories " + std::to_string(i + 1) + ", " +
                                     std::to_string(j + 1) + ", " + std::to_string(k + 1) +
                                     " pass through one point in this configuration");
                signs[static_cast<std::size_t>(pair_rank(n, i, j) * n + k)] =
                    static_cast<signed char>(s);
            }
        }
    }
    return TcsTable(n, std::move(signs));
}

namespace {

struct SubResult {
    std::vector<int> survivors;
    std::vector<std::pair<int, int>> pairs;
};

/// The decision recursion on a live index set (kept sorted ascending).
SubResult decide(const TcsTable& t, const std::vector<int>& live) {
    if (live.size() <= 1) return {live, {}};
    const int b = live.front();

    if (live.size() == 2) {
        if (t.pair_collides(live[0], live[1])) return {{}, {{live[0], live[1]}}};
        return {live, {}};
    }

    // Does the least live bullet meet anyone at all?
    bool row_zero = true;
    for (std::size_t x = 1; x < live.size() && row_zero; ++x)
        row_zero = !t.pair_collides(b, live[x]);

    if (row_zero) {
        SubResult rest = decide(t, {live.begin() + 1, live.end()});
        rest.survivors.insert(rest.survivors.begin(), b);
        return rest;
    }

    // Least J whose meeting point with b lies above every other live line.
    int J = -1;
    for (std::size_t x = 1; x < live.size() && J < 0; ++x) {
        bool above_all = true;
        for (std::size_t y = 1; y < live.size() && above_all; ++y) {
            if (y == x) continue;
            above_all = t.entry(b, live[x], live[y]) == 1;
        }
        if (above_all) J = live[x];
    }
    if (J < 0)
        throw RecursionStuck("bullet " + std::to_string(b + 1) +
                             " meets some trajectory, but no meeting point clears every "
                             "other live line");

    std::vector<int> inner_set, after_set;
    for (int x : live) {
        if (x > b && x <= J) inner_set.push_back(x);
        if (x > J) after_set.push_back(x);
    }
    SubResult inner = decide(t, inner_set);

    const bool j_survives_inner =
        std::find(inner.survivors.begin(), inner.survivors.end(), J) != inner.survivors.end();
    if (j_survives_inner) {
        // b and J collide; the block strictly between them annihilates with
        // the inner matching; everything after J plays out on its own.
        SubResult rest = decide(t, after_set);
        SubResult out;
        out.survivors = std::move(rest.survivors);
        out.pairs.emplace_back(b, J);
        for (auto& pr : inner.pairs) out.pairs.push_back(pr);
        for (auto& pr : rest.pairs) out.pairs.push_back(pr);
        return out;
    }

    // J dies inside its block; remove J and its inner partner, keep b.
    int partner = -1;
    for (auto& pr : inner.pairs) {
        if (pr.first == J) partner = pr.second;
        if (pr.second == J) partner = pr.first;
    }
    if (partner < 0)
        throw RecursionStuck("inner block reported bullet " + std::to_string(J + 1) +
                             " dead without a collision partner");
    std::vector<int> reduced;
    for (int x : live)
        if (x != J && x != partner) reduced.push_back(x);
    SubResult rest = decide(t, reduced);
    rest.pairs.emplace_back(J, partner);
    return rest;
}

} // namespace

std::vector<int> survivors_from_tcs(const TcsTable& t) {
    std::vector<int> all(static_cast<std::size_t>(t.n()));
    for (int i = 0; i < t.n(); ++i) all[static_cast<std::size_t>(i)] = i;
    return decide(t, all).survivors;
}

} // namespace bullets
