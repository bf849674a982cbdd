#include "bullets/enumeration.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <string>

#include "bullets/errors.hpp"
#include "bullets/scheme.hpp"

namespace bullets {

long long factorial(int m) {
    if (m < 0 || m > 20) throw Invalid("factorial argument out of range: " + std::to_string(m));
    long long f = 1;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

void unrank_permutation(long long rank, int m, std::vector<int>& out) {
    if (m < 0) throw Invalid("negative permutation length");
    out.resize(static_cast<std::size_t>(m));
    std::vector<int> avail(static_cast<std::size_t>(m));
    std::iota(avail.begin(), avail.end(), 0);
    long long f = factorial(m);
    if (rank < 0 || rank >= f) throw Invalid("permutation rank out of range");
    for (int i = 0; i < m; ++i) {
        f /= m - i;
        const auto d = static_cast<std::size_t>(rank / f);
        rank %= f;
        out[static_cast<std::size_t>(i)] = avail[d];
        avail.erase(avail.begin() + static_cast<long>(d));
    }
}

namespace {

/// Captures the first exception by configuration rank, so the reported
/// failure is independent of thread count and scheduling.
class FirstFailure {
public:
    bool seen() const { return seen_.load(std::memory_order_relaxed); }

    void offer(long long rank, std::exception_ptr e) {
        seen_.store(true, std::memory_order_relaxed);
#pragma omp critical(bullets_enumeration_failure)
        {
            if (!error_ || rank < rank_) {
                rank_ = rank;
                error_ = e;
            }
        }
    }

    void rethrow_if_any() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::atomic<bool> seen_{false};
    long long rank_ = 0;
    std::exception_ptr error_;
};

struct FfTally {
    std::map<int, long long> by_count;
    std::vector<long long> by_speed;
    long long total = 0;
};

void certify_generic(const Parameter& p, int exhaustive_bound) {
    const auto patterns = find_critical_patterns(p, std::max(exhaustive_bound, 12));
    if (!patterns.empty())
        throw NotGeneric("parameter admits " + std::to_string(patterns.size()) +
                         " critical pattern(s); counts would depend on tie-breaking");
}

/// Resolves every (σ, τ) configuration of a certified-generic parameter.
/// Parallel over σ ranks; each chunk is the contiguous block of
/// configurations sharing one σ, swept by lexicographic τ iteration.
FfTally ff_sweep(const Parameter& p, int exhaustive_bound) {
    p.validate();
    const int n = p.n();
    if (n > exhaustive_bound)
        throw SizeLimit("exhaustive sweep of " + std::to_string(n) +
                        " bullets exceeds the bound " + std::to_string(exhaustive_bound));
    certify_generic(p, exhaustive_bound);

    const long long sigma_count = factorial(n);
    FfTally out;
    out.by_speed.assign(static_cast<std::size_t>(n), 0);

#pragma omp parallel
    {
        FfTally local;
        local.by_speed.assign(static_cast<std::size_t>(n), 0);
        std::vector<int> sigma, tau;
        ShotSequence shots(static_cast<std::size_t>(n));

#pragma omp for schedule(dynamic) nowait
        for (long long rank = 0; rank < sigma_count; ++rank) {
            unrank_permutation(rank, n, sigma);
            tau.resize(static_cast<std::size_t>(n - 1));
            std::iota(tau.begin(), tau.end(), 0);
            do {
                Rat birth;
                for (int j = 0; j < n; ++j) {
                    if (j > 0) birth += p.delays[static_cast<std::size_t>(tau[static_cast<std::size_t>(j - 1)])];
                    shots[static_cast<std::size_t>(j)].birth = birth;
                    shots[static_cast<std::size_t>(j)].speed =
                        p.speeds[static_cast<std::size_t>(sigma[static_cast<std::size_t>(j)])];
                }
                const Diagram d = detail::resolve_unchecked(shots.data(), n);
                local.by_count[d.survivor_count()] += 1;
                local.total += 1;
                for (const int j : d.survivors)
                    local.by_speed[static_cast<std::size_t>(sigma[static_cast<std::size_t>(j)])] += 1;
            } while (std::next_permutation(tau.begin(), tau.end()));
        }

#pragma omp critical(bullets_enumeration_merge)
        {
            for (const auto& [k, c] : local.by_count) out.by_count[k] += c;
            for (std::size_t i = 0; i < local.by_speed.size(); ++i) out.by_speed[i] += local.by_speed[i];
            out.total += local.total;
        }
    }
    return out;
}

} // namespace

CountTable enumerate_ff(const Parameter& p, int exhaustive_bound) {
    FfTally t = ff_sweep(p, exhaustive_bound);
    return CountTable{std::move(t.by_count), t.total};
}

std::vector<long long> speed_survival_counts(const Parameter& p, int exhaustive_bound) {
    return ff_sweep(p, exhaustive_bound).by_speed;
}

CountTable enumerate_ff_serial(const Parameter& p, int exhaustive_bound) {
    p.validate();
    const int n = p.n();
    if (n > exhaustive_bound)
        throw SizeLimit("exhaustive sweep of " + std::to_string(n) +
                        " bullets exceeds the bound " + std::to_string(exhaustive_bound));
    certify_generic(p, exhaustive_bound);

    CountTable out;
    Configuration c;
    c.sigma.resize(static_cast<std::size_t>(n));
    c.tau.resize(static_cast<std::size_t>(n - 1));
    std::iota(c.sigma.begin(), c.sigma.end(), 0);
    do {
        std::iota(c.tau.begin(), c.tau.end(), 0);
        do {
            const Diagram d = resolve(realize(p, c));
            out.count[d.survivor_count()] += 1;
            out.total += 1;
        } while (std::next_permutation(c.tau.begin(), c.tau.end()));
    } while (std::next_permutation(c.sigma.begin(), c.sigma.end()));
    return out;
}

void ConstrainedParameter::validate() const {
    if (free_speeds.size() != free_delays.size())
        throw Invalid("need equally many free speeds and free delays");
    if (v_min.sign() < 0 || v_r.sign() < 0) throw Invalid("speeds must be nonnegative");
    if (!(v_min < v_r)) throw Invalid("v_min must be smaller than v_r");
    std::vector<Rat> all = free_speeds;
    all.push_back(v_min);
    all.push_back(v_r);
    for (const Rat& v : all)
        if (v.sign() < 0) throw Invalid("speeds must be nonnegative");
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw Invalid("speeds must be pairwise distinct");
    for (const Rat& d : free_delays)
        if (d.sign() <= 0) throw Invalid("delays must be positive");
    if (delta_star.sign() <= 0) throw Invalid("delays must be positive");
    if (s.sign() < 0 || s > intersection_height(*this))
        throw Invalid("segment height must lie in [0, H]");
}

Rat intersection_height(const ConstrainedParameter& cp) {
    if (!(cp.v_min < cp.v_r)) throw Invalid("v_min must be smaller than v_r");
    return cp.v_min * cp.v_r * cp.delta_star / (cp.v_r - cp.v_min);
}

namespace {

/// Number of true trajectories of `d` that cross the segment of the line
/// through (seg_birth, 0) with slope v_r, at heights in (0, s].  The bullet
/// at index `excluded` is ignored.  A trajectory whose terminal point lies
/// exactly on the segment counts only when its partner is `seg_bullet`
/// (the collision then happens on the segment itself); any other terminal
/// contact is rejected as degenerate.
int count_crossings(const Diagram& d, const ShotSequence& shots, int excluded, int seg_bullet,
                    const Rat& v_r, const Rat& seg_birth, const Rat& s) {
    int crossings = 0;
    const int n = d.n();
    for (int b = 0; b < n; ++b) {
        if (b == excluded) continue;
        const Rat& vb = shots[static_cast<std::size_t>(b)].speed;
        const Rat& tb = shots[static_cast<std::size_t>(b)].birth;
        // Distinct speeds guarantee vb != v_r for every counted bullet.
        const Rat t_star = (vb * tb - v_r * seg_birth) / (vb - v_r);
        const Rat y_star = vb * (t_star - tb);
        if (y_star.sign() <= 0 || y_star > s) continue;
        if (t_star < tb) continue;
        const ExtTime& death = d.bullets[static_cast<std::size_t>(b)].death;
        if (death.is_finite()) {
            if (t_star > death.value()) continue;
            if (t_star == death.value()) {
                if (d.bullets[static_cast<std::size_t>(b)].partner == seg_bullet) {
                    ++crossings;
                    continue;
                }
                throw DegenerateConstraint("a trajectory ends exactly on the counting segment");
            }
        }
        ++crossings;
    }
    return crossings;
}

bool passes(CrossingFilter f, int crossings) {
    switch (f) {
    case CrossingFilter::Zero: return crossings == 0;
    case CrossingFilter::AllNonneg: return true;
    case CrossingFilter::Positive: return crossings > 0;
    }
    throw Invalid("unknown crossing filter");
}

} // namespace

CountTable enumerate_constrained(const ConstrainedParameter& cp, ConstrainedSide side,
                                 int exhaustive_bound) {
    cp.validate();
    const int n = cp.n();
    if (n > exhaustive_bound)
        throw SizeLimit("exhaustive sweep of " + std::to_string(n) +
                        " bullets exceeds the bound " + std::to_string(exhaustive_bound));

    // n−1 delay values; the distinguished Δ* carries the last index.
    std::vector<Rat> delays = cp.free_delays;
    delays.push_back(cp.delta_star);
    const int dstar = n - 2;
    const int bullets = n - 1; // one slot of each configuration stays empty
    const long long tau_count = factorial(n - 1);

    CountTable out;
    FirstFailure failure;

#pragma omp parallel
    {
        CountTable local;
        std::vector<int> tau, sigma;
        std::vector<Rat> times(static_cast<std::size_t>(n));
        ShotSequence shots(static_cast<std::size_t>(bullets));

#pragma omp for schedule(dynamic) nowait
        for (long long rank = 0; rank < tau_count; ++rank) {
            if (failure.seen()) continue;
            try {
                unrank_permutation(rank, n - 1, tau);
                times[0] = Rat(0);
                int p_slot = -1;
                for (int j = 0; j + 1 < n; ++j) {
                    times[static_cast<std::size_t>(j + 1)] =
                        times[static_cast<std::size_t>(j)] +
                        delays[static_cast<std::size_t>(tau[static_cast<std::size_t>(j)])];
                    if (tau[static_cast<std::size_t>(j)] == dstar) p_slot = j;
                }
                const bool left = side == ConstrainedSide::Left;
                const int dist_slot = left ? p_slot : p_slot + 1;
                const int skip_slot = left ? p_slot + 1 : p_slot;
                const Rat& dist_speed = left ? cp.v_min : cp.v_r;
                const Rat& seg_birth = times[static_cast<std::size_t>(p_slot + 1)];

                sigma.resize(static_cast<std::size_t>(n - 2));
                std::iota(sigma.begin(), sigma.end(), 0);
                do {
                    int dist_index = -1;
                    int free_used = 0;
                    int index = 0;
                    for (int slot = 0; slot < n; ++slot) {
                        if (slot == skip_slot) continue;
                        shots[static_cast<std::size_t>(index)].birth = times[static_cast<std::size_t>(slot)];
                        if (slot == dist_slot) {
                            dist_index = index;
                            shots[static_cast<std::size_t>(index)].speed = dist_speed;
                        } else {
                            shots[static_cast<std::size_t>(index)].speed =
                                cp.free_speeds[static_cast<std::size_t>(sigma[static_cast<std::size_t>(free_used++)])];
                        }
                        ++index;
                    }
                    const Diagram d = detail::resolve_unchecked(shots.data(), bullets);
                    const int seg_bullet = left ? -1 : dist_index;
                    const int crossings =
                        count_crossings(d, shots, dist_index, seg_bullet, cp.v_r, seg_birth, cp.s);
                    if (passes(cp.filter, crossings)) {
                        local.count[d.survivor_count()] += 1;
                        local.total += 1;
                    }
                } while (std::next_permutation(sigma.begin(), sigma.end()));
            } catch (...) {
                failure.offer(rank, std::current_exception());
            }
        }

#pragma omp critical(bullets_enumeration_merge)
        {
            for (const auto& [k, c] : local.count) out.count[k] += c;
            out.total += local.total;
        }
    }
    failure.rethrow_if_any();
    return out;
}

} // namespace bullets
