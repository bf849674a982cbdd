#include "bullets/engine.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <utility>

namespace bullets {

void Parameter::validate() const {
    if (speeds.empty()) throw Invalid("speeds: must be non-empty");
    if (delays.size() + 1 != speeds.size())
        throw Invalid("delays: expected " + std::to_string(speeds.size() - 1) + " entries, got " +
                      std::to_string(delays.size()));
    if (speeds.front().sign() < 0) throw Invalid("speeds: must be >= 0");
    for (std::size_t i = 1; i < speeds.size(); ++i)
        if (!(speeds[i - 1] < speeds[i]))
            throw Invalid("speeds: must be strictly increasing (entry " + std::to_string(i + 1) +
                          ")");
    for (std::size_t i = 0; i < delays.size(); ++i)
        if (delays[i].sign() <= 0)
            throw Invalid("delays: must be strictly positive (entry " + std::to_string(i + 1) +
                          ")");
}

namespace {

void check_permutation(const std::vector<int>& p, std::size_t size, const char* field) {
    if (p.size() != size)
        throw DimensionMismatch(std::string(field) + ": expected length " + std::to_string(size) +
                                ", got " + std::to_string(p.size()));
    std::vector<char> seen(size, 0);
    for (int v : p) {
        if (v < 0 || static_cast<std::size_t>(v) >= size || seen[v])
            throw Invalid(std::string(field) + ": not a permutation");
        seen[v] = 1;
    }
}

} // namespace

void Configuration::validate(int n) const {
    check_permutation(sigma, static_cast<std::size_t>(n), "sigma");
    check_permutation(tau, static_cast<std::size_t>(n > 0 ? n - 1 : 0), "tau");
}

void validate_shots(const ShotSequence& shots) {
    for (std::size_t i = 1; i < shots.size(); ++i)
        if (!(shots[i - 1].birth < shots[i].birth))
            throw Invalid("shots: birth times must be strictly increasing");
    std::vector<Rat> sp;
    sp.reserve(shots.size());
    for (const Shot& s : shots) sp.push_back(s.speed);
    std::sort(sp.begin(), sp.end());
    for (std::size_t i = 1; i < sp.size(); ++i)
        if (sp[i - 1] == sp[i]) throw EqualSpeeds("shots: duplicate speed " + sp[i].str());
}

ShotSequence realize(const Parameter& p, const Configuration& c) {
    c.validate(p.n());
    ShotSequence shots;
    shots.reserve(p.speeds.size());
    Rat t(0);
    for (std::size_t j = 0; j < p.speeds.size(); ++j) {
        shots.push_back(Shot{t, p.speeds[c.sigma[j]]});
        if (j + 1 < p.speeds.size()) t += p.delays[c.tau[j]];
    }
    return shots;
}

namespace {

/// Shared post-processing: collect survivors in index order.
void finish(Diagram& d) {
    for (int i = 0; i < d.n(); ++i)
        if (!d.bullets[i].death.is_finite()) d.survivors.push_back(i);
}

} // namespace

Diagram resolve(const ShotSequence& shots) {
    validate_shots(shots);
    return detail::resolve_unchecked(shots.data(), static_cast<int>(shots.size()));
}

Diagram resolve_naive(const ShotSequence& shots) {
    validate_shots(shots);
    const int n = static_cast<int>(shots.size());
    Diagram d;
    d.bullets.reserve(shots.size());
    for (const Shot& s : shots) d.bullets.push_back({s.birth, s.speed});

    std::vector<int> live;
    for (int i = 0; i < n; ++i) live.push_back(i);

    while (live.size() >= 2) {
        // T+ = minimum virtual collision time over all live pairs.
        std::optional<Rat> best;
        std::vector<std::pair<int, int>> batch;
        for (std::size_t x = 0; x < live.size(); ++x) {
            for (std::size_t y = x + 1; y < live.size(); ++y) {
                int i = live[x], j = live[y];
                ExtTime t = virtual_collision_time({shots[i].speed, shots[i].birth},
                                                   {shots[j].speed, shots[j].birth});
                if (!t.is_finite()) continue;
                if (!best || t.value() < *best) {
                    best = t.value();
                    batch.assign(1, {i, j});
                } else if (t.value() == *best) {
                    batch.emplace_back(i, j);
                }
            }
        }
        if (!best) break;

        // Every bullet may belong to at most one minimizing pair; a repeat
        // means three live trajectories pass through one point.
        std::vector<char> hit(static_cast<std::size_t>(n), 0);
        for (auto [i, j] : batch) {
            if (hit[i] || hit[j])
                throw SingularParameter("simultaneous collision ties at time " + best->str());
            hit[i] = hit[j] = 1;
        }

        for (auto [i, j] : batch) {
            d.bullets[i].death = ExtTime::finite(*best);
            d.bullets[j].death = ExtTime::finite(*best);
            d.bullets[i].partner = j;
            d.bullets[j].partner = i;
            Rat pos = shots[i].speed * (*best - shots[i].birth);
            d.bullets[i].death_position = pos;
            d.bullets[j].death_position = std::move(pos);
        }
        live.erase(std::remove_if(live.begin(), live.end(), [&](int i) { return hit[i]; }),
                   live.end());
    }
    finish(d);
    return d;
}

namespace {

struct Event {
    Rat time;
    int a; ///< the bullet spatially just ahead
    int b; ///< its neighbor behind, at push time
};

struct EventAfter {
    bool operator()(const Event& x, const Event& y) const { return y.time < x.time; }
};

} // namespace

/// Event-driven engine.  The live list is kept in front-to-back spatial
/// order; every bullet is born at the back (all bullets start at position 0
/// and nothing live is ever behind a newborn).  Collisions only ever happen
/// between list-adjacent bullets, so an event is pushed whenever an adjacency
/// forms and lazily discarded when it has broken in the meantime.
Diagram detail::resolve_unchecked(const Shot* shots, int n) {
    Diagram d;
    d.bullets.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) d.bullets.push_back({shots[i].birth, shots[i].speed});

    std::vector<int> next(static_cast<std::size_t>(n), -1);
    std::vector<int> prev(static_cast<std::size_t>(n), -1);
    std::vector<char> alive(static_cast<std::size_t>(n), 0);
    int tail = -1;

    std::vector<Event> heap;
    EventAfter after;

    auto push_adjacency = [&](int a, int b) {
        ExtTime t = virtual_collision_time({shots[a].speed, shots[a].birth},
                                           {shots[b].speed, shots[b].birth});
        if (!t.is_finite()) return;
        heap.push_back(Event{t.value(), a, b});
        std::push_heap(heap.begin(), heap.end(), after);
    };
    auto valid = [&](const Event& e) { return alive[e.a] && alive[e.b] && next[e.a] == e.b; };

    int born = 0;
    std::vector<std::pair<int, int>> batch;
    while (true) {
        while (!heap.empty() && !valid(heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), after);
            heap.pop_back();
        }
        if (born < n && (heap.empty() || shots[born].birth <= heap.front().time)) {
            // Birth: insert at the back of the live list.
            int b = born++;
            alive[b] = 1;
            prev[b] = tail;
            next[b] = -1;
            if (tail >= 0) {
                next[tail] = b;
                push_adjacency(tail, b);
            }
            tail = b;
            continue;
        }
        if (heap.empty()) break;

        // Collect every still-valid event at the minimal time.
        const Rat time = heap.front().time;
        batch.clear();
        while (!heap.empty() && heap.front().time == time) {
            Event e = heap.front();
            std::pop_heap(heap.begin(), heap.end(), after);
            heap.pop_back();
            if (valid(e)) batch.emplace_back(e.a, e.b);
        }

        // A bullet in two simultaneous pairs means a triple point.
        std::vector<char> hit(static_cast<std::size_t>(n), 0);
        for (auto [a, b] : batch) {
            if (hit[a] || hit[b])
                throw SingularParameter("simultaneous collision ties at time " + time.str());
            hit[a] = hit[b] = 1;
        }

        std::vector<int> boundary;
        for (auto [a, b] : batch) {
            d.bullets[a].death = ExtTime::finite(time);
            d.bullets[b].death = ExtTime::finite(time);
            d.bullets[a].partner = b;
            d.bullets[b].partner = a;
            Rat pos = shots[a].speed * (time - shots[a].birth);
            d.bullets[a].death_position = pos;
            d.bullets[b].death_position = std::move(pos);
            for (int x : {a, b}) {
                alive[x] = 0;
                int p = prev[x], q = next[x];
                if (p >= 0) next[p] = q;
                if (q >= 0) prev[q] = p;
                if (tail == x) tail = p;
            }
        }
        // New adjacencies across the removed pairs.
        for (auto [a, b] : batch) {
            (void)b;
            int p = prev[a];
            if (p >= 0 && alive[p] && next[p] >= 0) boundary.push_back(p);
        }
        std::sort(boundary.begin(), boundary.end());
        boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
        for (int p : boundary) push_adjacency(p, next[p]);
    }
    finish(d);
    return d;
}

std::vector<int> survivor_trajectory(const std::vector<Rat>& speeds, const std::vector<Rat>& delays,
                                     int n) {
    if (static_cast<int>(speeds.size()) < n)
        throw DimensionMismatch("speeds: stream shorter than n");
    if (static_cast<int>(delays.size()) < n - 1)
        throw DimensionMismatch("delays: stream shorter than n-1");

    ShotSequence shots;
    shots.reserve(static_cast<std::size_t>(n));
    Rat t(0);
    for (int i = 0; i < n; ++i) {
        shots.push_back(Shot{t, speeds[i]});
        if (i + 1 < n) t += delays[i];
    }
    validate_shots(shots);

    std::vector<int> sizes(static_cast<std::size_t>(n), 0);
    std::atomic<bool> failed{false};
    std::string what;
#pragma omp parallel for schedule(dynamic, 16)
    for (int j = 1; j <= n; ++j) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            sizes[j - 1] = detail::resolve_unchecked(shots.data(), j).survivor_count();
        } catch (const Error& e) {
#pragma omp critical
            {
                failed.store(true, std::memory_order_relaxed);
                what = e.what();
            }
        }
    }
    if (failed.load()) throw SingularParameter(what);
    return sizes;
}

} // namespace bullets
