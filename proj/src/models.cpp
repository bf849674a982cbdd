#include "bullets/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "bullets/errors.hpp"
#include "bullets/scheme.hpp"

namespace bullets {

SpeedSampler SpeedSampler::uniform01() { return SpeedSampler(); }

SpeedSampler SpeedSampler::exponential(double rate) {
    if (!(rate > 0.0)) throw Invalid("exponential rate must be positive");
    SpeedSampler s;
    s.kind_ = Kind::Exponential;
    s.rate_ = rate;
    return s;
}

SpeedSampler SpeedSampler::table(std::vector<Rat> values) {
    if (values.empty()) throw Invalid("value table must be non-empty");
    for (const Rat& v : values)
        if (v.sign() < 0) throw Invalid("table values must be nonnegative");
    SpeedSampler s;
    s.kind_ = Kind::Table;
    s.values_ = std::move(values);
    return s;
}

Rat SpeedSampler::draw(Rng& rng) const {
    switch (kind_) {
    case Kind::Uniform: return Rat::from_double(rng.unit());
    case Kind::Exponential:
        // -log(1-U)/rate, realized exactly as the dyadic value of the
        // double it lands on.
        return Rat::from_double(-std::log1p(-rng.unit()) / rate_);
    case Kind::Table: return values_[static_cast<std::size_t>(rng.below(values_.size()))];
    }
    throw Invalid("unknown sampler kind");
}

Rat SpeedSampler::draw_positive(Rng& rng) const {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Rat v = draw(rng);
        if (v.sign() > 0) return v;
    }
    throw Invalid("sampler failed to produce a positive value");
}

std::vector<Rat> SpeedSampler::draw_distinct(int n, Rng& rng) const {
    if (n < 0) throw Invalid("cannot draw a negative number of values");
    std::vector<Rat> out;
    out.reserve(static_cast<std::size_t>(n));
    int attempts = 0;
    while (static_cast<int>(out.size()) < n) {
        if (++attempts > 10000 + 100 * n)
            throw Invalid("sampler failed to produce enough distinct values");
        Rat v = draw(rng);
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
    }
    return out;
}

namespace {

constexpr int kTieRetryCap = 64;

} // namespace

int sample_ru(int n, const SpeedSampler& speeds, Rng& rng) {
    if (n < 0) throw Invalid("negative bullet count");
    if (n == 0) return 0;
    for (int attempt = 0;; ++attempt) {
        ShotSequence shots;
        shots.reserve(static_cast<std::size_t>(n));
        const std::vector<Rat> v = speeds.draw_distinct(n, rng);
        for (int i = 0; i < n; ++i) shots.push_back(Shot{Rat(i + 1), v[static_cast<std::size_t>(i)]});
        try {
            return resolve(shots).survivor_count();
        } catch (const SingularParameter&) {
            if (attempt + 1 >= kTieRetryCap) throw;
        }
    }
}

int sample_rr(int n, const SpeedSampler& speeds, const SpeedSampler& delays, Rng& rng) {
    if (n < 0) throw Invalid("negative bullet count");
    if (n == 0) return 0;
    for (int attempt = 0;; ++attempt) {
        ShotSequence shots;
        shots.reserve(static_cast<std::size_t>(n));
        const std::vector<Rat> v = speeds.draw_distinct(n, rng);
        Rat birth;
        for (int i = 0; i < n; ++i) {
            if (i > 0) birth += delays.draw_positive(rng);
            shots.push_back(Shot{birth, v[static_cast<std::size_t>(i)]});
        }
        try {
            return resolve(shots).survivor_count();
        } catch (const SingularParameter&) {
            if (attempt + 1 >= kTieRetryCap) throw;
        }
    }
}

namespace {

// Fisher–Yates with the counter rng; identity first, swaps downward.
void draw_permutation(int m, Rng& rng, std::vector<int>& out) {
    out.resize(static_cast<std::size_t>(m));
    std::iota(out.begin(), out.end(), 0);
    for (int i = m - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(out[static_cast<std::size_t>(i)], out[j]);
    }
}

ShotSequence configuration_shots(const Parameter& p, Rng& rng) {
    const int n = p.n();
    std::vector<int> sigma, tau;
    draw_permutation(n, rng, sigma);
    draw_permutation(n - 1, rng, tau);
    ShotSequence shots(static_cast<std::size_t>(n));
    Rat birth;
    for (int j = 0; j < n; ++j) {
        if (j > 0) birth += p.delays[static_cast<std::size_t>(tau[static_cast<std::size_t>(j - 1)])];
        shots[static_cast<std::size_t>(j)].birth = birth;
        shots[static_cast<std::size_t>(j)].speed =
            p.speeds[static_cast<std::size_t>(sigma[static_cast<std::size_t>(j)])];
    }
    return shots;
}

} // namespace

FfSampler::FfSampler(Parameter p) : p_(std::move(p)) {
    p_.validate();
    if (!is_generic(p_))
        throw NotGeneric("parameter admits a critical pattern; uniform sampling is ambiguous");
}

int FfSampler::operator()(Rng& rng) const {
    const ShotSequence shots = configuration_shots(p_, rng);
    return detail::resolve_unchecked(shots.data(), p_.n()).survivor_count();
}

Diagram FfSampler::sample_diagram(Rng& rng) const {
    const ShotSequence shots = configuration_shots(p_, rng);
    return detail::resolve_unchecked(shots.data(), p_.n());
}

double Acceleration::operator()(double x) const {
    switch (kind) {
    case Kind::Square: return x * x;
    case Kind::Sqrt: return std::sqrt(x);
    case Kind::OneMinusExp: return -std::expm1(-x);
    case Kind::Custom: break;
    }
    // Piecewise-linear interpolation through the graph; the final segment's
    // slope extends beyond the last grid point.
    const auto& g = graph;
    if (x <= g.front().first) return g.front().second;
    std::size_t hi = 1;
    while (hi + 1 < g.size() && g[hi].first < x) ++hi;
    const double x0 = g[hi - 1].first, y0 = g[hi - 1].second;
    const double x1 = g[hi].first, y1 = g[hi].second;
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

void Acceleration::validate() const {
    if (kind != Kind::Custom) return;
    if (graph.size() < 2) throw Invalid("custom profile needs at least two grid points");
    if (graph.front().first != 0.0 || graph.front().second != 0.0)
        throw Invalid("custom profile must start at (0, 0)");
    for (std::size_t i = 1; i < graph.size(); ++i) {
        if (!(graph[i - 1].first < graph[i].first) || !(graph[i - 1].second < graph[i].second))
            throw Invalid("custom profile must be strictly increasing");
        if (!std::isfinite(graph[i].first) || !std::isfinite(graph[i].second))
            throw Invalid("custom profile must be finite");
    }
}

void ImpetusProblem::validate() const {
    if (impetuses.empty()) throw Invalid("impetuses: must be non-empty");
    if (delays.size() + 1 != impetuses.size())
        throw Invalid("delays: expected " + std::to_string(impetuses.size() - 1) + " entries, got " +
                      std::to_string(delays.size()));
    for (const Rat& i : impetuses)
        if (i.sign() <= 0) throw Invalid("impetuses: must be strictly positive");
    std::vector<Rat> sorted = impetuses;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Invalid("impetuses: must be pairwise distinct");
    for (const Rat& d : delays)
        if (d.sign() <= 0) throw Invalid("delays: must be strictly positive");
    f.validate();
}

namespace {

Parameter linear_problem(const ImpetusProblem& ip) {
    ip.validate();
    Parameter p;
    p.speeds = ip.impetuses;
    std::sort(p.speeds.begin(), p.speeds.end());
    p.delays = ip.delays;
    return p;
}

} // namespace

FafSampler::FafSampler(ImpetusProblem ip) : ip_(std::move(ip)), linear_(linear_problem(ip_)) {}

int FafSampler::operator()(Rng& rng) const { return linear_(rng); }

Diagram FafSampler::sample_diagram(Rng& rng) const { return linear_.sample_diagram(rng); }

bool FafSampler::audit(int samples, Rng& rng) const {
    if (ip_.f(0.0) != 0.0) return false;
    for (int s = 0; s < samples; ++s) {
        const Diagram d = linear_.sample_diagram(rng);
        std::vector<double> heights;
        for (const auto& b : d.bullets)
            if (b.death.is_finite()) heights.push_back(b.death_position.to_double());
        std::sort(heights.begin(), heights.end());
        heights.erase(std::unique(heights.begin(), heights.end()), heights.end());
        // The acceleration profile must never invert the order of distinct
        // collision heights; times are untouched by the reduction.  Ties are
        // tolerated: a saturating profile (e.g. 1 − e^{−y} past y ≈ 37) maps
        // distinct large heights to the same double even though it is
        // strictly increasing as a function.
        for (std::size_t i = 1; i < heights.size(); ++i)
            if (ip_.f(heights[i - 1]) > ip_.f(heights[i])) return false;
    }
    return true;
}

FlockRun flock_run(const std::vector<double>& speeds) {
    std::vector<double> sorted = speeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Invalid("flock speeds must be pairwise distinct");

    FlockRun run;
    run.sizes.reserve(speeds.size());
    FlockState state;
    for (const double v : speeds) {
        state.shoot(v);
        run.sizes.push_back(state.size());
    }
    run.final_size = state.size();
    return run;
}

long long flock_destruction_time(double x, Rng& rng) {
    if (!(x >= 0.0) || !(x < 1.0)) throw Invalid("target speed must lie in [0, 1)");
    std::vector<double> shielded{x};
    long long shots = 0;
    while (!shielded.empty()) {
        const double w = rng.unit();
        ++shots;
        if (w > shielded.back())
            shielded.pop_back(); // the current slowest is hit
        else
            shielded.push_back(w); // slower arrival shields it
    }
    return shots;
}

int odd_cycle_count(const std::vector<int>& perm) {
    const auto n = perm.size();
    std::vector<char> seen(n, 0);
    for (const int v : perm)
        if (v < 0 || static_cast<std::size_t>(v) >= n || seen[static_cast<std::size_t>(v)]++)
            throw Invalid("not a permutation");
    std::fill(seen.begin(), seen.end(), 0);
    int odd = 0;
    for (std::size_t start = 0; start < n; ++start) {
        if (seen[start]) continue;
        int length = 0;
        for (std::size_t i = start; !seen[i]; i = static_cast<std::size_t>(perm[i])) {
            seen[i] = 1;
            ++length;
        }
        odd += length % 2;
    }
    return odd;
}

int matrix_extremes_run(const std::vector<std::vector<double>>& entries) {
    const auto n = entries.size();
    std::vector<double> flat;
    flat.reserve(n * n);
    for (const auto& row : entries) {
        if (row.size() != n) throw Invalid("matrix must be square");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    std::sort(flat.begin(), flat.end());
    if (std::adjacent_find(flat.begin(), flat.end()) != flat.end())
        throw Invalid("matrix entries must be pairwise distinct");

    std::vector<char> alive(n, 1);
    std::size_t remaining = n;
    int diagonal_rounds = 0;
    while (remaining > 0) {
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (!alive[j]) continue;
                if (entries[i][j] < best) {
                    best = entries[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        if (bi == bj) {
            ++diagonal_rounds;
            alive[bi] = 0;
            remaining -= 1;
        } else {
            alive[bi] = alive[bj] = 0;
            remaining -= 2;
        }
    }
    return diagonal_rounds;
}

int two_step_distance(const std::vector<unsigned char>& bernoullis) {
    // A black step out of node 1 would leave the graph, so no valid
    // realization carries a 0 in the first slot — reject it even when the
    // walk from n happens to skip node 1.
    if (!bernoullis.empty() && bernoullis.front() == 0)
        throw Invalid("the step out of node 1 must be red");
    int m = static_cast<int>(bernoullis.size());
    int red = 0;
    while (m > 0) {
        if (bernoullis[static_cast<std::size_t>(m - 1)]) {
            ++red;
            m -= 1;
        } else {
            if (m < 2) throw Invalid("the step out of node 1 must be red");
            m -= 2;
        }
    }
    return red;
}

int sample_two_step(long long n, Rng& rng) {
    if (n < 0) throw Invalid("negative start node");
    long long m = n;
    int red = 0;
    while (m > 0) {
        if (rng.bernoulli_inv(static_cast<std::uint64_t>(m))) {
            ++red;
            m -= 1;
        } else {
            m -= 2;
        }
    }
    return red;
}

SurvivorDistribution two_step_law(int n) {
    if (n < 0) throw Invalid("negative start node");
    // Direct convolution of D_m = B_m (1 + D_{m-1}) + (1 - B_m) D_{m-2}
    // over plain rationals.
    std::vector<Rat> prev{Rat(1)};           // law of D_0
    std::vector<Rat> cur{Rat(0), Rat(1)};    // law of D_1
    if (n == 0) cur = prev;
    for (int m = 2; m <= n; ++m) {
        std::vector<Rat> next(static_cast<std::size_t>(m) + 1);
        const Rat pm(1, m);
        const Rat qm = Rat(1) - pm;
        for (int k = 0; k + 1 <= m; ++k)
            if (k < static_cast<int>(cur.size()))
                next[static_cast<std::size_t>(k) + 1] += pm * cur[static_cast<std::size_t>(k)];
        for (int k = 0; k < static_cast<int>(prev.size()); ++k)
            next[static_cast<std::size_t>(k)] += qm * prev[static_cast<std::size_t>(k)];
        prev = std::move(cur);
        cur = std::move(next);
    }
    SurvivorDistribution out;
    out.n = n;
    for (int k = 0; k < static_cast<int>(cur.size()); ++k)
        if (!cur[static_cast<std::size_t>(k)].is_zero()) out.mass[k] = cur[static_cast<std::size_t>(k)];
    return out;
}

Comparison compare_empirical(const std::vector<int>& samples, const SurvivorDistribution& reference) {
    if (samples.empty()) throw EmptySample("no samples to compare");
    const double total = static_cast<double>(samples.size());

    std::map<int, long long> observed;
    for (const int k : samples) observed[k] += 1;

    Comparison out;
    long long outside = 0;
    // Total variation over the union of supports.
    for (const auto& [k, c] : observed) {
        const Rat p = reference(k);
        out.tv += std::abs(static_cast<double>(c) / total - p.to_double());
        if (p.is_zero()) outside += c;
    }
    for (const auto& [k, mass] : reference.mass)
        if (!observed.count(k) && !mass.is_zero()) out.tv += mass.to_double();
    out.tv /= 2.0;

    // Chi-square over the reference support, pooling cells until each
    // pool expects at least 5 observations.
    struct Pool {
        double expected = 0.0;
        double seen = 0.0;
    };
    std::vector<Pool> pools;
    Pool open;
    for (const auto& [k, mass] : reference.mass) {
        if (mass.is_zero()) continue;
        open.expected += mass.to_double() * total;
        open.seen += observed.count(k) ? static_cast<double>(observed.at(k)) : 0.0;
        if (open.expected >= 5.0) {
            pools.push_back(open);
            open = Pool{};
        }
    }
    if (open.expected > 0.0) {
        if (!pools.empty()) {
            pools.back().expected += open.expected;
            pools.back().seen += open.seen;
        } else {
            pools.push_back(open);
        }
    }
    out.dof = static_cast<int>(pools.size()) - 1;
    for (const Pool& pool : pools)
        out.chi_square += (pool.seen - pool.expected) * (pool.seen - pool.expected) / pool.expected;

    if (outside > 0) {
        // Mass observed where the reference puts none: certain mismatch.
        out.chi_square = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
    } else if (out.dof <= 0) {
        out.p_value = 1.0;
    } else {
        const boost::math::chi_squared dist(out.dof);
        out.p_value = boost::math::cdf(boost::math::complement(dist, out.chi_square));
    }
    return out;
}

} // namespace bullets
