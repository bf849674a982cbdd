#include "bullets/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "bullets/engine.hpp"
#include "bullets/enumeration.hpp"
#include "bullets/errors.hpp"
#include "bullets/io.hpp"
#include "bullets/law.hpp"
#include "bullets/models.hpp"
#include "bullets/rng.hpp"
#include "bullets/scheme.hpp"

namespace bullets {
namespace {

/// Resolved flag values of one invocation; every handler reads from here and
/// the manifest records the subset its subcommand accepts.
struct Flags {
    int n = 0;
    std::string params_path;
    std::string model;
    long long samples = 100000;
    std::uint64_t seed = 1;
    int jobs = 0;
    std::string format = "json";
    long long max_n = 0; ///< 0 = not set
    std::string segment; ///< --s: "0", "H", "H/2", or a rational
    std::string filter;  ///< --A: zero|nonneg|positive
    std::string out_path;
    std::string suite;
    std::string profile = "square";
};

/// What a handler hands back to the shared emission path.
struct CommandResult {
    Json payload;     ///< used when text is empty
    std::string text; ///< preformatted payload (CSV rows, verify table)
    int code = 0;
};

/// Bound precedence: --max-n flag, then BULLETS_MAX_N, then the built-in.
long long resolve_bound(const Flags& f, long long fallback) {
    if (f.max_n > 0) return f.max_n;
    if (const char* env = std::getenv("BULLETS_MAX_N")) {
        char* end = nullptr;
        const long long parsed = std::strtoll(env, &end, 10);
        if (end == env || *end != '\0' || parsed <= 0)
            throw Invalid("BULLETS_MAX_N: expected a positive integer, got \"" +
                          std::string(env) + "\"");
        return parsed;
    }
    return fallback;
}

int checked_int_bound(long long bound) {
    if (bound > 1000000) throw Invalid("bound: exceeds the supported maximum of 1000000");
    return static_cast<int>(bound);
}

std::string format_double(double x, int digits = 6) {
    std::ostringstream s;
    s << std::setprecision(digits) << x;
    return s.str();
}

// ---------------------------------------------------------------------------
// Seeded experiment material shared by verify suites.

/// Dyadic speeds and delays on a 2^-10 grid, redrawn until the parameter
/// admits no critical pattern.
Parameter random_generic_parameter(int n, Rng& rng) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::set<Rat> speeds;
        while (static_cast<int>(speeds.size()) < n)
            speeds.insert(Rat(static_cast<long long>(rng.below(1u << 20)), 1 << 10));
        Parameter p;
        p.speeds.assign(speeds.begin(), speeds.end());
        for (int j = 0; j + 1 < n; ++j)
            p.delays.push_back(Rat(static_cast<long long>(rng.below(1u << 20)) + 1, 1 << 10));
        if (is_generic(p)) return p;
    }
    throw Invalid("no generic parameter found after 200 attempts");
}

/// Constrained parameter shaped so that segment crossings occur in a
/// positive fraction of configurations: a narrow speed band, small free
/// delays, and a large distinguished delay keep the crossing window open.
ConstrainedParameter random_constrained_parameter(int n, Rng& rng) {
    std::set<Rat> speeds;
    while (static_cast<int>(speeds.size()) < n)
        speeds.insert(Rat(1024) + Rat(static_cast<long long>(rng.below(1u << 15)), 1 << 10));
    const std::vector<Rat> sorted(speeds.begin(), speeds.end());

    ConstrainedParameter cp;
    cp.v_min = sorted.front();
    const int r = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n) - 2));
    cp.v_r = sorted[static_cast<std::size_t>(r)];
    for (int i = 1; i < n; ++i)
        if (i != r) cp.free_speeds.push_back(sorted[static_cast<std::size_t>(i)]);
    for (int j = 0; j < n - 2; ++j)
        cp.free_delays.push_back(Rat(static_cast<long long>(rng.below(1u << 12)) + 1, 1 << 10));
    cp.delta_star = Rat(512) + Rat(static_cast<long long>(rng.below(1u << 19)), 1 << 10);
    cp.s = intersection_height(cp);
    cp.validate();
    return cp;
}

std::vector<int> random_permutation(int n, Rng& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    return perm;
}

// ---------------------------------------------------------------------------
// dist

CommandResult cmd_dist(const Flags& f) {
    const long long bound = resolve_bound(f, 5000);
    if (f.n > bound)
        throw SizeLimit("dist: n = " + std::to_string(f.n) +
                        " exceeds the exact-law bound " + std::to_string(bound) +
                        " (raise --max-n or BULLETS_MAX_N)");
    const SurvivorDistribution law = q_exact(f.n);
    const auto [mean, variance] = q_moments_exact(f.n, checked_int_bound(bound));

    CommandResult result;
    result.payload["n"] = f.n;
    result.payload["mass"] = law_json(law);
    result.payload["mean"] = rat_json(mean);
    result.payload["variance"] = rat_json(variance);
    if (f.format == "csv") {
        std::string rows = "k,mass\n";
        for (const auto& [k, mass] : law.mass) rows += std::to_string(k) + "," + mass.str() + "\n";
        result.text = std::move(rows);
    }
    return result;
}

// ---------------------------------------------------------------------------
// enumerate

Rat segment_height_from_spec(const std::string& spec, const ConstrainedParameter& cp) {
    if (spec.empty() || spec == "H") return intersection_height(cp);
    if (spec == "H/2") return intersection_height(cp) / Rat(2);
    try {
        return Rat::parse(spec);
    } catch (const Invalid& e) {
        throw Invalid(std::string("--s: ") + e.what());
    }
}

CrossingFilter filter_from_flag(const std::string& name) {
    if (name == "zero") return CrossingFilter::Zero;
    if (name == "nonneg") return CrossingFilter::AllNonneg;
    if (name == "positive") return CrossingFilter::Positive;
    throw Invalid("--A: expected one of zero|nonneg|positive, got \"" + name + "\"");
}

Json frequency_json(const CountTable& t) {
    Json out = Json::object();
    for (const auto& [k, c] : t.count) out[std::to_string(k)] = Rat(c, t.total).str();
    return out;
}

CommandResult cmd_enumerate(const Flags& f, RunManifest& manifest) {
    const std::string file_text = read_text_file(f.params_path);
    manifest.parameter_hash = content_hash(file_text);
    Json file;
    try {
        file = Json::parse(file_text);
    } catch (const nlohmann::json::exception& e) {
        throw Invalid(f.params_path + ": " + e.what());
    }

    CommandResult result;
    if (f.model == "ff") {
        const Parameter p = parameter_from_json(file);
        const long long bound = resolve_bound(f, 7);
        const auto patterns =
            find_critical_patterns(p, std::max(checked_int_bound(bound), 12));
        if (!patterns.empty()) {
            result.payload["error"] = Json::object();
            result.payload["error"]["type"] = "singular parameter";
            result.payload["error"]["message"] =
                "the parameter admits " + std::to_string(patterns.size()) +
                " critical pattern(s); the survivor law is ambiguous";
            Json list = Json::array();
            for (const auto& cp : patterns) list.push_back(critical_pattern_json(cp));
            result.payload["critical_patterns"] = std::move(list);
            result.code = 3;
            return result;
        }
        const CountTable table = enumerate_ff(p, checked_int_bound(bound));
        const std::vector<long long> per_speed =
            speed_survival_counts(p, checked_int_bound(bound));

        result.payload["model"] = "ff";
        result.payload["n"] = p.n();
        result.payload["total"] = std::to_string(table.total);
        result.payload["count"] = count_table_json(table)["count"];
        result.payload["frequency"] = frequency_json(table);
        Json speeds = Json::array();
        for (const long long c : per_speed) speeds.push_back(std::to_string(c));
        result.payload["per_speed"] = std::move(speeds);
        if (f.format == "csv") {
            std::string rows = "k,count,frequency\n";
            for (const auto& [k, c] : table.count)
                rows += std::to_string(k) + "," + std::to_string(c) + "," +
                        Rat(c, table.total).str() + "\n";
            result.text = std::move(rows);
        }
        return result;
    }

    // left / right
    ConstrainedParameter cp = constrained_from_json(file);
    if (!f.segment.empty()) cp.s = segment_height_from_spec(f.segment, cp);
    if (!f.filter.empty()) cp.filter = filter_from_flag(f.filter);
    cp.validate();
    const long long bound = resolve_bound(f, 6);
    const ConstrainedSide side =
        f.model == "left" ? ConstrainedSide::Left : ConstrainedSide::Right;
    const CountTable table = enumerate_constrained(cp, side, checked_int_bound(bound));

    result.payload["model"] = f.model;
    result.payload["n"] = cp.n();
    result.payload["height"] = rat_json(intersection_height(cp));
    result.payload["s"] = rat_json(cp.s);
    result.payload["filter"] =
        cp.filter == CrossingFilter::Zero
            ? "zero"
            : (cp.filter == CrossingFilter::AllNonneg ? "nonneg" : "positive");
    result.payload["total"] = std::to_string(table.total);
    result.payload["count"] = count_table_json(table)["count"];
    if (f.format == "csv") {
        std::string rows = "k,count\n";
        for (const auto& [k, c] : table.count)
            rows += std::to_string(k) + "," + std::to_string(c) + "\n";
        result.text = std::move(rows);
    }
    return result;
}

// ---------------------------------------------------------------------------
// simulate

enum class SimModel { Ru, Rr, Ff, Faf, Flock, Cycles, Matrix, Twostep };

SimModel sim_model_from_name(const std::string& name) {
    if (name == "ru") return SimModel::Ru;
    if (name == "rr") return SimModel::Rr;
    if (name == "ff") return SimModel::Ff;
    if (name == "faf") return SimModel::Faf;
    if (name == "flock") return SimModel::Flock;
    if (name == "cycles") return SimModel::Cycles;
    if (name == "matrix") return SimModel::Matrix;
    if (name == "twostep") return SimModel::Twostep;
    throw Invalid("--model: unknown model \"" + name + "\"");
}

Acceleration profile_from_name(const std::string& name) {
    if (name == "square") return {Acceleration::Kind::Square, {}};
    if (name == "sqrt") return {Acceleration::Kind::Sqrt, {}};
    if (name == "oneminusexp") return {Acceleration::Kind::OneMinusExp, {}};
    if (name == "identity") return {Acceleration::Kind::Custom, {{0.0, 0.0}, {1.0, 1.0}}};
    throw Invalid("--profile: expected square|sqrt|oneminusexp|identity, got \"" + name + "\"");
}

struct SimContext {
    SimModel model;
    int n = 0;
    SpeedSampler uniform = SpeedSampler::uniform01();
    SpeedSampler expo = SpeedSampler::exponential(1.0);
    std::optional<FfSampler> ff;
    std::optional<FafSampler> faf;
};

int draw_sample(const SimContext& ctx, Rng& rng) {
    switch (ctx.model) {
    case SimModel::Ru: return sample_ru(ctx.n, ctx.uniform, rng);
    case SimModel::Rr: return sample_rr(ctx.n, ctx.uniform, ctx.expo, rng);
    case SimModel::Ff: return (*ctx.ff)(rng);
    case SimModel::Faf: return (*ctx.faf)(rng);
    case SimModel::Flock: {
        std::vector<double> speeds(static_cast<std::size_t>(ctx.n));
        for (double& v : speeds) v = rng.unit();
        return flock_run(speeds).final_size;
    }
    case SimModel::Cycles: return odd_cycle_count(random_permutation(ctx.n, rng));
    case SimModel::Matrix: {
        std::vector<std::vector<double>> m(
            static_cast<std::size_t>(ctx.n),
            std::vector<double>(static_cast<std::size_t>(ctx.n)));
        for (auto& row : m)
            for (double& x : row) x = rng.unit();
        return matrix_extremes_run(m);
    }
    case SimModel::Twostep: return sample_two_step(ctx.n, rng);
    }
    throw Invalid("--model: unknown enumerator");
}

CommandResult cmd_simulate(const Flags& f, RunManifest& manifest) {
    SimContext ctx;
    ctx.model = sim_model_from_name(f.model);

    const bool needs_file = ctx.model == SimModel::Ff || ctx.model == SimModel::Faf;
    if (needs_file) {
        if (f.params_path.empty())
            throw Invalid("--params: required for the ff and faf models");
        const std::string file_text = read_text_file(f.params_path);
        manifest.parameter_hash = content_hash(file_text);
        Json file;
        try {
            file = Json::parse(file_text);
        } catch (const nlohmann::json::exception& e) {
            throw Invalid(f.params_path + ": " + e.what());
        }
        if (ctx.model == SimModel::Ff) {
            const Parameter p = parameter_from_json(file);
            ctx.n = p.n();
            ctx.ff.emplace(p);
        } else {
            ImpetusProblem ip = impetus_from_json(file);
            ip.f = profile_from_name(f.profile);
            ctx.n = ip.n();
            ctx.faf.emplace(ip);
        }
        if (f.n != 0 && f.n != ctx.n)
            throw Invalid("--n: disagrees with the parameter file (" + std::to_string(f.n) +
                          " vs " + std::to_string(ctx.n) + ")");
    } else {
        if (f.n <= 0) throw Invalid("--n: required and positive for this model");
        ctx.n = f.n;
    }

    // One derived stream per sample index: the histogram is independent of
    // the thread count and of the schedule.
    const Rng master(f.seed);
    std::map<int, long long> histogram;
    std::exception_ptr failure = nullptr;
    int stop = 0;
#pragma omp parallel
    {
        std::map<int, long long> local;
#pragma omp for schedule(static) nowait
        for (long long i = 0; i < f.samples; ++i) {
            int skip;
#pragma omp atomic read
            skip = stop;
            if (skip) continue;
            try {
                Rng sub = master.derive(static_cast<std::uint64_t>(i));
                ++local[draw_sample(ctx, sub)];
            } catch (...) {
#pragma omp critical(bullets_cli_sim_failure)
                if (!failure) failure = std::current_exception();
#pragma omp atomic write
                stop = 1;
            }
        }
#pragma omp critical(bullets_cli_sim_merge)
        for (const auto& [k, c] : local) histogram[k] += c;
    }
    if (failure) std::rethrow_exception(failure);

    CommandResult result;
    result.payload["model"] = f.model;
    result.payload["n"] = ctx.n;
    result.payload["samples"] = f.samples;
    result.payload["seed"] = f.seed;
    result.payload["floating"] = true;
    Json hist = Json::object();
    for (const auto& [k, c] : histogram) hist[std::to_string(k)] = c;
    result.payload["histogram"] = std::move(hist);

    if (ctx.n <= 2000) {
        std::vector<int> samples;
        samples.reserve(static_cast<std::size_t>(f.samples));
        for (const auto& [k, c] : histogram)
            samples.insert(samples.end(), static_cast<std::size_t>(c), k);
        const Comparison cmp = compare_empirical(samples, q_exact(ctx.n));
        Json c = Json::object();
        c["tv"] = cmp.tv;
        c["chi_square"] = cmp.chi_square;
        c["dof"] = cmp.dof;
        c["p_value"] = cmp.p_value;
        result.payload["comparison"] = std::move(c);
    } else {
        result.payload["comparison"] = nullptr;
    }

    if (f.format == "csv") {
        std::string rows = "k,count\n";
        for (const auto& [k, c] : histogram)
            rows += std::to_string(k) + "," + std::to_string(c) + "\n";
        result.text = std::move(rows);
    }
    return result;
}

// ---------------------------------------------------------------------------
// alt: exact routes through the alternative models

CommandResult cmd_alt(const Flags& f) {
    CommandResult result;
    SurvivorDistribution law;
    law.n = f.n;
    long long total = 0;

    if (f.model == "flock" || f.model == "cycles") {
        const long long bound = resolve_bound(f, 8);
        if (f.n > bound)
            throw SizeLimit("alt: n = " + std::to_string(f.n) +
                            " exceeds the exhaustive bound " + std::to_string(bound) +
                            " (raise --max-n or BULLETS_MAX_N)");
        total = factorial(f.n);
        std::map<int, long long> hist;
        if (f.model == "flock") {
            std::vector<double> speeds(static_cast<std::size_t>(f.n));
            std::iota(speeds.begin(), speeds.end(), 1.0);
            do {
                hist[flock_run(speeds).final_size] += 1;
            } while (std::next_permutation(speeds.begin(), speeds.end()));
        } else {
            std::vector<int> perm(static_cast<std::size_t>(f.n));
            std::iota(perm.begin(), perm.end(), 0);
            do {
                hist[odd_cycle_count(perm)] += 1;
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        for (const auto& [k, c] : hist) law.mass[k] = Rat(c, total);
    } else { // twostep
        const long long bound = resolve_bound(f, 2000);
        if (f.n > bound)
            throw SizeLimit("alt: n = " + std::to_string(f.n) +
                            " exceeds the convolution bound " + std::to_string(bound) +
                            " (raise --max-n or BULLETS_MAX_N)");
        law = two_step_law(f.n);
    }

    const SurvivorDistribution reference = q_exact(f.n);
    const bool matches = law.mass == reference.mass;

    result.payload["model"] = f.model;
    result.payload["n"] = f.n;
    if (total > 0) result.payload["total"] = std::to_string(total);
    result.payload["law"] = law_json(law);
    result.payload["matches_survivor_law"] = matches;
    if (f.format == "csv") {
        std::string rows = "k,mass\n";
        for (const auto& [k, mass] : law.mass) rows += std::to_string(k) + "," + mass.str() + "\n";
        result.text = std::move(rows);
    }
    return result;
}

// ---------------------------------------------------------------------------
// analyze

CommandResult cmd_analyze(const Flags& f, RunManifest& manifest) {
    const std::string file_text = read_text_file(f.params_path);
    manifest.parameter_hash = content_hash(file_text);
    Json file;
    try {
        file = Json::parse(file_text);
    } catch (const nlohmann::json::exception& e) {
        throw Invalid(f.params_path + ": " + e.what());
    }
    const Parameter p = parameter_from_json(file);
    const long long bound = resolve_bound(f, 12);
    const auto patterns = find_critical_patterns(p, checked_int_bound(bound));

    CommandResult result;
    result.payload["n"] = p.n();
    result.payload["generic"] = patterns.empty();
    result.payload["pattern_count"] = patterns.size();
    Json list = Json::array();
    for (const auto& cp : patterns) list.push_back(critical_pattern_json(cp));
    result.payload["patterns"] = std::move(list);
    return result;
}

// ---------------------------------------------------------------------------
// trajectory

CommandResult cmd_trajectory(const Flags& f, RunManifest& manifest) {
    const long long cap = resolve_bound(f, 5000);
    std::vector<Rat> speeds;
    std::vector<Rat> delays;
    int n = 0;

    if (!f.params_path.empty()) {
        const std::string file_text = read_text_file(f.params_path);
        manifest.parameter_hash = content_hash(file_text);
        Json file;
        try {
            file = Json::parse(file_text);
        } catch (const nlohmann::json::exception& e) {
            throw Invalid(f.params_path + ": " + e.what());
        }
        // The speeds array is the stream in shot order (not necessarily
        // sorted), the delays array the inter-shot gaps.
        const ImpetusProblem ip = impetus_from_json(file);
        ip.validate();
        n = ip.n();
        speeds = ip.impetuses;
        delays = ip.delays;
    } else {
        if (f.n <= 0) throw Invalid("--n: required when no --params file is given");
        n = f.n;
        Rng rng(f.seed);
        speeds = SpeedSampler::uniform01().draw_distinct(n, rng);
        delays.assign(static_cast<std::size_t>(n) - 1, Rat(1));
    }
    if (n > cap)
        throw SizeLimit("trajectory: n = " + std::to_string(n) + " exceeds the cap " +
                        std::to_string(cap) + " (raise --max-n or BULLETS_MAX_N)");

    const std::vector<int> series = survivor_trajectory(speeds, delays, n);

    CommandResult result;
    if (f.format == "csv") {
        result.text = trajectory_csv(series);
    } else {
        result.payload["n"] = n;
        result.payload["series"] = series;
    }
    return result;
}

// ---------------------------------------------------------------------------
// verify

struct Reporter {
    std::ostringstream rows;
    bool failed = false;

    bool check(const std::string& name, bool ok, const std::string& detail) {
        rows << (ok ? "[ OK ] " : "[FAIL] ") << name << ": " << detail << "\n";
        if (!ok) failed = true;
        return ok;
    }
};

void suite_qn(Reporter& r, std::uint64_t seed) {
    const SurvivorDistribution q2 = q_exact(2), q3 = q_exact(3), q4 = q_exact(4);
    const bool hand = q2(0) == Rat(1, 2) && q2(2) == Rat(1, 2) && q3(1) == Rat(5, 6) &&
                      q3(3) == Rat(1, 6) && q4(0) == Rat(3, 8) && q4(2) == Rat(7, 12) &&
                      q4(4) == Rat(1, 24);
    if (!r.check("qn.hand-values", hand, "q_2, q_3, q_4 equal the hand-computed tables")) return;

    const auto laws = q_exact_upto(200);
    Rat product(1);
    bool prod_ok = true;
    for (int m = 1; m <= 100 && prod_ok; ++m) {
        product *= Rat(1) - Rat(1, 2 * m);
        prod_ok = laws[static_cast<std::size_t>(2 * m)](0) == product;
    }
    if (!r.check("qn.no-survivor-product", prod_ok,
                 "q_{2m}(0) equals the telescoping product for m <= 100"))
        return;

    Rng rng(seed);
    for (int n = 2; n <= 6; ++n) {
        const Parameter p = random_generic_parameter(n, rng);
        const CountTable t = enumerate_ff(p);
        const SurvivorDistribution q = q_exact(n);
        bool ok = t.total == factorial(n) * factorial(n - 1);
        for (int k = 0; k <= n && ok; ++k)
            ok = Rat(t.count.count(k) ? t.count.at(k) : 0, t.total) == q(k);
        if (!r.check("qn.enumeration-n" + std::to_string(n), ok,
                     "exhaustive configuration frequencies equal the exact law"))
            return;
    }
}

void suite_lrrr(Reporter& r, std::uint64_t seed) {
    Rng rng(seed);
    for (int n = 4; n <= 5; ++n) {
        ConstrainedParameter cp = random_constrained_parameter(n, rng);
        const Rat height = intersection_height(cp);
        const std::vector<std::pair<std::string, Rat>> segments{
            {"0", Rat(0)}, {"H/2", height / Rat(2)}, {"H", height}};
        const std::vector<std::pair<std::string, CrossingFilter>> filters{
            {"zero", CrossingFilter::Zero},
            {"nonneg", CrossingFilter::AllNonneg},
            {"positive", CrossingFilter::Positive}};
        for (const auto& [s_name, s] : segments) {
            for (const auto& [a_name, filter] : filters) {
                cp.s = s;
                cp.filter = filter;
                const CountTable left = enumerate_constrained(cp, ConstrainedSide::Left);
                const CountTable right = enumerate_constrained(cp, ConstrainedSide::Right);
                if (!r.check("lrrr.n" + std::to_string(n) + ".s=" + s_name + ".A=" + a_name,
                             left == right,
                             "left- and right-constrained counts agree for every k"))
                    return;
            }
        }
    }
}

void suite_tcs(Reporter& r, std::uint64_t seed) {
    Rng rng(seed);
    for (int n = 3; n <= 5; ++n) {
        const Parameter p = random_generic_parameter(n, rng);
        bool ok = true;
        long long configs = 0;
        std::string note = "sign-table recursion equals the engine on every configuration";
        try {
            std::vector<int> sigma(static_cast<std::size_t>(n));
            std::iota(sigma.begin(), sigma.end(), 0);
            do {
                std::vector<int> tau(static_cast<std::size_t>(n) - 1);
                std::iota(tau.begin(), tau.end(), 0);
                do {
                    const Configuration c{sigma, tau};
                    const Diagram d = resolve(realize(p, c));
                    if (survivors_from_tcs(compute_tcs(p, c)) != d.survivors) ok = false;
                    ++configs;
                } while (ok && std::next_permutation(tau.begin(), tau.end()));
            } while (ok && std::next_permutation(sigma.begin(), sigma.end()));
        } catch (const RecursionStuck& e) {
            ok = false;
            note = std::string("recursion stuck: ") + e.what();
        }
        if (!r.check("tcs.n" + std::to_string(n), ok,
                     note + " (" + std::to_string(configs) + " configurations)"))
            return;
    }
}

void suite_faf(Reporter& r, std::uint64_t seed) {
    ImpetusProblem ip;
    ip.impetuses = {Rat(1), Rat(10), Rat(11), Rat(12), Rat(25, 2), Rat(13)};
    ip.delays = {Rat(1), Rat(2, 7), Rat(5, 11), Rat(3, 13), Rat(7, 17)};
    Parameter linear;
    linear.speeds = ip.impetuses;
    linear.delays = ip.delays;
    const FfSampler ff(linear);

    for (const std::string name : {"square", "sqrt", "oneminusexp"}) {
        ip.f = profile_from_name(name);
        const FafSampler faf(ip);
        Rng ra(seed), rb(seed);
        bool ok = true;
        for (int i = 0; i < 500 && ok; ++i)
            ok = faf.sample_diagram(ra).survivors == ff.sample_diagram(rb).survivors;
        Rng audit_rng(seed + 1);
        const bool audited = faf.audit(500, audit_rng);
        if (!r.check("faf." + name, ok && audited,
                     "500 same-seed survivor sets match the linear run; height audit passes"))
            return;
    }
}

void suite_clt(Reporter& r, std::uint64_t) {
    const FloatMoments big = q_moments_float(1000000);
    const double half_log = 0.5 * std::log(1e6);
    if (!r.check("clt.mean-growth", std::abs(big.mean - half_log) <= 1.0,
                 "mean " + format_double(big.mean) + " within 1 of " + format_double(half_log)))
        return;
    if (!r.check("clt.variance-growth", std::abs(big.variance - half_log) <= 1.5,
                 "variance " + format_double(big.variance) + " within 1.5 of " +
                     format_double(half_log)))
        return;

    const auto [exact_mean, exact_var] = q_moments_exact(300);
    const FloatMoments small = q_moments_float(300);
    const bool cross = std::abs(small.mean - exact_mean.to_double()) < 1e-9 &&
                       std::abs(small.variance - exact_var.to_double()) < 1e-9;
    if (!r.check("clt.float-vs-exact", cross,
                 "floating moment recurrences match the exact moments at n = 300"))
        return;
}

void suite_flock(Reporter& r, std::uint64_t seed) {
    Rng rng(seed);
    const int draws = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double t = static_cast<double>(flock_destruction_time(0.5, rng));
        sum += t;
        sum_sq += t * t;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sum_sq / draws - mean * mean) / (draws - 1));
    if (!r.check("flock.destruction-mean", std::abs(mean - 4.0) < 3.0 * se,
                 "sample mean " + format_double(mean) + " within 3 SE of 4"))
        return;

    std::vector<double> speeds;
    speeds.reserve(100000);
    for (int i = 0; i < 100000; ++i) speeds.push_back(rng.unit());
    const FlockRun run = flock_run(speeds);
    bool returned = false;
    for (std::size_t j = 10; j < run.sizes.size(); ++j) returned = returned || run.sizes[j] == 0;
    if (!r.check("flock.returns-to-zero", returned,
                 "a 100000-step flock trajectory hits size 0 after step 10"))
        return;

    bool monotone = true;
    for (int rep = 0; rep < 50 && monotone; ++rep) {
        Rng sub = rng.derive(static_cast<std::uint64_t>(rep));
        std::vector<int> dist(201, 0);
        dist[1] = 1;
        for (int m = 2; m <= 200; ++m) {
            const bool red = sub.bernoulli_inv(static_cast<std::uint64_t>(m));
            dist[static_cast<std::size_t>(m)] =
                red ? 1 + dist[static_cast<std::size_t>(m - 1)]
                    : dist[static_cast<std::size_t>(m - 2)];
            if (dist[static_cast<std::size_t>(m)] < dist[static_cast<std::size_t>(m - 2)])
                monotone = false;
        }
    }
    if (!r.check("flock.two-step-monotone", monotone,
                 "even- and odd-indexed two-step distances are non-decreasing in 50 runs"))
        return;
}

CommandResult cmd_verify(const Flags& f) {
    Reporter r;
    if (f.suite == "qn")
        suite_qn(r, f.seed);
    else if (f.suite == "lrrr")
        suite_lrrr(r, f.seed);
    else if (f.suite == "tcs")
        suite_tcs(r, f.seed);
    else if (f.suite == "faf")
        suite_faf(r, f.seed);
    else if (f.suite == "clt")
        suite_clt(r, f.seed);
    else if (f.suite == "flock")
        suite_flock(r, f.seed);
    else
        throw Invalid("--suite: unknown suite \"" + f.suite + "\"");

    CommandResult result;
    result.text = r.rows.str();
    result.code = r.failed ? 2 : 0;
    return result;
}

// ---------------------------------------------------------------------------

CommandResult error_result(const std::string& type, const std::string& message, int code) {
    CommandResult result;
    result.payload["error"] = Json::object();
    result.payload["error"]["type"] = type;
    result.payload["error"]["message"] = message;
    result.code = code;
    return result;
}

std::string flag_string(long long v) { return std::to_string(v); }

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Colliding-bullets laboratory: exact survivor laws, exhaustive "
                 "configuration sweeps, and sampling experiments"};
    app.require_subcommand(1);
    Flags f;

    const auto add_format = [&](CLI::App* sub) {
        return sub->add_option("--format", f.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}));
    };
    const auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out", f.out_path, "write the payload to this file");
    };
    const auto add_max_n = [&](CLI::App* sub) {
        sub->add_option("--max-n", f.max_n, "override the built-in size bound")
            ->check(CLI::PositiveNumber);
    };
    const auto add_jobs = [&](CLI::App* sub) {
        sub->add_option("--jobs", f.jobs, "worker thread count (0 = library default)")
            ->check(CLI::NonNegativeNumber);
    };
    const auto add_seed = [&](CLI::App* sub) {
        sub->add_option("--seed", f.seed, "master seed");
    };

    CLI::App* dist = app.add_subcommand("dist", "exact survivor-count law and moments");
    dist->add_option("--n", f.n, "number of bullets")->required()->check(CLI::NonNegativeNumber);
    add_format(dist);
    add_max_n(dist);
    add_out(dist);
    add_jobs(dist);

    CLI::App* enumerate =
        app.add_subcommand("enumerate", "exhaustive sweep over all configurations");
    enumerate->add_option("--params", f.params_path, "parameter file")->required();
    enumerate->add_option("--model", f.model, "ff | left | right")
        ->required()
        ->check(CLI::IsMember({"ff", "left", "right"}));
    enumerate->add_option("--s", f.segment, "segment height: 0, H, H/2, or a rational");
    enumerate->add_option("--A", f.filter, "crossing filter")
        ->check(CLI::IsMember({"zero", "nonneg", "positive"}));
    add_format(enumerate);
    add_max_n(enumerate);
    add_out(enumerate);
    add_jobs(enumerate);

    CLI::App* simulate = app.add_subcommand("simulate", "seeded sampling experiments");
    simulate->add_option("--model", f.model, "ru | rr | ff | faf | flock | cycles | matrix | twostep")
        ->required()
        ->check(CLI::IsMember({"ru", "rr", "ff", "faf", "flock", "cycles", "matrix", "twostep"}));
    simulate->add_option("--n", f.n, "problem size (taken from --params for ff/faf)");
    simulate->add_option("--params", f.params_path, "parameter file (ff/faf)");
    simulate->add_option("--samples", f.samples, "number of draws")
        ->check(CLI::Range(1LL, 1000000000LL));
    simulate->add_option("--profile", f.profile, "acceleration profile (faf)")
        ->check(CLI::IsMember({"square", "sqrt", "oneminusexp", "identity"}));
    add_seed(simulate);
    add_format(simulate);
    add_out(simulate);
    add_jobs(simulate);

    CLI::App* alt = app.add_subcommand("alt", "exact laws of the alternative models");
    alt->add_option("--model", f.model, "flock | cycles | twostep")
        ->required()
        ->check(CLI::IsMember({"flock", "cycles", "twostep"}));
    alt->add_option("--n", f.n, "problem size")->required()->check(CLI::PositiveNumber);
    add_format(alt);
    add_max_n(alt);
    add_out(alt);
    add_jobs(alt);

    CLI::App* analyze = app.add_subcommand("analyze", "genericity report for a parameter file");
    analyze->add_option("--params", f.params_path, "parameter file")->required();
    add_max_n(analyze);
    add_out(analyze);
    add_jobs(analyze);

    CLI::App* trajectory =
        app.add_subcommand("trajectory", "survivor counts of every shot prefix");
    trajectory->add_option("--n", f.n, "bullet count for the seeded default stream");
    trajectory->add_option("--params", f.params_path,
                           "parameter file (speeds in shot order, delays in gap order)");
    add_seed(trajectory);
    auto* trajectory_format = add_format(trajectory);
    add_max_n(trajectory);
    add_out(trajectory);
    add_jobs(trajectory);

    CLI::App* verify = app.add_subcommand("verify", "self-check suites");
    verify->add_option("--suite", f.suite, "qn | lrrr | tcs | faf | clt | flock")
        ->required()
        ->check(CLI::IsMember({"qn", "lrrr", "tcs", "faf", "clt", "flock"}));
    add_seed(verify);
    add_jobs(verify);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int cli_code = app.exit(e, out, err);
        return cli_code == 0 ? 0 : 1;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();

    // The trajectory series is plot-ready CSV unless JSON is asked for.
    if (sub == trajectory && trajectory_format->count() == 0) f.format = "csv";

#ifdef _OPENMP
    if (f.jobs > 0) omp_set_num_threads(f.jobs);
#endif

    RunManifest manifest;
    manifest.subcommand = name;
    manifest.seed = f.seed;
    if (name == "dist") {
        manifest.flags = {{"format", f.format},
                          {"jobs", flag_string(f.jobs)},
                          {"max-n", flag_string(f.max_n)},
                          {"n", flag_string(f.n)},
                          {"out", f.out_path}};
    } else if (name == "enumerate") {
        manifest.flags = {{"A", f.filter},        {"format", f.format},
                          {"jobs", flag_string(f.jobs)}, {"max-n", flag_string(f.max_n)},
                          {"model", f.model},     {"out", f.out_path},
                          {"params", f.params_path},    {"s", f.segment}};
    } else if (name == "simulate") {
        manifest.flags = {{"format", f.format},
                          {"jobs", flag_string(f.jobs)},
                          {"model", f.model},
                          {"n", flag_string(f.n)},
                          {"out", f.out_path},
                          {"params", f.params_path},
                          {"profile", f.profile},
                          {"samples", flag_string(f.samples)},
                          {"seed", flag_string(static_cast<long long>(f.seed))}};
    } else if (name == "alt") {
        manifest.flags = {{"format", f.format},
                          {"jobs", flag_string(f.jobs)},
                          {"max-n", flag_string(f.max_n)},
                          {"model", f.model},
                          {"n", flag_string(f.n)},
                          {"out", f.out_path}};
    } else if (name == "analyze") {
        manifest.flags = {{"jobs", flag_string(f.jobs)},
                          {"max-n", flag_string(f.max_n)},
                          {"out", f.out_path},
                          {"params", f.params_path}};
    } else if (name == "trajectory") {
        manifest.flags = {{"format", f.format},
                          {"jobs", flag_string(f.jobs)},
                          {"max-n", flag_string(f.max_n)},
                          {"n", flag_string(f.n)},
                          {"out", f.out_path},
                          {"params", f.params_path},
                          {"seed", flag_string(static_cast<long long>(f.seed))}};
    } else { // verify
        manifest.flags = {{"jobs", flag_string(f.jobs)},
                          {"seed", flag_string(static_cast<long long>(f.seed))},
                          {"suite", f.suite}};
    }

    const auto start = std::chrono::steady_clock::now();
    CommandResult result;
    try {
        if (name == "dist")
            result = cmd_dist(f);
        else if (name == "enumerate")
            result = cmd_enumerate(f, manifest);
        else if (name == "simulate")
            result = cmd_simulate(f, manifest);
        else if (name == "alt")
            result = cmd_alt(f);
        else if (name == "analyze")
            result = cmd_analyze(f, manifest);
        else if (name == "trajectory")
            result = cmd_trajectory(f, manifest);
        else
            result = cmd_verify(f);
    } catch (const SingularParameter& e) {
        result = error_result("singular parameter", e.what(), 3);
    } catch (const NotGeneric& e) {
        result = error_result("singular parameter", e.what(), 3);
    } catch (const DegenerateConstraint& e) {
        result = error_result("degenerate constraint", e.what(), 3);
    } catch (const RecursionStuck& e) {
        result = error_result("internal verification failure", e.what(), 2);
    } catch (const Error& e) {
        result = error_result("invalid input", e.what(), 1);
    }
    const auto stop = std::chrono::steady_clock::now();
    manifest.duration_seconds = std::chrono::duration<double>(stop - start).count();

    if (result.code != 0 && result.payload.contains("error"))
        err << "error: " << result.payload["error"]["message"].get<std::string>() << "\n";

    const std::string payload_text =
        result.text.empty() ? result.payload.dump(2) + "\n" : result.text;
    std::string manifest_line;
    if (result.text.empty()) {
        Json wrapper = Json::object();
        wrapper["manifest"] = manifest.json();
        manifest_line = wrapper.dump() + "\n";
    } else {
        manifest_line = "# manifest " + manifest.json().dump() + "\n";
    }

    try {
        if (!f.out_path.empty() && result.code == 0) {
            write_text_file(f.out_path, payload_text);
            err << "wrote " << payload_text.size() << " bytes to " << f.out_path << "\n";
            out << manifest_line;
        } else {
            out << payload_text << manifest_line;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return result.code;
}

} // namespace bullets
