// Timing harness comparing the parallel kernels against their serial
// reference implementations.  Build target: bench_kernels.  Not a test —
// numbers land on stdout for eyeballing.

#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "bullets/engine.hpp"
#include "bullets/enumeration.hpp"
#include "bullets/rng.hpp"

using namespace bullets;

namespace {

double seconds(void (*body)(const Parameter&), const Parameter& p) {
    const auto t0 = std::chrono::steady_clock::now();
    body(p);
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

Parameter bench_parameter(int n) {
    // Spread-out dyadic speeds; any generic parameter works and this one is.
    Parameter p;
    Rng rng(0xb5ad4eceda1ce2a9ULL + static_cast<std::uint64_t>(n));
    std::vector<Rat> speeds;
    while (static_cast<int>(speeds.size()) < n) {
        Rat v(static_cast<long>(rng.below(1 << 20)), 1 << 10);
        bool fresh = true;
        for (const Rat& w : speeds) fresh = fresh && !(w == v);
        if (fresh) speeds.push_back(v);
    }
    std::sort(speeds.begin(), speeds.end());
    p.speeds = speeds;
    for (int i = 0; i + 1 < n; ++i)
        p.delays.push_back(Rat(static_cast<long>(rng.below(1 << 20)) + 1, 1 << 10));
    return p;
}

void run_parallel(const Parameter& p) { enumerate_ff(p); }
void run_serial(const Parameter& p) { enumerate_ff_serial(p); }

} // namespace

int main() {
    std::printf("threads available: %d\n", omp_get_max_threads());
    for (int n = 5; n <= 7; ++n) {
        const Parameter p = bench_parameter(n);
        const double ts = seconds(run_serial, p);
        const double tp = seconds(run_parallel, p);
        std::printf("enumerate n=%d (%lld configs): serial %.3fs  parallel %.3fs  speedup %.2fx\n", n,
                    factorial(n) * factorial(n - 1), ts, tp, ts / tp);
    }

    // Resolution engines head to head on long random shot sequences.
    Rng rng(0x1905ULL);
    for (const int n : {200, 400}) {
        ShotSequence shots;
        Rat birth;
        std::vector<Rat> speeds;
        while (static_cast<int>(speeds.size()) < n) {
            Rat v(static_cast<long>(rng.below(1 << 20)), 1 << 10);
            bool fresh = true;
            for (const Rat& w : speeds) fresh = fresh && !(w == v);
            if (fresh) speeds.push_back(v);
        }
        for (int i = 0; i < n; ++i) {
            birth += Rat(static_cast<long>(rng.below(1 << 20)) + 1, 1 << 10);
            shots.push_back(Shot{birth, speeds[static_cast<std::size_t>(i)]});
        }
        const auto t0 = std::chrono::steady_clock::now();
        const Diagram fast = resolve(shots);
        const auto t1 = std::chrono::steady_clock::now();
        const Diagram naive = resolve_naive(shots);
        const auto t2 = std::chrono::steady_clock::now();
        std::printf("resolve n=%d: event-driven %.3fs  all-pairs %.3fs  (survivors %d/%d)\n", n,
                    std::chrono::duration<double>(t1 - t0).count(),
                    std::chrono::duration<double>(t2 - t1).count(), fast.survivor_count(),
                    naive.survivor_count());
    }
    return 0;
}
