// Compares the parallel kernels against their serial references and
// fails if they ever disagree.
//
// Usage: taulab_bench [--n N] [--irr-n N] [--seed S] [--k K] [--workers W]

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include <omp.h>

#include "taulab/inversion.hpp"
#include "taulab/tau.hpp"

using namespace taulab;

namespace {

double seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

unsigned arg_value(int argc, char** argv, const char* flag, unsigned fallback) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::strcmp(argv[i], flag) == 0)
            return static_cast<unsigned>(std::strtoul(argv[i + 1], nullptr, 10));
    }
    return fallback;
}

}  // namespace

int main(int argc, char** argv) {
    const unsigned census_n = arg_value(argc, argv, "--n", 18);
    const unsigned irr_n = arg_value(argc, argv, "--irr-n", 12);
    const unsigned seed = arg_value(argc, argv, "--seed", 42);
    const unsigned k = arg_value(argc, argv, "--k", 3);
    const unsigned workers = arg_value(argc, argv, "--workers", 0);
    if (workers != 0) omp_set_num_threads(static_cast<int>(workers));

    int mismatches = 0;

    {
        TauInstance tau = construct(census_n, seed, std::nullopt, true);
        std::printf("census n=%u seed=%u (%d threads)\n", census_n, seed,
                    omp_get_max_threads());
        auto t0 = std::chrono::steady_clock::now();
        PreimageReport serial = preimage_census_serial(tau);
        const double t_serial = seconds(t0);
        t0 = std::chrono::steady_clock::now();
        PreimageReport parallel = preimage_census(tau);
        const double t_parallel = seconds(t0);
        const bool same =
            serial.counts == parallel.counts && serial.witnesses == parallel.witnesses;
        if (!same) ++mismatches;
        std::printf("  serial   %8.3fs\n", t_serial);
        std::printf("  parallel %8.3fs  (%.1fx, results %s)\n", t_parallel,
                    t_serial / t_parallel, same ? "identical" : "DIFFER");
    }

    {
        TauInstance tau = construct(irr_n, seed, std::nullopt, true);
        std::printf("irreducible n=%u seed=%u k=%u\n", irr_n, seed, k);
        auto t0 = std::chrono::steady_clock::now();
        IrreducibleReport probe = irreducible_census(tau, k);
        const double t_probe = seconds(t0);
        t0 = std::chrono::steady_clock::now();
        IrreducibleReport pairs = irreducible_census_all_pairs(tau, k);
        const double t_pairs = seconds(t0);
        const bool same = probe.members == pairs.members && probe.holds == pairs.holds;
        if (!same) ++mismatches;
        std::printf("  flip-probe %8.3fs\n", t_probe);
        std::printf("  all-pairs  %8.3fs  (results %s)\n", t_pairs,
                    same ? "identical" : "DIFFER");
    }

    return mismatches == 0 ? 0 : 1;
}
