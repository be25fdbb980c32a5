#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "taulab/hash.hpp"
#include "taulab/tau.hpp"

namespace taulab {

// Exhaustive scans refuse to run above these sizes unless forced; the CLI
// can widen them through TAULAB_MAX_N or --force.
inline constexpr unsigned kCensusGuardN = 20;
inline constexpr unsigned kEnumGuardN = 24;
inline constexpr unsigned kIrreducibleGuardN = 16;

// Full preimage structure of one instance: counts[y] is the preimage size
// of y and witnesses[y] the smallest preimage (kNoWitness when empty).
struct PreimageReport {
    static constexpr std::uint64_t kNoWitness = ~std::uint64_t{0};

    unsigned n = 0;
    std::vector<std::uint64_t> counts;
    std::vector<std::uint64_t> witnesses;

    std::uint64_t domain_size() const { return counts.size(); }
};

// Evaluates tau over all 2^n inputs. The parallel kernel merges partial
// tallies with atomic adds and takes the minimum witness, so the result is
// identical for any worker count; the serial variant is the reference.
PreimageReport preimage_census(const TauInstance& tau, bool force = false);
PreimageReport preimage_census_serial(const TauInstance& tau, bool force = false);

// All x with tau(x) = y, ascending.
std::vector<std::uint64_t> brute_force_preimage(const TauInstance& tau,
                                                const mpz_class& y,
                                                bool force = false);
std::vector<std::uint64_t> brute_force_preimage_serial(const TauInstance& tau,
                                                       const mpz_class& y,
                                                       bool force = false);

// All x in [0, 2^n_bits) with h(x) = m, ascending. m must be below h.t.
std::vector<std::uint64_t> h_inv(const HashParams& h, std::uint64_t m,
                                 unsigned n_bits, bool force = false);

struct RandomizedInvertReport {
    std::uint64_t budget = 0;
    std::uint64_t hits = 0;
    std::optional<mpz_class> witness;                    // first hit
    double success_rate = 0.0;                           // hits / budget
    double single_trial_claim = 0.0;                     // (1/8)^n
    std::optional<double> census_rate;                   // |preimage| / 2^n
    std::vector<std::pair<unsigned, double>> envelopes;  // (c, n^-c)
};

// Samples `budget` uniform inputs and counts hits on y. When a census is
// supplied, census_rate records the true preimage density for comparison.
RandomizedInvertReport randomized_invert(const TauInstance& tau, const mpz_class& y,
                                         std::uint64_t budget, std::uint64_t seed,
                                         const PreimageReport* census = nullptr,
                                         const std::vector<unsigned>& envelope_cs = {1, 2, 3});

// Pr over uniform x of output bit i (1-based, bit 1 most significant)
// taking value v.
double bit_event_probability(const PreimageReport& report, unsigned i, unsigned v);

// Pr[bit i = vi | bit j = vj]; empty when no input realizes bit j = vj.
std::optional<double> conditional_bit_probability(const PreimageReport& report,
                                                  unsigned i, unsigned j,
                                                  unsigned vi, unsigned vj);

unsigned ones_count(std::uint64_t y);
unsigned ones_count(const mpz_class& y);

// Irreducibility over the code set {(x << n) | tau(x)}: a code is
// irreducible when no other code lies at Hamming distance 1.
struct IrreducibleReport {
    unsigned n = 0;
    unsigned k = 0;
    std::uint64_t size = 0;               // number of irreducible codes
    double bound = 0.0;                   // 2^n / k
    bool holds = false;                   // size > 2^n / k, exact comparison
    std::vector<std::uint64_t> members;   // irreducible codes, ascending
};

// Flip-probe kernel: hashes the code set and probes all 2n single-bit
// flips of each code. The all-pairs variant compares every code pair by
// Hamming distance instead; both must agree.
IrreducibleReport irreducible_census(const TauInstance& tau, unsigned k,
                                     bool force = false);
IrreducibleReport irreducible_census_all_pairs(const TauInstance& tau, unsigned k,
                                               bool force = false);

// Same kernels over an explicit code list (each code 2n bits, x part unique).
IrreducibleReport irreducible_from_codes(unsigned n, const std::vector<std::uint64_t>& codes,
                                         unsigned k);
IrreducibleReport irreducible_from_codes_all_pairs(unsigned n,
                                                   const std::vector<std::uint64_t>& codes,
                                                   unsigned k);

}  // namespace taulab
