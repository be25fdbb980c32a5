#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <gmpxx.h>

#include "taulab/rng.hpp"

namespace taulab {

// One member of the hash family: x -> ((a*x + b) mod p) mod t.
struct HashParams {
    mpz_class a;
    mpz_class b;
    mpz_class p;
    std::uint64_t t = 0;

    // Throws InvariantViolation naming the broken condition: p must be a
    // prime above 2, a and b must lie strictly between 0 and p, t >= 2.
    void validate() const;

    bool fits_u64() const;

    bool operator==(const HashParams& other) const = default;
};

// Hash value is always below t, hence the narrow return type.
std::uint64_t eval_hash(const HashParams& h, const mpz_class& x);

// True when h1 and h2 may live in the same collection: all three scalar
// parameters differ and neither (a, b) is an integer multiple of the other.
bool check_pair_constraints(const HashParams& h1, const HashParams& h2);

// Incremental view of a collection that answers the same admissibility
// question as running check_pair_constraints against every member, in
// O(1) amortized per query. Proportionality is keyed on the reduced pair
// (a/g, b/g): a candidate collides iff some member shares the reduced
// pair and the gcds divide one another.
class ConstraintIndex {
public:
    void insert(const HashParams& h);
    bool admissible(const HashParams& h) const;
    std::size_t size() const { return count_; }

private:
    struct MpzHasher {
        std::size_t operator()(const mpz_class& v) const;
    };

    std::unordered_set<mpz_class, MpzHasher> a_seen_;
    std::unordered_set<mpz_class, MpzHasher> b_seen_;
    std::unordered_set<mpz_class, MpzHasher> p_seen_;
    std::unordered_map<std::string, std::vector<mpz_class>> ratio_buckets_;
    std::size_t count_ = 0;
};

// Draws (p, a, b) with p a fresh prime of `width` bits until the result is
// admissible against `existing`. 1e4 rejected candidates raise
// SamplingExhaustedError naming the collection width.
HashParams sample_hash(RandomState& rng, unsigned width, std::uint64_t t,
                       const std::vector<HashParams>& existing);
HashParams sample_hash(RandomState& rng, unsigned width, std::uint64_t t,
                       ConstraintIndex& index);

// Monte Carlo estimate of Pr[h(x) = h(y)] for x != y drawn over n_bits-bit
// inputs, using hashes_per_pair fresh hashes for each of pair_count input
// pairs. Hash width is max(n_bits, 2) so a prime above 2 always exists.
double estimate_collision_probability(RandomState& rng, unsigned n_bits,
                                      std::uint64_t t, unsigned pair_count,
                                      unsigned hashes_per_pair);

}  // namespace taulab
