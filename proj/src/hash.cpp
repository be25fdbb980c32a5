#include "taulab/hash.hpp"

#include <functional>

#include "taulab/errors.hpp"

namespace taulab {
namespace {

// True iff (a1, b1) = k * (a2, b2) for some positive integer k.
bool is_multiple_of(const mpz_class& a1, const mpz_class& b1,
                    const mpz_class& a2, const mpz_class& b2) {
    if (!mpz_divisible_p(a1.get_mpz_t(), a2.get_mpz_t())) return false;
    if (!mpz_divisible_p(b1.get_mpz_t(), b2.get_mpz_t())) return false;
    return a1 / a2 == b1 / b2;
}

std::string ratio_key(const mpz_class& a, const mpz_class& b, mpz_class& gcd_out) {
    mpz_gcd(gcd_out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    mpz_class ar = a / gcd_out;
    mpz_class br = b / gcd_out;
    return ar.get_str() + ":" + br.get_str();
}

}  // namespace

void HashParams::validate() const {
    if (p <= 2) throw InvariantViolation("hash parameter p must exceed 2");
    if (!is_prime(p)) throw InvariantViolation("hash parameter p is not prime");
    if (a <= 0 || a >= p) throw InvariantViolation("hash parameter a outside (0, p)");
    if (b <= 0 || b >= p) throw InvariantViolation("hash parameter b outside (0, p)");
    if (t < 2) throw InvariantViolation("hash modulus t must be at least 2");
}

bool HashParams::fits_u64() const {
    return mpz_fits_ulong_p(p.get_mpz_t()) != 0;
}

std::uint64_t eval_hash(const HashParams& h, const mpz_class& x) {
    if (h.fits_u64()) {
        std::uint64_t p = mpz_get_ui(h.p.get_mpz_t());
        std::uint64_t a = mpz_get_ui(h.a.get_mpz_t());
        std::uint64_t b = mpz_get_ui(h.b.get_mpz_t());
        std::uint64_t xr = mpz_fdiv_ui(x.get_mpz_t(), p);
        std::uint64_t r = static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(a) * xr + b) % p);
        return r % h.t;
    }
    mpz_class r = (h.a * x + h.b) % h.p;
    return mpz_fdiv_ui(r.get_mpz_t(), h.t);
}

bool check_pair_constraints(const HashParams& h1, const HashParams& h2) {
    if (h1.a == h2.a || h1.b == h2.b || h1.p == h2.p) return false;
    if (is_multiple_of(h1.a, h1.b, h2.a, h2.b)) return false;
    if (is_multiple_of(h2.a, h2.b, h1.a, h1.b)) return false;
    return true;
}

std::size_t ConstraintIndex::MpzHasher::operator()(const mpz_class& v) const {
    std::size_t h = 0x9E3779B97F4A7C15ull;
    const mpz_srcptr raw = v.get_mpz_t();
    int limbs = raw->_mp_size;
    h ^= static_cast<std::size_t>(limbs) + (h << 6) + (h >> 2);
    for (int i = 0; i < limbs; ++i) {
        h ^= static_cast<std::size_t>(raw->_mp_d[i]) + 0x9E3779B97F4A7C15ull +
             (h << 6) + (h >> 2);
    }
    return h;
}

void ConstraintIndex::insert(const HashParams& h) {
    a_seen_.insert(h.a);
    b_seen_.insert(h.b);
    p_seen_.insert(h.p);
    mpz_class g;
    ratio_buckets_[ratio_key(h.a, h.b, g)].push_back(g);
    ++count_;
}

bool ConstraintIndex::admissible(const HashParams& h) const {
    if (a_seen_.count(h.a) || b_seen_.count(h.b) || p_seen_.count(h.p)) return false;
    mpz_class g;
    auto it = ratio_buckets_.find(ratio_key(h.a, h.b, g));
    if (it == ratio_buckets_.end()) return true;
    // Same reduced pair: the candidate is a multiple of the member (or the
    // member of the candidate) exactly when one gcd divides the other.
    for (const mpz_class& member_g : it->second) {
        if (mpz_divisible_p(g.get_mpz_t(), member_g.get_mpz_t())) return false;
        if (mpz_divisible_p(member_g.get_mpz_t(), g.get_mpz_t())) return false;
    }
    return true;
}

HashParams sample_hash(RandomState& rng, unsigned width, std::uint64_t t,
                       ConstraintIndex& index) {
    if (t < 2) throw ValidationError("sample_hash: t must be at least 2");
    constexpr int kMaxAttempts = 10000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        HashParams h;
        h.p = sample_prime(rng, width);
        h.a = rng.draw_range(1, h.p);
        h.b = rng.draw_range(1, h.p);
        h.t = t;
        if (index.admissible(h)) {
            index.insert(h);
            return h;
        }
    }
    throw SamplingExhaustedError("sample_hash: constraint rejection cap reached at width " +
                                 std::to_string(width));
}

HashParams sample_hash(RandomState& rng, unsigned width, std::uint64_t t,
                       const std::vector<HashParams>& existing) {
    ConstraintIndex index;
    for (const HashParams& h : existing) index.insert(h);
    return sample_hash(rng, width, t, index);
}

double estimate_collision_probability(RandomState& rng, unsigned n_bits,
                                      std::uint64_t t, unsigned pair_count,
                                      unsigned hashes_per_pair) {
    if (n_bits < 1) throw ValidationError("collision estimate: n_bits must be at least 1");
    if (t < 2) throw ValidationError("collision estimate: t must be at least 2");
    if (pair_count < 1 || hashes_per_pair < 1)
        throw ValidationError("collision estimate: trial counts must be positive");
    unsigned width = n_bits < 2 ? 2 : n_bits;
    std::uint64_t collisions = 0;
    for (unsigned i = 0; i < pair_count; ++i) {
        mpz_class x = rng.draw_bits(n_bits);
        mpz_class y = rng.draw_bits(n_bits);
        while (y == x) y = rng.draw_bits(n_bits);
        for (unsigned j = 0; j < hashes_per_pair; ++j) {
            HashParams h;
            h.p = sample_prime(rng, width);
            h.a = rng.draw_range(1, h.p);
            h.b = rng.draw_range(1, h.p);
            h.t = t;
            if (eval_hash(h, x) == eval_hash(h, y)) ++collisions;
        }
    }
    return static_cast<double>(collisions) /
           (static_cast<double>(pair_count) * hashes_per_pair);
}

}  // namespace taulab
