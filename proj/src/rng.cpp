#include "taulab/rng.hpp"

#include <array>
#include <cstdint>
#include <vector>

#include "taulab/errors.hpp"

namespace taulab {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// Seed for the witness stream used above the deterministic range.
constexpr std::uint64_t kWitnessStreamSeed = 0x7461756C61623164ull;
constexpr int kLargeWitnessRounds = 64;

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t acc = 1 % m;
    base %= m;
    while (exp != 0) {
        if (exp & 1) acc = mulmod_u64(acc, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return acc;
}

// Exact for every odd m below 3.3e24, which covers all of uint64.
constexpr std::array<std::uint64_t, 12> kWitnesses = {2,  3,  5,  7,  11, 13,
                                                     17, 19, 23, 29, 31, 37};

bool miller_rabin_u64(std::uint64_t m, std::uint64_t witness) {
    std::uint64_t a = witness % m;
    if (a == 0) return true;
    std::uint64_t d = m - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    std::uint64_t x = powmod_u64(a, d, m);
    if (x == 1 || x == m - 1) return true;
    for (unsigned i = 1; i < s; ++i) {
        x = mulmod_u64(x, x, m);
        if (x == m - 1) return true;
    }
    return false;
}

const std::vector<unsigned>& small_primes() {
    static const std::vector<unsigned> primes = [] {
        std::vector<unsigned> out;
        std::array<bool, 1000> composite{};
        for (unsigned i = 2; i < composite.size(); ++i) {
            if (composite[i]) continue;
            out.push_back(i);
            for (unsigned j = i * i; j < composite.size(); j += i) composite[j] = true;
        }
        return out;
    }();
    return primes;
}

// One strong-pseudoprime round on an mpz candidate.
bool miller_rabin_mpz(const mpz_class& m, const mpz_class& witness,
                      const mpz_class& d, unsigned long s) {
    mpz_class a = witness % m;
    if (a == 0) return true;
    mpz_class x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), m.get_mpz_t());
    mpz_class m1 = m - 1;
    if (x == 1 || x == m1) return true;
    for (unsigned long i = 1; i < s; ++i) {
        x = (x * x) % m;
        if (x == m1) return true;
    }
    return false;
}

const mpz_class& deterministic_witness_bound() {
    static const mpz_class bound("3300000000000000000000000");
    return bound;
}

}  // namespace

std::uint64_t RandomState::next_word() {
    state_ += kGamma;
    std::uint64_t z = state_;
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

mpz_class RandomState::draw_bits(unsigned k) {
    if (k == 0) return 0;
    unsigned words = (k + 63) / 64;
    mpz_class value = 0;
    for (unsigned i = 0; i < words; ++i) {
        std::uint64_t w = next_word();
        mpz_mul_2exp(value.get_mpz_t(), value.get_mpz_t(), 64);
        mpz_class word;
        mpz_import(word.get_mpz_t(), 1, 1, sizeof(w), 0, 0, &w);
        value += word;
    }
    mpz_class mask = (mpz_class(1) << k) - 1;
    value &= mask;
    return value;
}

std::uint64_t RandomState::draw_bits_u64(unsigned k) {
    if (k == 0) return 0;
    if (k > 64) throw ValidationError("draw_bits_u64: width exceeds 64 bits");
    std::uint64_t w = next_word();
    if (k == 64) return w;
    return w & ((std::uint64_t{1} << k) - 1);
}

mpz_class RandomState::draw_range(const mpz_class& lo, const mpz_class& hi) {
    if (lo >= hi) throw ValidationError("draw_range: empty range");
    mpz_class span = hi - lo;
    if (span == 1) return lo;
    unsigned k = static_cast<unsigned>(mpz_sizeinbase(mpz_class(span - 1).get_mpz_t(), 2));
    for (;;) {
        mpz_class candidate = draw_bits(k);
        if (candidate < span) return lo + candidate;
    }
}

std::uint64_t RandomState::draw_range_u64(std::uint64_t lo, std::uint64_t hi) {
    if (lo >= hi) throw ValidationError("draw_range: empty range");
    std::uint64_t span = hi - lo;
    if (span == 1) return lo;
    unsigned k = 64 - static_cast<unsigned>(__builtin_clzll(span - 1));
    for (;;) {
        std::uint64_t candidate = draw_bits_u64(k);
        if (candidate < span) return lo + candidate;
    }
}

bool is_prime_u64(std::uint64_t m) {
    if (m < 2) return false;
    for (unsigned p : small_primes()) {
        if (m == p) return true;
        if (m % p == 0) return false;
        if (static_cast<std::uint64_t>(p) * p > m) return true;
    }
    for (std::uint64_t w : kWitnesses) {
        if (!miller_rabin_u64(m, w)) return false;
    }
    return true;
}

bool is_prime(const mpz_class& m) {
    if (m < 2) return false;
    if (mpz_fits_ulong_p(m.get_mpz_t())) {
        return is_prime_u64(mpz_get_ui(m.get_mpz_t()));
    }
    // m exceeds uint64, so it is larger than any entry of the division table.
    for (unsigned p : small_primes()) {
        if (mpz_divisible_ui_p(m.get_mpz_t(), p)) return false;
    }
    mpz_class d = m - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
    if (m < deterministic_witness_bound()) {
        for (std::uint64_t w : kWitnesses) {
            if (!miller_rabin_mpz(m, mpz_class(static_cast<unsigned long>(w)), d, s))
                return false;
        }
        return true;
    }
    RandomState witness_stream(kWitnessStreamSeed);
    for (int round = 0; round < kLargeWitnessRounds; ++round) {
        mpz_class w = witness_stream.draw_range(2, m - 1);
        if (!miller_rabin_mpz(m, w, d, s)) return false;
    }
    return true;
}

mpz_class sample_prime(RandomState& rng, unsigned width) {
    if (width < 2) throw ValidationError("sample_prime: width must be at least 2");
    constexpr int kMaxAttempts = 100000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        mpz_class candidate = rng.draw_bits(width);
        mpz_setbit(candidate.get_mpz_t(), width - 1);
        mpz_setbit(candidate.get_mpz_t(), 0);
        if (is_prime(candidate)) return candidate;
    }
    throw SamplingExhaustedError("sample_prime: no prime found within attempt cap");
}

}  // namespace taulab
