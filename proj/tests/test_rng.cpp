#include <cmath>
#include <cstdint>

#include "doctest.h"

#include "taulab/errors.hpp"
#include "taulab/rng.hpp"

using namespace taulab;

TEST_CASE("stream matches the reference constants") {
    RandomState rs(0);
    CHECK(rs.next_word() == 0xe220a8397b1dcdafull);
    CHECK(rs.next_word() == 0x6e789e6aa1b965f4ull);
    CHECK(rs.next_word() == 0x06c45d188009454full);
}

TEST_CASE("draw_bits concatenates words high block first") {
    RandomState rs(1);
    // Words for seed 1 are 0x910a2dec89025cc1, 0xbeeb8da1658eec67; 65 bits
    // keep the top word's low bit followed by the whole second word.
    mpz_class v = rs.draw_bits(65);
    CHECK(v == mpz_class("1beeb8da1658eec67", 16));

    RandomState a(9), b(9);
    for (unsigned k : {1u, 7u, 32u, 63u, 64u}) {
        mpz_class wide = a.draw_bits(k);
        std::uint64_t narrow = b.draw_bits_u64(k);
        CHECK(wide == mpz_class(static_cast<unsigned long>(narrow)));
    }
    CHECK(a.state() == b.state());
}

TEST_CASE("draw_bits of zero width consumes nothing") {
    RandomState rs(5);
    std::uint64_t before = rs.state();
    CHECK(rs.draw_bits(0) == 0);
    CHECK(rs.state() == before);
}

TEST_CASE("draw_range basics") {
    RandomState rs(5);
    std::uint64_t before = rs.state();
    CHECK(rs.draw_range(3, 4) == 3);
    CHECK(rs.state() == before);
    CHECK_THROWS_AS(rs.draw_range(4, 4), ValidationError);
    CHECK_THROWS_AS(rs.draw_range(5, 4), ValidationError);
    CHECK_THROWS_AS(rs.draw_range_u64(7, 7), ValidationError);

    RandomState a(17), b(17);
    for (int i = 0; i < 200; ++i) {
        mpz_class wide = a.draw_range(10, 1000);
        std::uint64_t narrow = b.draw_range_u64(10, 1000);
        CHECK(wide == mpz_class(static_cast<unsigned long>(narrow)));
    }
}

TEST_CASE("draw_range is unbiased over a non-power-of-two span") {
    RandomState rs(123);
    const int trials = 100000;
    std::uint64_t counts[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < trials; ++i) ++counts[rs.draw_range_u64(0, 6)];
    const std::uint64_t expected_counts[6] = {16636, 16509, 16631, 16810, 16567, 16847};
    const double expect = trials / 6.0;
    const double sigma = std::sqrt(trials * (1.0 / 6.0) * (5.0 / 6.0));
    for (int v = 0; v < 6; ++v) {
        CHECK(counts[v] == expected_counts[v]);
        CHECK(std::abs(static_cast<double>(counts[v]) - expect) < 3 * sigma);
    }
}

TEST_CASE("primality verdicts") {
    CHECK_FALSE(is_prime_u64(0));
    CHECK_FALSE(is_prime_u64(1));
    CHECK(is_prime_u64(2));
    CHECK(is_prime_u64(3));
    CHECK_FALSE(is_prime_u64(4));
    CHECK(is_prime_u64(997));
    CHECK_FALSE(is_prime_u64(561));        // Carmichael
    CHECK_FALSE(is_prime_u64(341));        // 2-pseudoprime
    CHECK(is_prime_u64((1ull << 61) - 1));
    CHECK_FALSE(is_prime_u64((1ull << 61) + 1));
    CHECK_FALSE(is_prime(mpz_class(-7)));
    CHECK(is_prime(mpz_class(997)));

    // Above one machine word but below the deterministic witness bound.
    mpz_class m89 = (mpz_class(1) << 89) - 1;
    CHECK(is_prime(m89));
    CHECK_FALSE(is_prime(m89 - 2));
    CHECK_FALSE(is_prime((mpz_class(1) << 89) + 1));

    // Above the bound the fixed witness stream takes over.
    mpz_class m127 = (mpz_class(1) << 127) - 1;
    CHECK(is_prime(m127));
    CHECK_FALSE(is_prime(m127 - 2));
}

TEST_CASE("sample_prime draws the frozen primes") {
    RandomState rs7(7);
    CHECK(sample_prime(rs7, 8) == 157);
    RandomState rs42(42);
    CHECK(sample_prime(rs42, 12) == 3733);

    RandomState rs(99);
    for (int i = 0; i < 20; ++i) {
        mpz_class p = sample_prime(rs, 16);
        CHECK(mpz_sizeinbase(p.get_mpz_t(), 2) == 16);
        CHECK(mpz_odd_p(p.get_mpz_t()));
        CHECK(is_prime(p));
    }
    CHECK_THROWS_AS(sample_prime(rs, 0), ValidationError);
    CHECK_THROWS_AS(sample_prime(rs, 1), ValidationError);
}
