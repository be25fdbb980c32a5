#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "taulab/hash.hpp"
#include "taulab/rng.hpp"

namespace taulab {

// Square 0/1 matrix with 1-based accessors to match the walk coordinates.
class BitMatrix {
public:
    BitMatrix() = default;
    explicit BitMatrix(unsigned n) : n_(n), cells_(static_cast<std::size_t>(n) * n, 0) {}

    unsigned size() const { return n_; }
    std::uint8_t at(unsigned row, unsigned col) const {
        return cells_[static_cast<std::size_t>(row - 1) * n_ + (col - 1)];
    }
    void set(unsigned row, unsigned col, std::uint8_t bit) {
        cells_[static_cast<std::size_t>(row - 1) * n_ + (col - 1)] = bit;
    }

    // Row as lowercase hex, ceil(n/4) digits, column 1 in the top bit.
    std::string row_hex(unsigned row) const;

    const std::vector<std::uint8_t>& cells() const { return cells_; }
    bool operator==(const BitMatrix& other) const = default;

private:
    unsigned n_ = 0;
    std::vector<std::uint8_t> cells_;
};

struct DirectionStep {
    int dr;
    int dc;
};

// Row d of the table is the move taken when the step hash yields d-1.
inline constexpr std::array<DirectionStep, 8> kDirectionTable = {{
    {1, 0}, {-1, 0}, {0, -1}, {0, 1}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1},
}};

struct TauInstance {
    unsigned n = 0;
    unsigned prime_width = 0;
    std::optional<std::uint64_t> seed;
    std::vector<BitMatrix> matrices;        // n distinct n-by-n matrices
    std::vector<HashParams> h_row;          // n hashes, t = n
    std::vector<HashParams> h_col;          // n hashes, t = n
    std::vector<HashParams> h_m;            // n*n hashes row-major, t = 8

    const HashParams& step_hash(unsigned i, unsigned j) const {
        return h_m[static_cast<std::size_t>(i - 1) * n + (j - 1)];
    }

    // Full structural check: collection sizes, moduli, per-hash invariants,
    // pairwise constraints within each collection, matrix distinctness.
    // Throws InvariantViolation naming the first broken condition.
    void validate() const;

    // All hash parameters fit machine words and n <= 64.
    bool fast_eligible() const;
};

// Builds an instance from a seed. n must be a power of two at least 2
// unless allow_any_length is set, which relaxes the check to n >= 2 for
// callers that sweep lengths the walk itself does not care about.
// prime_width defaults to max(n, 12).
TauInstance construct(unsigned n, std::uint64_t seed,
                      std::optional<unsigned> prime_width = std::nullopt,
                      bool allow_any_length = false);

// y = tau(x) for 0 <= x < 2^n; bit 1 of y is the most significant.
mpz_class evaluate(const TauInstance& tau, const mpz_class& x);
std::uint64_t evaluate_u64(const TauInstance& tau, std::uint64_t x);

// Precomputed machine-word view of an instance for exhaustive kernels.
class FastEvaluator {
public:
    static std::optional<FastEvaluator> make(const TauInstance& tau);
    std::uint64_t operator()(std::uint64_t x) const;
    unsigned n() const { return n_; }

private:
    unsigned n_ = 0;
    std::vector<std::uint64_t> row_a_, row_b_, row_p_;
    std::vector<std::uint64_t> col_a_, col_b_, col_p_;
    std::vector<std::uint64_t> m_a_, m_b_, m_p_;
    std::vector<std::uint8_t> cells_;  // all n matrices, row-major
};

// One output bit's walk, 1-based coordinates throughout.
struct WalkTrace {
    unsigned start_row = 0;
    unsigned start_col = 0;
    std::vector<std::uint8_t> directions;                    // n entries in [1, 8]
    std::vector<std::pair<unsigned, unsigned>> visited;      // position after each step
    std::uint8_t bit = 0;

    std::pair<unsigned, unsigned> final_position() const { return visited.back(); }
};

std::pair<mpz_class, std::vector<WalkTrace>> evaluate_traced(const TauInstance& tau,
                                                             const mpz_class& x);

// Re-walks recorded traces against the instance matrices and returns the
// output they spell. Throws InvariantViolation if a trace's visited list
// disagrees with its directions.
mpz_class replay(const TauInstance& tau, const std::vector<WalkTrace>& traces);

// taulab-1 JSON document, byte-stable for a given instance.
std::string serialize(const TauInstance& tau);
TauInstance deserialize(const std::string& text);

}  // namespace taulab
