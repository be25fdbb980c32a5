#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "taulab/tau.hpp"

namespace taulab {

// Circuits wider than this produce unmanageable formulas.
inline constexpr unsigned kCircuitPrimeWidthGuard = 32;

enum class GateKind : std::uint8_t { Not, And, Or, Xor, Mux };

// Origin of a gate or clause within the evaluation pipeline.
enum class Stage : std::uint8_t { Hash, Walk, Output, Pin };

// Reference to a boolean net: 0 and 1 are the constants, then the
// circuit's inputs, then its gates in creation order.
using WireRef = std::uint32_t;

struct Gate {
    GateKind kind;
    Stage stage;
    WireRef a = 0;   // Not: operand; And/Or/Xor: left; Mux: selector
    WireRef b = 0;   // And/Or/Xor: right; Mux: value when selector is 1
    WireRef c = 0;   // Mux: value when selector is 0
};

struct Circuit {
    unsigned num_inputs = 0;
    std::vector<Gate> gates;
    std::vector<WireRef> outputs;      // most significant output bit first

    WireRef input_wire(unsigned i) const { return 2 + i; }
    bool is_constant(WireRef w) const { return w < 2; }
    bool is_input(WireRef w) const { return w >= 2 && w < 2 + num_inputs; }
    std::size_t gate_index(WireRef w) const { return w - 2 - num_inputs; }
};

// Gate factory with constant folding: no emitted gate ever carries a
// constant operand, and algebraically trivial gates collapse to existing
// wires. Folding keeps the big multiplexer trees over constant matrix
// bits from materializing.
class CircuitBuilder {
public:
    explicit CircuitBuilder(unsigned num_inputs);

    WireRef constant(bool v) const { return v ? 1 : 0; }
    WireRef input(unsigned i) const;

    WireRef bnot(WireRef a);
    WireRef band(WireRef a, WireRef b);
    WireRef bor(WireRef a, WireRef b);
    WireRef bxor(WireRef a, WireRef b);
    // sel ? hi : lo
    WireRef mux(WireRef sel, WireRef hi, WireRef lo);

    void set_stage(Stage s) { stage_ = s; }
    void set_outputs(std::vector<WireRef> outputs);
    Circuit take();

private:
    WireRef emit(GateKind kind, WireRef a, WireRef b, WireRef c);

    Circuit circuit_;
    Stage stage_ = Stage::Hash;
};

// Boolean circuit computing tau bit for bit. Requires n a power of two
// (register widths and hash moduli are bit slices) and prime_width within
// the guard unless forced.
Circuit build_circuit(const TauInstance& tau, bool force = false);

// Reference interpreter; input bit j of x (j = 0 least significant) feeds
// input wire j. Returns y with output bit 1 as the most significant.
std::uint64_t eval_circuit(const Circuit& circuit, std::uint64_t x);

struct CnfFormula {
    unsigned num_vars = 0;
    unsigned num_inputs = 0;
    std::vector<int> literals;                 // flat clause storage
    std::vector<std::size_t> clause_offsets;   // clause i is [offsets[i], offsets[i+1])
    std::vector<Stage> clause_stages;
    std::vector<int> output_literals;          // one per output, most significant first

    std::size_t clause_count() const { return clause_offsets.size() - 1; }
    void add_clause(std::initializer_list<int> lits, Stage stage);
};

// Tseitin transform. Variable v = i+1 is input i; gate g takes variable
// num_inputs + g + 1. A constant output materializes one extra variable
// pinned by a unit clause.
CnfFormula tseitin(const Circuit& circuit);

// Appends one unit clause per output bit forcing the formula's output to
// equal y, so satisfying assignments are exactly the preimages of y.
void fix_output(CnfFormula& formula, unsigned n, const mpz_class& y);

// DIMACS text with comment lines recording n, the construction seed, the
// per-stage clause tally, and the variable layout.
std::string emit_dimacs(const CnfFormula& formula, unsigned n,
                        std::optional<std::uint64_t> seed);

struct GrowthRow {
    unsigned n = 0;
    std::uint64_t vars = 0;
    std::uint64_t clauses = 0;
};

// Formula size as a function of n for instances drawn from one seed.
std::vector<GrowthRow> clause_growth_report(std::uint64_t seed,
                                            const std::vector<unsigned>& ns,
                                            bool force = false);

}  // namespace taulab
