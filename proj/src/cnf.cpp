#include "taulab/cnf.hpp"

#include <string>
#include <utility>

#include "taulab/errors.hpp"

namespace taulab {
namespace {

bool is_power_of_two(unsigned n) { return n != 0 && (n & (n - 1)) == 0; }

unsigned log2_exact(unsigned n) {
    unsigned k = 0;
    while ((1u << k) < n) ++k;
    return k;
}

// Little-endian vector of wires, one per value bit.
using BitVec = std::vector<WireRef>;

// Direction rows indexed by the raw 3-bit step hash: whether each
// coordinate increments, decrements, or stays.
enum : int { kSame = 0, kInc = 1, kDec = 2 };
constexpr int kRowChoice[8] = {kInc, kDec, kSame, kSame, kDec, kDec, kInc, kInc};
constexpr int kColChoice[8] = {kSame, kSame, kDec, kInc, kDec, kInc, kDec, kInc};

BitVec constant_vec(CircuitBuilder& cb, const mpz_class& value, unsigned width) {
    BitVec out(width);
    for (unsigned k = 0; k < width; ++k)
        out[k] = cb.constant(mpz_tstbit(value.get_mpz_t(), k) != 0);
    return out;
}

// acc + (gate ? addend : 0); the caller guarantees the sum fits the width.
BitVec add_constant_gated(CircuitBuilder& cb, const BitVec& acc,
                          const mpz_class& addend, WireRef gate) {
    BitVec out(acc.size());
    WireRef carry = cb.constant(false);
    for (std::size_t k = 0; k < acc.size(); ++k) {
        WireRef ab = mpz_tstbit(addend.get_mpz_t(), k) ? gate : cb.constant(false);
        WireRef half = cb.bxor(acc[k], ab);
        out[k] = cb.bxor(half, carry);
        carry = cb.bor(cb.band(acc[k], ab), cb.band(carry, half));
    }
    return out;
}

WireRef ge_constant(CircuitBuilder& cb, const BitVec& acc, const mpz_class& c) {
    WireRef ge = cb.constant(true);
    for (std::size_t k = 0; k < acc.size(); ++k) {
        if (mpz_tstbit(c.get_mpz_t(), k))
            ge = cb.band(acc[k], ge);
        else
            ge = cb.bor(acc[k], ge);
    }
    return ge;
}

// acc - c; meaningful only when acc >= c, callers gate on ge_constant.
BitVec sub_constant(CircuitBuilder& cb, const BitVec& acc, const mpz_class& c) {
    BitVec out(acc.size());
    WireRef borrow = cb.constant(false);
    for (std::size_t k = 0; k < acc.size(); ++k) {
        WireRef cw = cb.constant(mpz_tstbit(c.get_mpz_t(), k) != 0);
        WireRef half = cb.bxor(acc[k], cw);
        out[k] = cb.bxor(half, borrow);
        borrow = cb.bor(cb.band(cb.bnot(acc[k]), cb.bor(cw, borrow)),
                        cb.band(cw, borrow));
    }
    return out;
}

BitVec mux_vec(CircuitBuilder& cb, WireRef sel, const BitVec& hi, const BitVec& lo) {
    BitVec out(hi.size());
    for (std::size_t k = 0; k < hi.size(); ++k) out[k] = cb.mux(sel, hi[k], lo[k]);
    return out;
}

// Conditional-subtract reduction by shifted copies of p, high shift first.
// `bound` is the exact maximum value the accumulator can hold; after each
// stage the accumulator provably fits fewer bits and is truncated.
BitVec mod_constant(CircuitBuilder& cb, BitVec acc, mpz_class bound, const mpz_class& p) {
    if (bound < p) return acc;
    int s = 0;
    while ((p << (s + 1)) <= bound) ++s;
    for (; s >= 0; --s) {
        mpz_class ps = p << s;
        WireRef ge = ge_constant(cb, acc, ps);
        BitVec diff = sub_constant(cb, acc, ps);
        acc = mux_vec(cb, ge, diff, acc);
        bound = ps - 1;
        std::size_t width = mpz_sizeinbase(bound.get_mpz_t(), 2);
        if (acc.size() > width) acc.resize(width);
    }
    return acc;
}

// ((a*x + b) mod p) mod 2^out_bits as a circuit over the input bits.
BitVec hash_circuit(CircuitBuilder& cb, const BitVec& x_bits, const HashParams& h,
                    unsigned out_bits) {
    mpz_class bound = h.b + h.a * ((mpz_class(1) << x_bits.size()) - 1);
    unsigned width = static_cast<unsigned>(mpz_sizeinbase(bound.get_mpz_t(), 2));
    BitVec acc = constant_vec(cb, h.b, width);
    for (std::size_t j = 0; j < x_bits.size(); ++j)
        acc = add_constant_gated(cb, acc, h.a << j, x_bits[j]);
    acc = mod_constant(cb, acc, bound, h.p);
    BitVec out(out_bits);
    for (unsigned k = 0; k < out_bits; ++k)
        out[k] = k < acc.size() ? acc[k] : cb.constant(false);
    return out;
}

BitVec inc_vec(CircuitBuilder& cb, const BitVec& v) {
    BitVec out(v.size());
    WireRef carry = cb.constant(true);
    for (std::size_t k = 0; k < v.size(); ++k) {
        out[k] = cb.bxor(v[k], carry);
        carry = cb.band(v[k], carry);
    }
    return out;
}

BitVec dec_vec(CircuitBuilder& cb, const BitVec& v) {
    BitVec out(v.size());
    WireRef borrow = cb.constant(true);
    for (std::size_t k = 0; k < v.size(); ++k) {
        out[k] = cb.bxor(v[k], borrow);
        borrow = cb.band(cb.bnot(v[k]), borrow);
    }
    return out;
}

// Picks inc/dec/same per the 3-bit step value d, using the choice table.
BitVec select_update(CircuitBuilder& cb, const BitVec& d, const BitVec& same,
                     const BitVec& inc, const BitVec& dec, const int choice[8]) {
    const BitVec* options[3] = {&same, &inc, &dec};
    std::vector<BitVec> layer(8);
    for (unsigned idx = 0; idx < 8; ++idx) layer[idx] = *options[choice[idx]];
    for (unsigned bit = 0; bit < 3; ++bit) {
        std::vector<BitVec> next(layer.size() / 2);
        for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = mux_vec(cb, d[bit], layer[2 * i + 1], layer[2 * i]);
        layer = std::move(next);
    }
    return layer[0];
}

// Multiplexer tree over the constant matrix cells; the selector is the
// final position, column bits low. Constant folding collapses most of it.
WireRef matrix_lookup(CircuitBuilder& cb, const BitMatrix& m, const BitVec& row,
                      const BitVec& col) {
    const unsigned n = m.size();
    std::vector<WireRef> layer(static_cast<std::size_t>(n) * n);
    for (unsigned r0 = 0; r0 < n; ++r0)
        for (unsigned c0 = 0; c0 < n; ++c0)
            layer[(static_cast<std::size_t>(r0) << log2_exact(n)) | c0] =
                cb.constant(m.at(r0 + 1, c0 + 1) != 0);
    BitVec sel;
    sel.insert(sel.end(), col.begin(), col.end());
    sel.insert(sel.end(), row.begin(), row.end());
    for (WireRef s : sel) {
        std::vector<WireRef> next(layer.size() / 2);
        for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = cb.mux(s, layer[2 * i + 1], layer[2 * i]);
        layer = std::move(next);
    }
    return layer[0];
}

}  // namespace

CircuitBuilder::CircuitBuilder(unsigned num_inputs) {
    circuit_.num_inputs = num_inputs;
}

WireRef CircuitBuilder::input(unsigned i) const {
    if (i >= circuit_.num_inputs) throw ValidationError("circuit: input index out of range");
    return circuit_.input_wire(i);
}

WireRef CircuitBuilder::emit(GateKind kind, WireRef a, WireRef b, WireRef c) {
    circuit_.gates.push_back(Gate{kind, stage_, a, b, c});
    return static_cast<WireRef>(2 + circuit_.num_inputs + circuit_.gates.size() - 1);
}

WireRef CircuitBuilder::bnot(WireRef a) {
    if (a < 2) return a ^ 1u;
    if (!circuit_.is_input(a)) {
        const Gate& g = circuit_.gates[circuit_.gate_index(a)];
        if (g.kind == GateKind::Not) return g.a;
    }
    return emit(GateKind::Not, a, 0, 0);
}

WireRef CircuitBuilder::band(WireRef a, WireRef b) {
    if (a == 0 || b == 0) return 0;
    if (a == 1) return b;
    if (b == 1) return a;
    if (a == b) return a;
    return emit(GateKind::And, a, b, 0);
}

WireRef CircuitBuilder::bor(WireRef a, WireRef b) {
    if (a == 1 || b == 1) return 1;
    if (a == 0) return b;
    if (b == 0) return a;
    if (a == b) return a;
    return emit(GateKind::Or, a, b, 0);
}

WireRef CircuitBuilder::bxor(WireRef a, WireRef b) {
    if (a == b) return 0;
    if (a == 0) return b;
    if (b == 0) return a;
    if (a == 1) return bnot(b);
    if (b == 1) return bnot(a);
    return emit(GateKind::Xor, a, b, 0);
}

WireRef CircuitBuilder::mux(WireRef sel, WireRef hi, WireRef lo) {
    if (sel == 1) return hi;
    if (sel == 0) return lo;
    if (hi == lo) return hi;
    if (hi == 1 && lo == 0) return sel;
    if (hi == 0 && lo == 1) return bnot(sel);
    if (hi == 1) return bor(sel, lo);
    if (hi == 0) return band(bnot(sel), lo);
    if (lo == 1) return bor(bnot(sel), hi);
    if (lo == 0) return band(sel, hi);
    return emit(GateKind::Mux, sel, hi, lo);
}

void CircuitBuilder::set_outputs(std::vector<WireRef> outputs) {
    circuit_.outputs = std::move(outputs);
}

Circuit CircuitBuilder::take() {
    // Sweep gates no output depends on, keeping creation order.
    std::vector<std::uint8_t> live(circuit_.gates.size(), 0);
    std::vector<std::size_t> stack;
    auto mark = [&](WireRef w) {
        if (circuit_.is_constant(w) || circuit_.is_input(w)) return;
        std::size_t gi = circuit_.gate_index(w);
        if (!live[gi]) {
            live[gi] = 1;
            stack.push_back(gi);
        }
    };
    for (WireRef w : circuit_.outputs) mark(w);
    while (!stack.empty()) {
        const Gate& g = circuit_.gates[stack.back()];
        stack.pop_back();
        mark(g.a);
        if (g.kind != GateKind::Not) mark(g.b);
        if (g.kind == GateKind::Mux) mark(g.c);
    }
    std::vector<std::uint32_t> remap(circuit_.gates.size(), 0);
    std::vector<Gate> kept;
    auto map_wire = [&](WireRef w) -> WireRef {
        if (circuit_.is_constant(w) || circuit_.is_input(w)) return w;
        return static_cast<WireRef>(2 + circuit_.num_inputs +
                                    remap[circuit_.gate_index(w)]);
    };
    for (std::size_t gi = 0; gi < circuit_.gates.size(); ++gi) {
        if (!live[gi]) continue;
        Gate g = circuit_.gates[gi];
        g.a = map_wire(g.a);
        if (g.kind != GateKind::Not) g.b = map_wire(g.b);
        if (g.kind == GateKind::Mux) g.c = map_wire(g.c);
        remap[gi] = static_cast<std::uint32_t>(kept.size());
        kept.push_back(g);
    }
    for (WireRef& w : circuit_.outputs) w = map_wire(w);
    circuit_.gates = std::move(kept);
    return std::move(circuit_);
}

Circuit build_circuit(const TauInstance& tau, bool force) {
    if (!is_power_of_two(tau.n))
        throw ValidationError("circuit: n is not a power of two");
    if (tau.prime_width > kCircuitPrimeWidthGuard && !force)
        throw GuardError("circuit: prime_width " + std::to_string(tau.prime_width) +
                         " exceeds guard " + std::to_string(kCircuitPrimeWidthGuard) +
                         " (pass force to run)");
    const unsigned n = tau.n;
    const unsigned k = log2_exact(n);
    CircuitBuilder cb(n);
    BitVec x_bits(n);
    for (unsigned j = 0; j < n; ++j) x_bits[j] = cb.input(j);

    std::vector<WireRef> outputs;
    outputs.reserve(n);
    for (unsigned i = 1; i <= n; ++i) {
        cb.set_stage(Stage::Hash);
        BitVec row = hash_circuit(cb, x_bits, tau.h_row[i - 1], k);
        BitVec col = hash_circuit(cb, x_bits, tau.h_col[i - 1], k);
        std::vector<BitVec> steps;
        steps.reserve(n);
        for (unsigned j = 1; j <= n; ++j)
            steps.push_back(hash_circuit(cb, x_bits, tau.step_hash(i, j), 3));

        cb.set_stage(Stage::Walk);
        for (unsigned j = 0; j < n; ++j) {
            const BitVec& d = steps[j];
            BitVec row_inc = inc_vec(cb, row);
            BitVec row_dec = dec_vec(cb, row);
            BitVec col_inc = inc_vec(cb, col);
            BitVec col_dec = dec_vec(cb, col);
            row = select_update(cb, d, row, row_inc, row_dec, kRowChoice);
            col = select_update(cb, d, col, col_inc, col_dec, kColChoice);
        }

        cb.set_stage(Stage::Output);
        outputs.push_back(matrix_lookup(cb, tau.matrices[i - 1], row, col));
    }
    cb.set_outputs(std::move(outputs));
    return cb.take();
}

std::uint64_t eval_circuit(const Circuit& circuit, std::uint64_t x) {
    if (circuit.num_inputs < 64 && (x >> circuit.num_inputs) != 0)
        throw ValidationError("circuit: x is at least 2^n");
    std::vector<std::uint8_t> value(2 + circuit.num_inputs + circuit.gates.size());
    value[0] = 0;
    value[1] = 1;
    for (unsigned i = 0; i < circuit.num_inputs; ++i)
        value[2 + i] = static_cast<std::uint8_t>((x >> i) & 1);
    for (std::size_t gi = 0; gi < circuit.gates.size(); ++gi) {
        const Gate& g = circuit.gates[gi];
        std::uint8_t out = 0;
        switch (g.kind) {
            case GateKind::Not: out = value[g.a] ^ 1; break;
            case GateKind::And: out = value[g.a] & value[g.b]; break;
            case GateKind::Or: out = value[g.a] | value[g.b]; break;
            case GateKind::Xor: out = value[g.a] ^ value[g.b]; break;
            case GateKind::Mux: out = value[g.a] ? value[g.b] : value[g.c]; break;
        }
        value[2 + circuit.num_inputs + gi] = out;
    }
    std::uint64_t y = 0;
    for (WireRef w : circuit.outputs) y = (y << 1) | value[w];
    return y;
}

void CnfFormula::add_clause(std::initializer_list<int> lits, Stage stage) {
    for (int lit : lits) literals.push_back(lit);
    clause_offsets.push_back(literals.size());
    clause_stages.push_back(stage);
}

CnfFormula tseitin(const Circuit& circuit) {
    CnfFormula f;
    f.num_inputs = circuit.num_inputs;
    f.num_vars = circuit.num_inputs + static_cast<unsigned>(circuit.gates.size());
    f.clause_offsets.push_back(0);
    auto lit = [&](WireRef w) -> int {
        if (circuit.is_input(w)) return static_cast<int>(w - 2 + 1);
        return static_cast<int>(circuit.num_inputs + circuit.gate_index(w) + 1);
    };
    for (std::size_t gi = 0; gi < circuit.gates.size(); ++gi) {
        const Gate& g = circuit.gates[gi];
        const int o = static_cast<int>(circuit.num_inputs + gi + 1);
        switch (g.kind) {
            case GateKind::Not: {
                const int a = lit(g.a);
                f.add_clause({a, o}, g.stage);
                f.add_clause({-a, -o}, g.stage);
                break;
            }
            case GateKind::And: {
                const int a = lit(g.a), b = lit(g.b);
                f.add_clause({-a, -b, o}, g.stage);
                f.add_clause({a, -o}, g.stage);
                f.add_clause({b, -o}, g.stage);
                break;
            }
            case GateKind::Or: {
                const int a = lit(g.a), b = lit(g.b);
                f.add_clause({a, b, -o}, g.stage);
                f.add_clause({-a, o}, g.stage);
                f.add_clause({-b, o}, g.stage);
                break;
            }
            case GateKind::Xor: {
                const int a = lit(g.a), b = lit(g.b);
                f.add_clause({-a, -b, -o}, g.stage);
                f.add_clause({a, b, -o}, g.stage);
                f.add_clause({-a, b, o}, g.stage);
                f.add_clause({a, -b, o}, g.stage);
                break;
            }
            case GateKind::Mux: {
                const int s = lit(g.a), hi = lit(g.b), lo = lit(g.c);
                f.add_clause({-s, -hi, o}, g.stage);
                f.add_clause({-s, hi, -o}, g.stage);
                f.add_clause({s, -lo, o}, g.stage);
                f.add_clause({s, lo, -o}, g.stage);
                break;
            }
        }
    }
    int const_true_var = 0;
    for (WireRef w : circuit.outputs) {
        if (circuit.is_constant(w)) {
            if (const_true_var == 0) {
                const_true_var = static_cast<int>(++f.num_vars);
                f.add_clause({const_true_var}, Stage::Output);
            }
            f.output_literals.push_back(w == 1 ? const_true_var : -const_true_var);
        } else {
            f.output_literals.push_back(lit(w));
        }
    }
    return f;
}

void fix_output(CnfFormula& formula, unsigned n, const mpz_class& y) {
    if (formula.output_literals.size() != n)
        throw ValidationError("fix_output: n does not match the formula's output count");
    if (y < 0 || y >> n != 0) throw ValidationError("fix_output: y is outside [0, 2^n)");
    for (unsigned i = 0; i < n; ++i) {
        const int lit = formula.output_literals[i];
        const bool bit = mpz_tstbit(y.get_mpz_t(), n - 1 - i) != 0;
        formula.add_clause({bit ? lit : -lit}, Stage::Pin);
    }
}

std::string emit_dimacs(const CnfFormula& formula, unsigned n,
                        std::optional<std::uint64_t> seed) {
    std::uint64_t stage_counts[4] = {0, 0, 0, 0};
    for (Stage s : formula.clause_stages) ++stage_counts[static_cast<unsigned>(s)];
    std::string out;
    out.reserve(formula.literals.size() * 8 + 256);
    out += "c taulab n=" + std::to_string(n) + " seed=" +
           (seed ? std::to_string(*seed) : std::string("none")) + "\n";
    out += "c clauses hash=" + std::to_string(stage_counts[0]) +
           " walk=" + std::to_string(stage_counts[1]) +
           " output=" + std::to_string(stage_counts[2]) +
           " pin=" + std::to_string(stage_counts[3]) + "\n";
    out += "c inputs 1.." + std::to_string(formula.num_inputs) + " lsb-first\n";
    out += "c outputs";
    for (int lit : formula.output_literals) out += " " + std::to_string(lit);
    out += " msb-first\n";
    out += "p cnf " + std::to_string(formula.num_vars) + " " +
           std::to_string(formula.clause_count()) + "\n";
    for (std::size_t ci = 0; ci < formula.clause_count(); ++ci) {
        for (std::size_t k = formula.clause_offsets[ci]; k < formula.clause_offsets[ci + 1];
             ++k) {
            out += std::to_string(formula.literals[k]);
            out += ' ';
        }
        out += "0\n";
    }
    return out;
}

std::vector<GrowthRow> clause_growth_report(std::uint64_t seed,
                                            const std::vector<unsigned>& ns,
                                            bool force) {
    std::vector<GrowthRow> rows;
    rows.reserve(ns.size());
    for (unsigned n : ns) {
        TauInstance tau = construct(n, seed);
        CnfFormula f = tseitin(build_circuit(tau, force));
        rows.push_back(GrowthRow{n, f.num_vars, f.clause_count()});
    }
    return rows;
}

}  // namespace taulab
