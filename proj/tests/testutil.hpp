#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "taulab/cnf.hpp"
#include "taulab/tau.hpp"

namespace taulab::testutil {

inline HashParams hp(long a, long b, long p, std::uint64_t t) {
    HashParams h;
    h.a = a;
    h.b = b;
    h.p = p;
    h.t = t;
    return h;
}

// Worked n=2 instance small enough to trace by hand. Its full table is
// 0 -> 0, 1 -> 3, 2 -> 0, 3 -> 2.
inline TauInstance hand_instance() {
    TauInstance tau;
    tau.n = 2;
    tau.prime_width = 4;
    BitMatrix m1(2), m2(2);
    m1.set(1, 1, 1);
    m1.set(2, 2, 1);
    m2.set(2, 1, 1);
    m2.set(2, 2, 1);
    tau.matrices = {m1, m2};
    tau.h_row = {hp(3, 2, 5, 2), hp(4, 3, 11, 2)};
    tau.h_col = {hp(2, 1, 7, 2), hp(5, 4, 13, 2)};
    tau.h_m = {hp(3, 1, 11, 8), hp(5, 3, 13, 8), hp(7, 2, 17, 8), hp(9, 5, 19, 8)};
    return tau;
}

// Counter-based unit propagation over a CnfFormula, for checking the
// Tseitin encoding without a full solver. Assignments accumulate; there
// is no backtracking.
class UnitPropagator {
public:
    explicit UnitPropagator(const CnfFormula& f) : formula_(&f) {
        value_.assign(f.num_vars + 1, -1);
        sat_count_.assign(f.clause_count(), 0);
        unassigned_.assign(f.clause_count(), 0);
        occ_pos_.assign(f.num_vars + 1, {});
        occ_neg_.assign(f.num_vars + 1, {});
        for (std::size_t ci = 0; ci < f.clause_count(); ++ci) {
            unassigned_[ci] =
                static_cast<int>(f.clause_offsets[ci + 1] - f.clause_offsets[ci]);
            for (std::size_t k = f.clause_offsets[ci]; k < f.clause_offsets[ci + 1]; ++k) {
                int lit = f.literals[k];
                (lit > 0 ? occ_pos_ : occ_neg_)[std::abs(lit)].push_back(ci);
            }
        }
        // Unit clauses present from the start (output pins, constants).
        for (std::size_t ci = 0; ci < f.clause_count(); ++ci) {
            if (unassigned_[ci] == 1) pending_.push_back(ci);
        }
        ok_ = flush();
    }

    // Assign lit and propagate to fixpoint; false once any conflict hit.
    bool assume(int lit) {
        if (!ok_) return false;
        ok_ = enqueue(lit) && flush();
        return ok_;
    }

    bool consistent() const { return ok_; }

    std::optional<bool> value(unsigned var) const {
        if (value_[var] < 0) return std::nullopt;
        return value_[var] == 1;
    }

private:
    bool enqueue(int lit) {
        unsigned var = static_cast<unsigned>(std::abs(lit));
        int v = lit > 0 ? 1 : 0;
        if (value_[var] >= 0) return value_[var] == v;
        value_[var] = v;
        const auto& sats = lit > 0 ? occ_pos_[var] : occ_neg_[var];
        const auto& hits = lit > 0 ? occ_neg_[var] : occ_pos_[var];
        for (std::size_t ci : sats) ++sat_count_[ci];
        for (std::size_t ci : hits) {
            if (--unassigned_[ci] <= 1 && sat_count_[ci] == 0) pending_.push_back(ci);
        }
        return true;
    }

    bool flush() {
        while (!pending_.empty()) {
            std::size_t ci = pending_.front();
            pending_.pop_front();
            if (sat_count_[ci] > 0) continue;
            if (unassigned_[ci] == 0) return false;
            if (unassigned_[ci] != 1) continue;
            int unit = 0;
            for (std::size_t k = formula_->clause_offsets[ci];
                 k < formula_->clause_offsets[ci + 1]; ++k) {
                int lit = formula_->literals[k];
                if (value_[std::abs(lit)] < 0) {
                    unit = lit;
                    break;
                }
            }
            if (unit == 0) return false;
            if (!enqueue(unit)) return false;
        }
        return true;
    }

    const CnfFormula* formula_;
    std::vector<int> value_;
    std::vector<int> sat_count_;
    std::vector<int> unassigned_;
    std::vector<std::vector<std::size_t>> occ_pos_;
    std::vector<std::vector<std::size_t>> occ_neg_;
    std::deque<std::size_t> pending_;
    bool ok_ = true;
};

// Assumes the input bits of x and propagates; returns the forced output
// value, or nothing on conflict or incomplete propagation.
inline std::optional<std::uint64_t> propagate_inputs(const CnfFormula& f,
                                                     unsigned n_inputs,
                                                     std::uint64_t x) {
    UnitPropagator up(f);
    for (unsigned i = 0; i < n_inputs; ++i) {
        int var = static_cast<int>(i + 1);
        if (!up.assume((x >> i) & 1 ? var : -var)) return std::nullopt;
    }
    std::uint64_t y = 0;
    for (int lit : f.output_literals) {
        auto v = up.value(static_cast<unsigned>(std::abs(lit)));
        if (!v) return std::nullopt;
        bool bit = lit > 0 ? *v : !*v;
        y = (y << 1) | (bit ? 1 : 0);
    }
    return y;
}

}  // namespace taulab::testutil
