#include "taulab/inversion.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <string>
#include <unordered_set>

#include "taulab/errors.hpp"

namespace taulab {
namespace {

void check_guard(unsigned n, unsigned guard, bool force, const char* what) {
    if (n <= guard || force) return;
    throw GuardError(std::string(what) + ": n=" + std::to_string(n) +
                     " exceeds guard " + std::to_string(guard) + " (pass force to run)");
}

// Hard ceilings independent of force; above these the table or code set
// no longer fits sensible memory.
void check_supported(unsigned n, unsigned cap, const char* what) {
    if (n > cap)
        throw ValidationError(std::string(what) + ": n=" + std::to_string(n) +
                              " beyond supported range " + std::to_string(cap));
}

void check_output_range(const TauInstance& tau, const mpz_class& y) {
    if (y < 0) throw ValidationError("invert: y is negative");
    if (y >> tau.n != 0) throw ValidationError("invert: y is at least 2^n");
}

template <class Eval>
void census_fill(PreimageReport& rep, std::uint64_t domain, const Eval& eval) {
    #pragma omp parallel for schedule(static)
    for (std::int64_t x = 0; x < static_cast<std::int64_t>(domain); ++x) {
        std::uint64_t y = eval(static_cast<std::uint64_t>(x));
        std::atomic_ref<std::uint64_t>(rep.counts[y]).fetch_add(1, std::memory_order_relaxed);
        std::atomic_ref<std::uint64_t> witness(rep.witnesses[y]);
        std::uint64_t seen = witness.load(std::memory_order_relaxed);
        while (static_cast<std::uint64_t>(x) < seen &&
               !witness.compare_exchange_weak(seen, static_cast<std::uint64_t>(x),
                                              std::memory_order_relaxed)) {
        }
    }
}

std::uint64_t evaluate_general_u64(const TauInstance& tau, std::uint64_t x) {
    mpz_class y = evaluate(tau, mpz_class(static_cast<unsigned long>(x)));
    return mpz_get_ui(y.get_mpz_t());
}

template <class Eval>
std::vector<std::uint64_t> scan_matches(std::uint64_t domain, const Eval& pred) {
    std::vector<std::uint8_t> hit(domain, 0);
    #pragma omp parallel for schedule(static)
    for (std::int64_t x = 0; x < static_cast<std::int64_t>(domain); ++x) {
        hit[x] = pred(static_cast<std::uint64_t>(x)) ? 1 : 0;
    }
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = 0; x < domain; ++x)
        if (hit[x]) out.push_back(x);
    return out;
}

std::vector<std::uint64_t> tau_codes(const TauInstance& tau) {
    const unsigned n = tau.n;
    const std::uint64_t domain = std::uint64_t{1} << n;
    std::vector<std::uint64_t> codes(domain);
    auto fe = FastEvaluator::make(tau);
    if (fe) {
        const FastEvaluator& eval = *fe;
        #pragma omp parallel for schedule(static)
        for (std::int64_t x = 0; x < static_cast<std::int64_t>(domain); ++x)
            codes[x] = (static_cast<std::uint64_t>(x) << n) |
                       eval(static_cast<std::uint64_t>(x));
    } else {
        #pragma omp parallel for schedule(static)
        for (std::int64_t x = 0; x < static_cast<std::int64_t>(domain); ++x)
            codes[x] = (static_cast<std::uint64_t>(x) << n) |
                       evaluate_general_u64(tau, static_cast<std::uint64_t>(x));
    }
    return codes;
}

void check_codes(unsigned n, const std::vector<std::uint64_t>& codes) {
    if (n < 1 || n > 31) throw ValidationError("irreducible: n beyond supported range 31");
    const std::uint64_t mask = (std::uint64_t{1} << (2 * n)) - 1;
    std::unordered_set<std::uint64_t> xs;
    for (std::uint64_t code : codes) {
        if ((code & ~mask) != 0)
            throw ValidationError("irreducible: code exceeds 2n bits");
        if (!xs.insert(code >> n).second)
            throw ValidationError("irreducible: duplicate x part in code list");
    }
}

IrreducibleReport finish_report(unsigned n, unsigned k,
                                std::vector<std::uint64_t> members) {
    IrreducibleReport rep;
    rep.n = n;
    rep.k = k;
    rep.size = members.size();
    const std::uint64_t domain = std::uint64_t{1} << n;
    rep.bound = static_cast<double>(domain) / k;
    rep.holds = rep.size * k > domain;
    rep.members = std::move(members);
    return rep;
}

}  // namespace

PreimageReport preimage_census(const TauInstance& tau, bool force) {
    check_supported(tau.n, 26, "census");
    check_guard(tau.n, kCensusGuardN, force, "census");
    const std::uint64_t domain = std::uint64_t{1} << tau.n;
    PreimageReport rep;
    rep.n = tau.n;
    rep.counts.assign(domain, 0);
    rep.witnesses.assign(domain, PreimageReport::kNoWitness);
    auto fe = FastEvaluator::make(tau);
    if (fe) {
        census_fill(rep, domain, *fe);
    } else {
        census_fill(rep, domain,
                    [&](std::uint64_t x) { return evaluate_general_u64(tau, x); });
    }
    return rep;
}

PreimageReport preimage_census_serial(const TauInstance& tau, bool force) {
    check_supported(tau.n, 26, "census");
    check_guard(tau.n, kCensusGuardN, force, "census");
    const std::uint64_t domain = std::uint64_t{1} << tau.n;
    PreimageReport rep;
    rep.n = tau.n;
    rep.counts.assign(domain, 0);
    rep.witnesses.assign(domain, PreimageReport::kNoWitness);
    for (std::uint64_t x = 0; x < domain; ++x) {
        std::uint64_t y = evaluate_general_u64(tau, x);
        rep.counts[y] += 1;
        if (rep.witnesses[y] == PreimageReport::kNoWitness) rep.witnesses[y] = x;
    }
    return rep;
}

std::vector<std::uint64_t> brute_force_preimage(const TauInstance& tau,
                                                const mpz_class& y, bool force) {
    check_supported(tau.n, 32, "brute force");
    check_guard(tau.n, kEnumGuardN, force, "brute force");
    check_output_range(tau, y);
    const std::uint64_t domain = std::uint64_t{1} << tau.n;
    const std::uint64_t target = mpz_get_ui(y.get_mpz_t());
    auto fe = FastEvaluator::make(tau);
    if (fe) {
        const FastEvaluator& eval = *fe;
        return scan_matches(domain, [&](std::uint64_t x) { return eval(x) == target; });
    }
    return scan_matches(domain, [&](std::uint64_t x) {
        return evaluate_general_u64(tau, x) == target;
    });
}

std::vector<std::uint64_t> brute_force_preimage_serial(const TauInstance& tau,
                                                       const mpz_class& y, bool force) {
    check_supported(tau.n, 32, "brute force");
    check_guard(tau.n, kEnumGuardN, force, "brute force");
    check_output_range(tau, y);
    const std::uint64_t domain = std::uint64_t{1} << tau.n;
    const std::uint64_t target = mpz_get_ui(y.get_mpz_t());
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = 0; x < domain; ++x)
        if (evaluate_general_u64(tau, x) == target) out.push_back(x);
    return out;
}

std::vector<std::uint64_t> h_inv(const HashParams& h, std::uint64_t m,
                                 unsigned n_bits, bool force) {
    check_supported(n_bits, 32, "hash preimage");
    check_guard(n_bits, kEnumGuardN, force, "hash preimage");
    if (m >= h.t) throw ValidationError("hash preimage: target is at least t");
    const std::uint64_t domain = std::uint64_t{1} << n_bits;
    if (h.fits_u64()) {
        const std::uint64_t p = mpz_get_ui(h.p.get_mpz_t());
        const std::uint64_t a = mpz_get_ui(h.a.get_mpz_t());
        const std::uint64_t b = mpz_get_ui(h.b.get_mpz_t());
        const std::uint64_t t = h.t;
        return scan_matches(domain, [&](std::uint64_t x) {
            std::uint64_t r = static_cast<std::uint64_t>(
                (static_cast<unsigned __int128>(a) * x + b) % p);
            return r % t == m;
        });
    }
    return scan_matches(domain, [&](std::uint64_t x) {
        return eval_hash(h, mpz_class(static_cast<unsigned long>(x))) == m;
    });
}

RandomizedInvertReport randomized_invert(const TauInstance& tau, const mpz_class& y,
                                         std::uint64_t budget, std::uint64_t seed,
                                         const PreimageReport* census,
                                         const std::vector<unsigned>& envelope_cs) {
    check_output_range(tau, y);
    RandomizedInvertReport rep;
    rep.budget = budget;
    rep.single_trial_claim = std::pow(8.0, -static_cast<double>(tau.n));
    for (unsigned c : envelope_cs)
        rep.envelopes.emplace_back(c, std::pow(static_cast<double>(tau.n),
                                               -static_cast<double>(c)));
    RandomState rng(seed);
    for (std::uint64_t trial = 0; trial < budget; ++trial) {
        mpz_class x = rng.draw_bits(tau.n);
        if (evaluate(tau, x) == y) {
            ++rep.hits;
            if (!rep.witness) rep.witness = x;
        }
    }
    rep.success_rate = budget == 0 ? 0.0
                                   : static_cast<double>(rep.hits) /
                                         static_cast<double>(budget);
    if (census != nullptr) {
        if (census->n != tau.n)
            throw ValidationError("invert: census was built for a different n");
        std::uint64_t target = mpz_get_ui(y.get_mpz_t());
        rep.census_rate = static_cast<double>(census->counts[target]) /
                          static_cast<double>(census->domain_size());
    }
    return rep;
}

double bit_event_probability(const PreimageReport& report, unsigned i, unsigned v) {
    if (i < 1 || i > report.n) throw ValidationError("bit probability: index out of range");
    if (v > 1) throw ValidationError("bit probability: value must be 0 or 1");
    const unsigned shift = report.n - i;
    std::uint64_t total = 0;
    std::uint64_t hits = 0;
    for (std::uint64_t y = 0; y < report.domain_size(); ++y) {
        total += report.counts[y];
        if (((y >> shift) & 1) == v) hits += report.counts[y];
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

std::optional<double> conditional_bit_probability(const PreimageReport& report,
                                                  unsigned i, unsigned j,
                                                  unsigned vi, unsigned vj) {
    if (i < 1 || i > report.n || j < 1 || j > report.n)
        throw ValidationError("bit probability: index out of range");
    if (i == j) throw ValidationError("bit probability: indices must differ");
    if (vi > 1 || vj > 1) throw ValidationError("bit probability: value must be 0 or 1");
    const unsigned si = report.n - i;
    const unsigned sj = report.n - j;
    std::uint64_t num = 0;
    std::uint64_t den = 0;
    for (std::uint64_t y = 0; y < report.domain_size(); ++y) {
        if (((y >> sj) & 1) != vj) continue;
        den += report.counts[y];
        if (((y >> si) & 1) == vi) num += report.counts[y];
    }
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

unsigned ones_count(std::uint64_t y) { return static_cast<unsigned>(std::popcount(y)); }

unsigned ones_count(const mpz_class& y) {
    if (y < 0) throw ValidationError("ones_count: value is negative");
    return static_cast<unsigned>(mpz_popcount(y.get_mpz_t()));
}

IrreducibleReport irreducible_from_codes(unsigned n,
                                         const std::vector<std::uint64_t>& codes,
                                         unsigned k) {
    if (k < 1) throw ValidationError("irreducible: k must be positive");
    check_codes(n, codes);
    std::unordered_set<std::uint64_t> codeset(codes.begin(), codes.end());
    std::vector<std::uint8_t> irreducible(codes.size(), 0);
    #pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(codes.size()); ++idx) {
        bool isolated = true;
        for (unsigned bit = 0; bit < 2 * n; ++bit) {
            if (codeset.count(codes[idx] ^ (std::uint64_t{1} << bit))) {
                isolated = false;
                break;
            }
        }
        irreducible[idx] = isolated ? 1 : 0;
    }
    std::vector<std::uint64_t> members;
    for (std::size_t idx = 0; idx < codes.size(); ++idx)
        if (irreducible[idx]) members.push_back(codes[idx]);
    std::sort(members.begin(), members.end());
    return finish_report(n, k, std::move(members));
}

IrreducibleReport irreducible_from_codes_all_pairs(unsigned n,
                                                   const std::vector<std::uint64_t>& codes,
                                                   unsigned k) {
    if (k < 1) throw ValidationError("irreducible: k must be positive");
    check_codes(n, codes);
    std::vector<std::uint64_t> members;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        bool isolated = true;
        for (std::size_t j = 0; j < codes.size(); ++j) {
            if (i == j) continue;
            if (std::popcount(codes[i] ^ codes[j]) == 1) {
                isolated = false;
                break;
            }
        }
        if (isolated) members.push_back(codes[i]);
    }
    std::sort(members.begin(), members.end());
    return finish_report(n, k, std::move(members));
}

IrreducibleReport irreducible_census(const TauInstance& tau, unsigned k, bool force) {
    check_supported(tau.n, 20, "irreducible");
    check_guard(tau.n, kIrreducibleGuardN, force, "irreducible");
    return irreducible_from_codes(tau.n, tau_codes(tau), k);
}

IrreducibleReport irreducible_census_all_pairs(const TauInstance& tau, unsigned k,
                                               bool force) {
    check_supported(tau.n, 20, "irreducible");
    check_guard(tau.n, kIrreducibleGuardN, force, "irreducible");
    return irreducible_from_codes_all_pairs(tau.n, tau_codes(tau), k);
}

}  // namespace taulab
