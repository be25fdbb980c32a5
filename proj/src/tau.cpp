#include "taulab/tau.hpp"

#include <cctype>
#include <set>
#include <utility>

#include "json.hpp"

#include "taulab/errors.hpp"

namespace taulab {
namespace {

using nlohmann::json;

bool is_power_of_two(unsigned n) { return n != 0 && (n & (n - 1)) == 0; }

void apply_step(unsigned n, unsigned& row, unsigned& col, const DirectionStep& step) {
    int r = static_cast<int>(row) + step.dr;
    int c = static_cast<int>(col) + step.dc;
    if (r < 1) r = static_cast<int>(n);
    else if (r > static_cast<int>(n)) r = 1;
    if (c < 1) c = static_cast<int>(n);
    else if (c > static_cast<int>(n)) c = 1;
    row = static_cast<unsigned>(r);
    col = static_cast<unsigned>(c);
}

std::uint64_t hash_fits_u64(const HashParams& h, std::uint64_t x) {
    std::uint64_t p = mpz_get_ui(h.p.get_mpz_t());
    std::uint64_t a = mpz_get_ui(h.a.get_mpz_t());
    std::uint64_t b = mpz_get_ui(h.b.get_mpz_t());
    std::uint64_t r = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * x + b) % p);
    return r % h.t;
}

void check_input_range(const TauInstance& tau, const mpz_class& x) {
    if (x < 0) throw ValidationError("evaluate: x is negative");
    mpz_class bound = mpz_class(1) << tau.n;
    if (x >= bound) throw ValidationError("evaluate: x is at least 2^n");
}

void check_collection(const std::vector<HashParams>& hashes, std::size_t expect,
                      std::uint64_t t, const char* name) {
    if (hashes.size() != expect)
        throw InvariantViolation(std::string(name) + ": wrong collection size");
    ConstraintIndex index;
    for (const HashParams& h : hashes) {
        h.validate();
        if (h.t != t)
            throw InvariantViolation(std::string(name) + ": hash modulus mismatch");
        if (!index.admissible(h))
            throw InvariantViolation(std::string(name) +
                                     ": pairwise hash constraint violated");
        index.insert(h);
    }
}

std::uint8_t hex_digit_value(char ch) {
    if (ch >= '0' && ch <= '9') return static_cast<std::uint8_t>(ch - '0');
    if (ch >= 'a' && ch <= 'f') return static_cast<std::uint8_t>(ch - 'a' + 10);
    if (ch >= 'A' && ch <= 'F') return static_cast<std::uint8_t>(ch - 'A' + 10);
    throw ParseError("deserialize: matrix row is not hex");
}

const json& require_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError(std::string("deserialize: missing field ") + key);
    return *it;
}

std::uint64_t field_unsigned(const json& j, const char* key) {
    const json& f = require_field(j, key);
    if (!f.is_number_unsigned())
        throw ParseError(std::string("deserialize: field ") + key +
                         " is not an unsigned integer");
    return f.get<std::uint64_t>();
}

mpz_class field_decimal(const json& j, const char* key) {
    const json& f = require_field(j, key);
    if (!f.is_string())
        throw ParseError(std::string("deserialize: field ") + key +
                         " is not a decimal string");
    const std::string s = f.get<std::string>();
    if (s.empty()) throw ParseError(std::string("deserialize: field ") + key + " is empty");
    for (char ch : s) {
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw ParseError(std::string("deserialize: field ") + key +
                             " is not a decimal string");
    }
    return mpz_class(s, 10);
}

json hash_to_json(const HashParams& h) {
    json j;
    j["a"] = h.a.get_str();
    j["b"] = h.b.get_str();
    j["p"] = h.p.get_str();
    j["t"] = h.t;
    return j;
}

HashParams hash_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("deserialize: hash entry is not an object");
    HashParams h;
    h.a = field_decimal(j, "a");
    h.b = field_decimal(j, "b");
    h.p = field_decimal(j, "p");
    h.t = field_unsigned(j, "t");
    return h;
}

BitMatrix matrix_from_json(const json& j, unsigned n) {
    if (!j.is_array() || j.size() != n)
        throw ParseError("deserialize: matrix is not an array of n rows");
    unsigned digits = (n + 3) / 4;
    BitMatrix m(n);
    for (unsigned r = 1; r <= n; ++r) {
        const json& row = j[r - 1];
        if (!row.is_string())
            throw ParseError("deserialize: matrix row is not a string");
        const std::string s = row.get<std::string>();
        if (s.size() != digits)
            throw ParseError("deserialize: matrix row has wrong digit count");
        mpz_class value = 0;
        for (char ch : s) {
            value <<= 4;
            value += hex_digit_value(ch);
        }
        if (value >> n != 0)
            throw ParseError("deserialize: matrix row value out of range");
        for (unsigned c = 1; c <= n; ++c)
            m.set(r, c, static_cast<std::uint8_t>(mpz_tstbit(value.get_mpz_t(), n - c)));
    }
    return m;
}

}  // namespace

std::string BitMatrix::row_hex(unsigned row) const {
    unsigned digits = (n_ + 3) / 4;
    mpz_class value = 0;
    for (unsigned c = 1; c <= n_; ++c) {
        value <<= 1;
        value += at(row, c);
    }
    std::string raw = value.get_str(16);
    std::string out(digits - raw.size(), '0');
    return out + raw;
}

void TauInstance::validate() const {
    if (n < 2) throw InvariantViolation("instance: n must be at least 2");
    if (prime_width < 2) throw InvariantViolation("instance: prime_width must be at least 2");
    if (matrices.size() != n) throw InvariantViolation("matrices: wrong collection size");
    std::set<std::vector<std::uint8_t>> seen;
    for (const BitMatrix& m : matrices) {
        if (m.size() != n) throw InvariantViolation("matrices: wrong dimension");
        if (!seen.insert(m.cells()).second)
            throw InvariantViolation("matrices: duplicate matrix");
    }
    check_collection(h_row, n, n, "h_row");
    check_collection(h_col, n, n, "h_col");
    check_collection(h_m, static_cast<std::size_t>(n) * n, 8, "h_m");
}

bool TauInstance::fast_eligible() const {
    if (n > 64) return false;
    for (const auto* coll : {&h_row, &h_col, &h_m}) {
        for (const HashParams& h : *coll) {
            if (!h.fits_u64()) return false;
        }
    }
    return true;
}

TauInstance construct(unsigned n, std::uint64_t seed,
                      std::optional<unsigned> prime_width, bool allow_any_length) {
    if (n < 2) throw ValidationError("construct: n must be at least 2");
    if (!allow_any_length && !is_power_of_two(n))
        throw ValidationError("construct: n is not a power of two");
    unsigned width = prime_width.value_or(n < 12 ? 12u : n);
    if (width < 2) throw ValidationError("construct: prime_width must be at least 2");

    RandomState root(seed);
    std::uint64_t matrix_seed = root.next_word();
    std::uint64_t row_seed = root.next_word();
    std::uint64_t col_seed = root.next_word();
    std::uint64_t step_seed = root.next_word();

    TauInstance tau;
    tau.n = n;
    tau.prime_width = width;
    tau.seed = seed;

    RandomState mrng(matrix_seed);
    std::set<std::vector<std::uint8_t>> seen;
    constexpr int kMatrixAttempts = 100000;
    int attempts = 0;
    while (tau.matrices.size() < n) {
        if (++attempts > kMatrixAttempts)
            throw SamplingExhaustedError("construct: matrix resampling cap reached");
        BitMatrix m(n);
        for (unsigned r = 1; r <= n; ++r) {
            mpz_class row = mrng.draw_bits(n);
            for (unsigned c = 1; c <= n; ++c)
                m.set(r, c, static_cast<std::uint8_t>(mpz_tstbit(row.get_mpz_t(), n - c)));
        }
        if (seen.insert(m.cells()).second) tau.matrices.push_back(std::move(m));
    }

    RandomState rrng(row_seed);
    ConstraintIndex row_index;
    for (unsigned i = 0; i < n; ++i)
        tau.h_row.push_back(sample_hash(rrng, width, n, row_index));

    RandomState crng(col_seed);
    ConstraintIndex col_index;
    for (unsigned i = 0; i < n; ++i)
        tau.h_col.push_back(sample_hash(crng, width, n, col_index));

    RandomState srng(step_seed);
    ConstraintIndex step_index;
    for (std::size_t i = 0; i < static_cast<std::size_t>(n) * n; ++i)
        tau.h_m.push_back(sample_hash(srng, width, 8, step_index));

    tau.validate();
    return tau;
}

mpz_class evaluate(const TauInstance& tau, const mpz_class& x) {
    check_input_range(tau, x);
    if (tau.fast_eligible()) {
        return mpz_class(static_cast<unsigned long>(
            evaluate_u64(tau, mpz_get_ui(x.get_mpz_t()))));
    }
    const unsigned n = tau.n;
    mpz_class y = 0;
    for (unsigned i = 1; i <= n; ++i) {
        unsigned row = static_cast<unsigned>(eval_hash(tau.h_row[i - 1], x)) + 1;
        unsigned col = static_cast<unsigned>(eval_hash(tau.h_col[i - 1], x)) + 1;
        for (unsigned j = 1; j <= n; ++j) {
            std::uint64_t d = eval_hash(tau.step_hash(i, j), x) + 1;
            apply_step(n, row, col, kDirectionTable[d - 1]);
        }
        y <<= 1;
        y += tau.matrices[i - 1].at(row, col);
    }
    return y;
}

std::uint64_t evaluate_u64(const TauInstance& tau, std::uint64_t x) {
    if (!tau.fast_eligible())
        throw ValidationError("evaluate: instance parameters exceed machine words");
    const unsigned n = tau.n;
    if (n < 64 && (x >> n) != 0)
        throw ValidationError("evaluate: x is at least 2^n");
    std::uint64_t y = 0;
    for (unsigned i = 1; i <= n; ++i) {
        unsigned row = static_cast<unsigned>(hash_fits_u64(tau.h_row[i - 1], x)) + 1;
        unsigned col = static_cast<unsigned>(hash_fits_u64(tau.h_col[i - 1], x)) + 1;
        for (unsigned j = 1; j <= n; ++j) {
            std::uint64_t d = hash_fits_u64(tau.step_hash(i, j), x) + 1;
            apply_step(n, row, col, kDirectionTable[d - 1]);
        }
        y = (y << 1) | tau.matrices[i - 1].at(row, col);
    }
    return y;
}

std::optional<FastEvaluator> FastEvaluator::make(const TauInstance& tau) {
    if (!tau.fast_eligible()) return std::nullopt;
    FastEvaluator fe;
    fe.n_ = tau.n;
    auto unpack = [](const std::vector<HashParams>& src, std::vector<std::uint64_t>& a,
                     std::vector<std::uint64_t>& b, std::vector<std::uint64_t>& p) {
        a.reserve(src.size());
        b.reserve(src.size());
        p.reserve(src.size());
        for (const HashParams& h : src) {
            a.push_back(mpz_get_ui(h.a.get_mpz_t()));
            b.push_back(mpz_get_ui(h.b.get_mpz_t()));
            p.push_back(mpz_get_ui(h.p.get_mpz_t()));
        }
    };
    unpack(tau.h_row, fe.row_a_, fe.row_b_, fe.row_p_);
    unpack(tau.h_col, fe.col_a_, fe.col_b_, fe.col_p_);
    unpack(tau.h_m, fe.m_a_, fe.m_b_, fe.m_p_);
    fe.cells_.reserve(static_cast<std::size_t>(tau.n) * tau.n * tau.n);
    for (const BitMatrix& m : tau.matrices)
        fe.cells_.insert(fe.cells_.end(), m.cells().begin(), m.cells().end());
    return fe;
}

std::uint64_t FastEvaluator::operator()(std::uint64_t x) const {
    const unsigned n = n_;
    const std::uint64_t tn = n;
    std::uint64_t y = 0;
    std::size_t step = 0;
    for (unsigned i = 0; i < n; ++i) {
        unsigned row = static_cast<unsigned>(
            static_cast<std::uint64_t>(
                (static_cast<unsigned __int128>(row_a_[i]) * x + row_b_[i]) % row_p_[i]) %
            tn) + 1;
        unsigned col = static_cast<unsigned>(
            static_cast<std::uint64_t>(
                (static_cast<unsigned __int128>(col_a_[i]) * x + col_b_[i]) % col_p_[i]) %
            tn) + 1;
        for (unsigned j = 0; j < n; ++j, ++step) {
            std::uint64_t d =
                static_cast<std::uint64_t>(
                    (static_cast<unsigned __int128>(m_a_[step]) * x + m_b_[step]) %
                    m_p_[step]) % 8u;
            apply_step(n, row, col, kDirectionTable[d]);
        }
        y = (y << 1) |
            cells_[(static_cast<std::size_t>(i) * n + (row - 1)) * n + (col - 1)];
    }
    return y;
}

std::pair<mpz_class, std::vector<WalkTrace>> evaluate_traced(const TauInstance& tau,
                                                             const mpz_class& x) {
    check_input_range(tau, x);
    const unsigned n = tau.n;
    mpz_class y = 0;
    std::vector<WalkTrace> traces;
    traces.reserve(n);
    for (unsigned i = 1; i <= n; ++i) {
        WalkTrace trace;
        unsigned row = static_cast<unsigned>(eval_hash(tau.h_row[i - 1], x)) + 1;
        unsigned col = static_cast<unsigned>(eval_hash(tau.h_col[i - 1], x)) + 1;
        trace.start_row = row;
        trace.start_col = col;
        trace.directions.reserve(n);
        trace.visited.reserve(n);
        for (unsigned j = 1; j <= n; ++j) {
            std::uint64_t d = eval_hash(tau.step_hash(i, j), x) + 1;
            trace.directions.push_back(static_cast<std::uint8_t>(d));
            apply_step(n, row, col, kDirectionTable[d - 1]);
            trace.visited.emplace_back(row, col);
        }
        trace.bit = tau.matrices[i - 1].at(row, col);
        y <<= 1;
        y += trace.bit;
        traces.push_back(std::move(trace));
    }
    return {y, traces};
}

mpz_class replay(const TauInstance& tau, const std::vector<WalkTrace>& traces) {
    const unsigned n = tau.n;
    if (traces.size() != n) throw ValidationError("replay: trace count mismatch");
    mpz_class y = 0;
    for (unsigned i = 1; i <= n; ++i) {
        const WalkTrace& trace = traces[i - 1];
        if (trace.directions.size() != n || trace.visited.size() != n)
            throw ValidationError("replay: trace length mismatch");
        unsigned row = trace.start_row;
        unsigned col = trace.start_col;
        if (row < 1 || row > n || col < 1 || col > n)
            throw ValidationError("replay: start coordinate out of range");
        for (unsigned j = 0; j < n; ++j) {
            std::uint8_t d = trace.directions[j];
            if (d < 1 || d > 8) throw ValidationError("replay: direction out of range");
            apply_step(n, row, col, kDirectionTable[d - 1]);
            if (trace.visited[j] != std::make_pair(row, col))
                throw InvariantViolation("replay: visited list diverges from directions");
        }
        y <<= 1;
        y += tau.matrices[i - 1].at(row, col);
    }
    return y;
}

std::string serialize(const TauInstance& tau) {
    json j;
    j["version"] = "taulab-1";
    j["n"] = tau.n;
    j["prime_width"] = tau.prime_width;
    if (tau.seed) j["seed"] = std::to_string(*tau.seed);
    json dirs = json::array();
    for (const DirectionStep& s : kDirectionTable) dirs.push_back({s.dr, s.dc});
    j["direction_table"] = std::move(dirs);
    json mats = json::array();
    for (const BitMatrix& m : tau.matrices) {
        json rows = json::array();
        for (unsigned r = 1; r <= tau.n; ++r) rows.push_back(m.row_hex(r));
        mats.push_back(std::move(rows));
    }
    j["matrices"] = std::move(mats);
    json rows = json::array();
    for (const HashParams& h : tau.h_row) rows.push_back(hash_to_json(h));
    j["h_row"] = std::move(rows);
    json cols = json::array();
    for (const HashParams& h : tau.h_col) cols.push_back(hash_to_json(h));
    j["h_col"] = std::move(cols);
    json steps = json::array();
    for (unsigned i = 1; i <= tau.n; ++i) {
        json line = json::array();
        for (unsigned jj = 1; jj <= tau.n; ++jj)
            line.push_back(hash_to_json(tau.step_hash(i, jj)));
        steps.push_back(std::move(line));
    }
    j["h_m"] = std::move(steps);
    return j.dump(2) + "\n";
}

TauInstance deserialize(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("deserialize: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("deserialize: top level is not an object");
    const json& version = require_field(j, "version");
    if (!version.is_string()) throw ParseError("deserialize: version is not a string");
    if (version.get<std::string>() != "taulab-1")
        throw VersionMismatchError("deserialize: unsupported format version " +
                                   version.get<std::string>());

    std::uint64_t n64 = field_unsigned(j, "n");
    if (n64 < 2 || n64 > 4096) throw ParseError("deserialize: n out of range");
    unsigned n = static_cast<unsigned>(n64);

    TauInstance tau;
    tau.n = n;
    std::uint64_t width = field_unsigned(j, "prime_width");
    if (width < 2 || width > 1u << 20) throw ParseError("deserialize: prime_width out of range");
    tau.prime_width = static_cast<unsigned>(width);

    if (j.contains("seed")) {
        mpz_class seed = field_decimal(j, "seed");
        if (mpz_fits_ulong_p(seed.get_mpz_t()) == 0)
            throw ParseError("deserialize: seed exceeds 64 bits");
        tau.seed = mpz_get_ui(seed.get_mpz_t());
    }

    const json& dirs = require_field(j, "direction_table");
    if (!dirs.is_array() || dirs.size() != kDirectionTable.size())
        throw ParseError("deserialize: direction_table is not an array of 8 steps");
    for (std::size_t i = 0; i < kDirectionTable.size(); ++i) {
        const json& row = dirs[i];
        if (!row.is_array() || row.size() != 2 || !row[0].is_number_integer() ||
            !row[1].is_number_integer())
            throw ParseError("deserialize: direction_table entry malformed");
        if (row[0].get<int>() != kDirectionTable[i].dr ||
            row[1].get<int>() != kDirectionTable[i].dc)
            throw InvariantViolation("deserialize: direction table mismatch");
    }

    const json& mats = require_field(j, "matrices");
    if (!mats.is_array() || mats.size() != n)
        throw ParseError("deserialize: matrices is not an array of n entries");
    for (const json& m : mats) tau.matrices.push_back(matrix_from_json(m, n));

    auto read_collection = [&](const char* key, std::vector<HashParams>& out,
                               std::size_t expect) {
        const json& coll = require_field(j, key);
        if (!coll.is_array() || coll.size() != expect)
            throw ParseError(std::string("deserialize: ") + key + " has wrong size");
        for (const json& entry : coll) out.push_back(hash_from_json(entry));
    };
    read_collection("h_row", tau.h_row, n);
    read_collection("h_col", tau.h_col, n);

    const json& steps = require_field(j, "h_m");
    if (!steps.is_array() || steps.size() != n)
        throw ParseError("deserialize: h_m is not an array of n rows");
    for (const json& line : steps) {
        if (!line.is_array() || line.size() != n)
            throw ParseError("deserialize: h_m row has wrong size");
        for (const json& entry : line) tau.h_m.push_back(hash_from_json(entry));
    }

    tau.validate();
    return tau;
}

}  // namespace taulab
