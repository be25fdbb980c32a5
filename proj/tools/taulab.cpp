#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"

#include "taulab/cnf.hpp"
#include "taulab/errors.hpp"
#include "taulab/inversion.hpp"
#include "taulab/reports.hpp"
#include "taulab/tau.hpp"
#include "taulab/version.hpp"

namespace {

using namespace taulab;

// TAULAB_MAX_N can widen a desk-scale guard, and --force bypasses it.
unsigned effective_guard(unsigned builtin_guard) {
    unsigned guard = builtin_guard;
    if (const char* env = std::getenv("TAULAB_MAX_N")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > guard && v <= 63)
            guard = static_cast<unsigned>(v);
    }
    return guard;
}

void check_cli_guard(unsigned n, unsigned builtin_guard, bool force, const char* what) {
    if (force) return;
    unsigned guard = effective_guard(builtin_guard);
    if (n > guard)
        throw GuardError(std::string(what) + ": n=" + std::to_string(n) +
                         " exceeds guard " + std::to_string(guard) +
                         " (raise TAULAB_MAX_N or pass --force)");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << content;
    if (!out) throw ValidationError("short write to " + path);
}

// Writes to the given path (with metadata sidecar) or to stdout.
void emit_output(const std::string& out_path, const std::string& content,
                 const RunMetadata* meta) {
    if (out_path.empty()) {
        std::fputs(content.c_str(), stdout);
        return;
    }
    write_file(out_path, content);
    if (meta != nullptr) write_file(out_path + ".meta.json", metadata_json(*meta));
}

mpz_class parse_value(const std::string& text, const char* what) {
    try {
        // Base 0: decimal by default, 0x/0b prefixes accepted.
        return mpz_class(text, 0);
    } catch (const std::invalid_argument&) {
        throw ValidationError(std::string(what) + ": not a number: " + text);
    }
}

struct InstanceSource {
    std::string instance_path;
    unsigned n = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::optional<unsigned> prime_width;

    // Either a serialized instance or (--n, --seed) to construct one.
    TauInstance resolve() const {
        if (!instance_path.empty()) return deserialize(read_file(instance_path));
        if (n == 0 || !seed_set)
            throw ValidationError("either --instance or both --n and --seed are required");
        return construct(n, seed, prime_width);
    }

    void attach(CLI::App* cmd, bool with_instance = true) {
        if (with_instance)
            cmd->add_option("--instance", instance_path, "serialized instance file");
        cmd->add_option("--n", n, "output length");
        cmd->add_option("--seed", seed, "construction seed")
            ->each([this](const std::string&) { seed_set = true; });
        cmd->add_option_function<unsigned>(
            "--prime-width", [this](unsigned w) { prime_width = w; },
            "hash prime bit width (default max(n, 12))");
    }
};

int run(int argc, char** argv) {
    CLI::App app{"laboratory for the tau family: construction, evaluation, "
                 "inversion experiments, CNF encoding"};
    app.set_version_flag("--version", std::string(kArtifactVersion));
    app.require_subcommand(1);
    unsigned workers = 0;
    app.add_option("--workers", workers, "worker thread count for parallel kernels")
        ->check(CLI::Range(1u, 1024u));
    bool force = false;
    app.add_flag("--force", force, "bypass desk-scale guards");

    // construct
    auto* c_cmd = app.add_subcommand("construct", "draw an instance from a seed");
    InstanceSource c_src;
    c_src.attach(c_cmd, false);
    std::string c_out;
    c_cmd->add_option("--out", c_out, "output file (default stdout)");

    // eval
    auto* e_cmd = app.add_subcommand("eval", "apply an instance to one input");
    InstanceSource e_src;
    e_src.attach(e_cmd);
    std::string e_x;
    bool e_trace = false;
    e_cmd->add_option("--x", e_x, "input value (decimal or 0x hex)")->required();
    e_cmd->add_flag("--trace", e_trace, "print each output bit's walk");

    // invert
    auto* i_cmd = app.add_subcommand("invert", "search for preimages of y");
    InstanceSource i_src;
    i_src.attach(i_cmd);
    std::string i_y;
    std::string i_mode = "random";
    std::uint64_t i_budget = 4096;
    std::uint64_t i_trial_seed = 0;
    bool i_census = false;
    std::string i_out;
    i_cmd->add_option("--y", i_y, "target output (decimal or 0x hex)")->required();
    i_cmd->add_option("--mode", i_mode, "random or brute")
        ->check(CLI::IsMember({"random", "brute"}));
    i_cmd->add_option("--budget", i_budget, "random mode: number of trials");
    i_cmd->add_option("--trial-seed", i_trial_seed, "random mode: sampling seed");
    i_cmd->add_flag("--census", i_census,
                    "random mode: also run the full census for the true rate");
    i_cmd->add_option("--out", i_out, "output file (default stdout)");

    // experiment
    auto* x_cmd = app.add_subcommand("experiment", "batch measurements to CSV");
    x_cmd->require_subcommand(1);
    std::string x_out;
    x_cmd->add_option("--out", x_out, "CSV file; a .meta.json sidecar is written too");

    auto* census_cmd = x_cmd->add_subcommand("census", "preimage count per output");
    InstanceSource census_src;
    census_src.attach(census_cmd);

    auto* bits_cmd = x_cmd->add_subcommand("bits", "per-bit output frequencies");
    InstanceSource bits_src;
    bits_src.attach(bits_cmd);

    auto* cond_cmd = x_cmd->add_subcommand("conditional", "pairwise bit dependence");
    InstanceSource cond_src;
    cond_src.attach(cond_cmd);

    auto* irr_cmd = x_cmd->add_subcommand("irreducible", "irreducible code census");
    InstanceSource irr_src;
    irr_src.attach(irr_cmd);
    unsigned irr_k = 3;
    bool irr_check = false;
    irr_cmd->add_option("--k", irr_k, "bound divisor (flag holds iff size > 2^n/k)");
    irr_cmd->add_flag("--verify-all-pairs", irr_check,
                      "cross-check the flip-probe kernel against the all-pairs scan");

    auto* hinv_cmd = x_cmd->add_subcommand("hinv", "hash preimage sizes per residue");
    std::string hinv_a, hinv_b, hinv_p;
    std::uint64_t hinv_t = 0;
    unsigned hinv_bits = 0;
    hinv_cmd->add_option("--a", hinv_a, "hash parameter a")->required();
    hinv_cmd->add_option("--b", hinv_b, "hash parameter b")->required();
    hinv_cmd->add_option("--p", hinv_p, "hash parameter p")->required();
    hinv_cmd->add_option("--t", hinv_t, "hash modulus t")->required();
    hinv_cmd->add_option("--bits", hinv_bits, "input domain bit width")->required();

    auto* growth_cmd = x_cmd->add_subcommand("cnf-growth", "formula size per n");
    std::string growth_ns = "2,4,8";
    std::uint64_t growth_seed = 0;
    bool growth_seed_set = false;
    growth_cmd->add_option("--ns", growth_ns, "comma-separated output lengths");
    growth_cmd->add_option("--seed", growth_seed, "construction seed")
        ->each([&](const std::string&) { growth_seed_set = true; });

    // cnf
    auto* f_cmd = app.add_subcommand("cnf", "emit the instance circuit as DIMACS");
    InstanceSource f_src;
    f_src.attach(f_cmd);
    std::string f_y;
    std::string f_out;
    f_cmd->add_option("--y", f_y, "pin the output to this value");
    f_cmd->add_option("--out", f_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (workers != 0) omp_set_num_threads(static_cast<int>(workers));

    if (c_cmd->parsed()) {
        if (c_src.n == 0 || !c_src.seed_set)
            throw ValidationError("construct: --n and --seed are required");
        TauInstance tau = construct(c_src.n, c_src.seed, c_src.prime_width);
        emit_output(c_out, serialize(tau), nullptr);
        return 0;
    }

    if (e_cmd->parsed()) {
        TauInstance tau = e_src.resolve();
        mpz_class x = parse_value(e_x, "eval: x");
        if (!e_trace) {
            mpz_class y = evaluate(tau, x);
            std::printf("%s\n", y.get_str().c_str());
            return 0;
        }
        auto [y, traces] = evaluate_traced(tau, x);
        for (unsigned i = 0; i < tau.n; ++i) {
            const WalkTrace& t = traces[i];
            std::string line = "bit " + std::to_string(i + 1) + ": start (" +
                               std::to_string(t.start_row) + "," +
                               std::to_string(t.start_col) + ") dirs ";
            for (std::size_t j = 0; j < t.directions.size(); ++j) {
                if (j) line += ',';
                line += std::to_string(t.directions[j]);
            }
            line += " visited ";
            for (std::size_t j = 0; j < t.visited.size(); ++j) {
                if (j) line += ',';
                line += "(" + std::to_string(t.visited[j].first) + "," +
                        std::to_string(t.visited[j].second) + ")";
            }
            line += " value " + std::to_string(t.bit);
            std::printf("%s\n", line.c_str());
        }
        std::printf("%s\n", y.get_str().c_str());
        return 0;
    }

    if (i_cmd->parsed()) {
        TauInstance tau = i_src.resolve();
        mpz_class y = parse_value(i_y, "invert: y");
        if (i_mode == "brute") {
            check_cli_guard(tau.n, kEnumGuardN, force, "brute force");
            std::vector<std::uint64_t> xs = brute_force_preimage(tau, y, true);
            std::string out;
            for (std::uint64_t x : xs) {
                out += std::to_string(x);
                out += '\n';
            }
            emit_output(i_out, out, nullptr);
            return 0;
        }
        std::optional<PreimageReport> census;
        if (i_census) {
            check_cli_guard(tau.n, kCensusGuardN, force, "census");
            census = preimage_census(tau, true);
        }
        RandomizedInvertReport rep = randomized_invert(
            tau, y, i_budget, i_trial_seed, census ? &*census : nullptr);
        emit_output(i_out, invert_report_json(rep, tau.n), nullptr);
        return 0;
    }

    if (x_cmd->parsed()) {
        auto run_census_family = [&](const InstanceSource& src,
                                     const char* name) -> std::pair<TauInstance, PreimageReport> {
            TauInstance tau = src.resolve();
            check_cli_guard(tau.n, kCensusGuardN, force, name);
            PreimageReport rep = preimage_census(tau, true);
            return {std::move(tau), std::move(rep)};
        };
        auto meta_for = [&](const char* cmd, const TauInstance& tau) {
            RunMetadata meta;
            meta.command = std::string("experiment ") + cmd;
            meta.n = tau.n;
            meta.seed = tau.seed;
            meta.prime_width = tau.prime_width;
            return meta;
        };
        if (census_cmd->parsed()) {
            auto [tau, rep] = run_census_family(census_src, "census");
            RunMetadata meta = meta_for("census", tau);
            emit_output(x_out, write_census_csv(rep), &meta);
            return 0;
        }
        if (bits_cmd->parsed()) {
            auto [tau, rep] = run_census_family(bits_src, "bits");
            RunMetadata meta = meta_for("bits", tau);
            emit_output(x_out, write_bits_csv(rep), &meta);
            return 0;
        }
        if (cond_cmd->parsed()) {
            auto [tau, rep] = run_census_family(cond_src, "conditional");
            RunMetadata meta = meta_for("conditional", tau);
            emit_output(x_out, write_conditional_csv(rep), &meta);
            return 0;
        }
        if (irr_cmd->parsed()) {
            TauInstance tau = irr_src.resolve();
            check_cli_guard(tau.n, kIrreducibleGuardN, force, "irreducible");
            IrreducibleReport rep = irreducible_census(tau, irr_k, true);
            if (irr_check) {
                IrreducibleReport ref = irreducible_census_all_pairs(tau, irr_k, true);
                if (ref.members != rep.members)
                    throw InvariantViolation(
                        "irreducible: flip-probe and all-pairs kernels disagree");
            }
            RunMetadata meta = meta_for("irreducible", tau);
            meta.extra["k"] = std::to_string(irr_k);
            emit_output(x_out, write_irreducible_csv(rep), &meta);
            return 0;
        }
        if (hinv_cmd->parsed()) {
            check_cli_guard(hinv_bits, kEnumGuardN, force, "hash preimage");
            HashParams h;
            h.a = parse_value(hinv_a, "hinv: a");
            h.b = parse_value(hinv_b, "hinv: b");
            h.p = parse_value(hinv_p, "hinv: p");
            h.t = hinv_t;
            h.validate();
            std::vector<std::uint64_t> sizes(h.t, 0);
            for (std::uint64_t m = 0; m < h.t; ++m)
                sizes[m] = h_inv(h, m, hinv_bits, true).size();
            RunMetadata meta;
            meta.command = "experiment hinv";
            meta.n = hinv_bits;
            meta.extra["a"] = h.a.get_str();
            meta.extra["b"] = h.b.get_str();
            meta.extra["p"] = h.p.get_str();
            meta.extra["t"] = std::to_string(h.t);
            emit_output(x_out, write_hinv_csv(h.t, sizes), &meta);
            return 0;
        }
        if (growth_cmd->parsed()) {
            if (!growth_seed_set)
                throw ValidationError("cnf-growth: --seed is required");
            std::vector<unsigned> ns;
            std::stringstream ss(growth_ns);
            std::string tokenbuf;
            while (std::getline(ss, tokenbuf, ',')) {
                if (tokenbuf.empty()) continue;
                char* end = nullptr;
                unsigned long v = std::strtoul(tokenbuf.c_str(), &end, 10);
                if (end == tokenbuf.c_str() || *end != '\0' || v == 0)
                    throw ValidationError("cnf-growth: bad length list entry: " + tokenbuf);
                ns.push_back(static_cast<unsigned>(v));
            }
            if (ns.empty()) throw ValidationError("cnf-growth: empty length list");
            std::vector<GrowthRow> rows = clause_growth_report(growth_seed, ns, force);
            RunMetadata meta;
            meta.command = "experiment cnf-growth";
            meta.n = ns.back();
            meta.seed = growth_seed;
            meta.extra["ns"] = growth_ns;
            emit_output(x_out, write_growth_csv(rows), &meta);
            return 0;
        }
    }

    if (f_cmd->parsed()) {
        TauInstance tau = f_src.resolve();
        Circuit circuit = build_circuit(tau, force);
        CnfFormula formula = tseitin(circuit);
        if (!f_y.empty()) fix_output(formula, tau.n, parse_value(f_y, "cnf: y"));
        emit_output(f_out, emit_dimacs(formula, tau.n, tau.seed), nullptr);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const GuardError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
}
