#include "taulab/reports.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "taulab/errors.hpp"
#include "taulab/version.hpp"

namespace taulab {
namespace {

using nlohmann::json;

std::string hex_value(std::uint64_t y, unsigned n) {
    unsigned digits = (n + 3) / 4;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%0*llx", static_cast<int>(digits),
                  static_cast<unsigned long long>(y));
    return buf;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string write_census_csv(const PreimageReport& report) {
    std::string out = "y_hex,count\n";
    for (std::uint64_t y = 0; y < report.domain_size(); ++y) {
        if (report.counts[y] == 0) continue;
        out += hex_value(y, report.n);
        out += ',';
        out += std::to_string(report.counts[y]);
        out += '\n';
    }
    return out;
}

std::string write_bits_csv(const PreimageReport& report) {
    std::string out = "i,freq0,freq1,claimed_rate,null_model\n";
    const std::string claim =
        format_double(std::pow(8.0, -static_cast<double>(report.n)));
    for (unsigned i = 1; i <= report.n; ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(bit_event_probability(report, i, 0));
        out += ',';
        out += format_double(bit_event_probability(report, i, 1));
        out += ',';
        out += claim;
        out += ",0.5\n";
    }
    return out;
}

std::string write_conditional_csv(const PreimageReport& report) {
    std::string out = "i,j,vi,vj,cond_freq,uncond_freq\n";
    for (unsigned i = 1; i <= report.n; ++i) {
        for (unsigned j = 1; j <= report.n; ++j) {
            if (i == j) continue;
            for (unsigned vi = 0; vi <= 1; ++vi) {
                for (unsigned vj = 0; vj <= 1; ++vj) {
                    out += std::to_string(i) + ',' + std::to_string(j) + ',' +
                           std::to_string(vi) + ',' + std::to_string(vj) + ',';
                    auto cond = conditional_bit_probability(report, i, j, vi, vj);
                    out += cond ? format_double(*cond) : std::string("NA");
                    out += ',';
                    out += format_double(bit_event_probability(report, i, vi));
                    out += '\n';
                }
            }
        }
    }
    return out;
}

std::string write_irreducible_csv(const IrreducibleReport& report) {
    std::string out = "n,k,size,bound,holds\n";
    out += std::to_string(report.n) + ',' + std::to_string(report.k) + ',' +
           std::to_string(report.size) + ',' + format_double(report.bound) + ',' +
           (report.holds ? "true" : "false") + '\n';
    return out;
}

std::string write_hinv_csv(std::uint64_t t, const std::vector<std::uint64_t>& sizes) {
    if (sizes.size() != t)
        throw ValidationError("hash preimage table: one row per residue required");
    std::string out = "m,size\n";
    for (std::uint64_t m = 0; m < t; ++m) {
        out += std::to_string(m);
        out += ',';
        out += std::to_string(sizes[m]);
        out += '\n';
    }
    return out;
}

std::string write_growth_csv(const std::vector<GrowthRow>& rows) {
    std::string out = "n,vars,clauses\n";
    for (const GrowthRow& row : rows) {
        out += std::to_string(row.n) + ',' + std::to_string(row.vars) + ',' +
               std::to_string(row.clauses) + '\n';
    }
    return out;
}

std::string invert_report_json(const RandomizedInvertReport& report, unsigned n) {
    json j;
    j["n"] = n;
    j["budget"] = report.budget;
    j["hits"] = report.hits;
    j["success_rate"] = report.success_rate;
    j["single_trial_claim"] = report.single_trial_claim;
    if (report.witness)
        j["witness"] = report.witness->get_str();
    else
        j["witness"] = nullptr;
    if (report.census_rate)
        j["census_rate"] = *report.census_rate;
    else
        j["census_rate"] = nullptr;
    json env = json::array();
    for (const auto& [c, value] : report.envelopes) {
        json row;
        row["c"] = c;
        row["value"] = value;
        env.push_back(std::move(row));
    }
    j["envelopes"] = std::move(env);
    return j.dump(2) + "\n";
}

std::string metadata_json(const RunMetadata& meta) {
    json j;
    j["artifact_version"] = kArtifactVersion;
    j["format"] = kFormatVersion;
    j["command"] = meta.command;
    j["n"] = meta.n;
    if (meta.seed)
        j["seed"] = std::to_string(*meta.seed);
    else
        j["seed"] = nullptr;
    if (meta.prime_width)
        j["prime_width"] = *meta.prime_width;
    else
        j["prime_width"] = nullptr;
    json extra = json::object();
    for (const auto& [key, value] : meta.extra) extra[key] = value;
    j["parameters"] = std::move(extra);
    return j.dump(2) + "\n";
}

}  // namespace taulab
