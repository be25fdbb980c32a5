#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taulab/cnf.hpp"
#include "taulab/inversion.hpp"

namespace taulab {

// All writers produce byte-stable text: fixed headers, fixed row order,
// doubles through one shortest-round-trip format, no timestamps.

std::string format_double(double v);

// Rows are the image values (count > 0) in ascending order, y rendered as
// ceil(n/4) lowercase hex digits.
std::string write_census_csv(const PreimageReport& report);

// Per output bit: observed frequencies against the single-trial inversion
// claim (1/8)^n and the fair-coin null model.
std::string write_bits_csv(const PreimageReport& report);

// Every ordered index pair and value combination; cond_freq is NA when no
// input realizes the conditioning event.
std::string write_conditional_csv(const PreimageReport& report);

std::string write_irreducible_csv(const IrreducibleReport& report);

// sizes[m] = number of preimages of m; one row per residue.
std::string write_hinv_csv(std::uint64_t t, const std::vector<std::uint64_t>& sizes);

std::string write_growth_csv(const std::vector<GrowthRow>& rows);

std::string invert_report_json(const RandomizedInvertReport& report, unsigned n);

// Sidecar describing how an output file was produced.
struct RunMetadata {
    std::string command;
    unsigned n = 0;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> prime_width;
    std::map<std::string, std::string> extra;
};

std::string metadata_json(const RunMetadata& meta);

}  // namespace taulab
