#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aecrit/criterion.hpp"
#include "aecrit/errors.hpp"
#include "aecrit/numeric.hpp"
#include "aecrit/version.hpp"

namespace aecrit {

using json = nlohmann::ordered_json;

/// n,m,value,std_err rows for a window table.
inline std::string window_table_csv(const CriticalWindowTable& table) {
    std::string out = "n,m,value,std_err\n";
    for (std::size_t i = 0; i < table.n_grid.size(); ++i) {
        for (std::size_t j = 0; j < table.values[i].size(); ++j) {
            long m = table.n_grid[i] + 1 + static_cast<long>(j);
            out += std::to_string(table.n_grid[i]);
            out += ',';
            out += std::to_string(m);
            out += ',';
            out += format_double(table.values[i][j]);
            out += ',';
            out += format_double(table.std_errors[i][j]);
            out += '\n';
        }
    }
    return out;
}

inline std::string tail_profile_csv(const std::vector<TailPoint>& profile) {
    std::string out = "n,S,std_err\n";
    for (const auto& p : profile) {
        out += std::to_string(p.n);
        out += ',';
        out += format_double(p.value);
        out += ',';
        out += format_double(p.std_err);
        out += '\n';
    }
    return out;
}

inline std::string pair_table_csv(const PairTable& table) {
    std::string out = "n,m,value,std_err\n";
    for (std::size_t i = 0; i < table.pairs.size(); ++i) {
        out += std::to_string(table.pairs[i].first);
        out += ',';
        out += std::to_string(table.pairs[i].second);
        out += ',';
        out += format_double(table.values[i]);
        out += ',';
        out += format_double(table.std_errors[i]);
        out += '\n';
    }
    return out;
}

/// Write-then-rename so readers never observe a partial report.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) raise(Errc::IoError, "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) raise(Errc::IoError, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) raise(Errc::IoError, "rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

inline json tool_header_json() {
    json j;
    j["name"] = kToolName;
    j["version"] = kToolVersion;
    return j;
}

inline json thresholds_json(const VerdictThresholds& th) {
    json j;
    j["eps_pass"] = th.eps_pass;
    j["eps_fail"] = th.eps_fail;
    j["plateau_rel_change"] = th.plateau_rel_change;
    j["mc_margin_std_errors"] = th.mc_margin_sigmas;
    return j;
}

inline json tail_profile_json(const std::vector<TailPoint>& profile) {
    json arr = json::array();
    for (const auto& p : profile) {
        json row;
        row["n"] = p.n;
        row["S"] = p.value;
        row["std_err"] = p.std_err;
        arr.push_back(std::move(row));
    }
    return arr;
}

inline json verdict_json(const ConvergenceVerdict& v) {
    json j;
    j["verdict"] = verdict_name(v.verdict);
    j["thresholds"] = thresholds_json(v.thresholds);
    j["tail_profile"] = tail_profile_json(v.tail_profile);
    j["warnings"] = v.warnings;
    j["caveat"] = v.caveat;
    return j;
}

}  // namespace aecrit
