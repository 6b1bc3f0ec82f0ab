//==============================================================================
// config.hpp
// Flat `key = value` run configuration and the run manifest. Unknown keys and
// duplicates are hard errors. Manifests are config files whose extra record
// lines (version, wall clock, per-file checksums) are '#' comments, so any
// manifest can be fed back in as --config to replay its run.
//==============================================================================
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "shpattern/errors.hpp"
#include "shpattern/io.hpp"
#include "shpattern/spectral.hpp"

namespace shpattern {

inline constexpr const char* kVersion = "shpattern 1.0.0";

struct RunConfig {
    std::string experiment = "compare";  // simulate-gl|simulate-sh|convert|compare|ou-stats
    double L = kPi / 2;
    double eps = 0.25;
    int n_x = 100;
    int n_y = 100;
    double delta_T = 1e-4;
    double delta_t = 1e-3;  // auto-adjusted downward in shared-noise compare runs
    int m_R = 10;
    int m_I = 10;
    std::uint64_t seed = 1;
    bool noise = true;
    std::vector<double> snapshots = {0.0, 0.1, 0.2};  // natural clock of the experiment
    std::string mode = "direct";                      // simulate-sh: direct|shifted
    double noise_amplitude = 1.0;
    int replicas = 10000;     // ou-stats sample size
    std::string a_real_path;  // convert inputs
    std::string a_imag_path;
    std::string out = "out";
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long r = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(r);
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for " + key + ": '" + v + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const std::uint64_t r = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("config: bad unsigned value for " + key + ": '" + v + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError("config: bad boolean value for " + key + ": '" + v + "'");
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    return out;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not 'key = value'");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string val = detail::trim(t.substr(eq + 1));
        if (!seen.insert(key).second)
            throw ConfigError("config: duplicate key '" + key + "'");
        if (key == "experiment")
            cfg.experiment = val;
        else if (key == "L")
            cfg.L = detail::parse_double(key, val);
        else if (key == "eps")
            cfg.eps = detail::parse_double(key, val);
        else if (key == "n_x")
            cfg.n_x = detail::parse_int(key, val);
        else if (key == "n_y")
            cfg.n_y = detail::parse_int(key, val);
        else if (key == "delta_T")
            cfg.delta_T = detail::parse_double(key, val);
        else if (key == "delta_t")
            cfg.delta_t = detail::parse_double(key, val);
        else if (key == "m_R")
            cfg.m_R = detail::parse_int(key, val);
        else if (key == "m_I")
            cfg.m_I = detail::parse_int(key, val);
        else if (key == "seed")
            cfg.seed = detail::parse_u64(key, val);
        else if (key == "noise")
            cfg.noise = detail::parse_bool(key, val);
        else if (key == "snapshots")
            cfg.snapshots = detail::parse_double_list(key, val);
        else if (key == "mode")
            cfg.mode = val;
        else if (key == "noise_amplitude")
            cfg.noise_amplitude = detail::parse_double(key, val);
        else if (key == "replicas")
            cfg.replicas = detail::parse_int(key, val);
        else if (key == "a_real_path")
            cfg.a_real_path = val;
        else if (key == "a_imag_path")
            cfg.a_imag_path = val;
        else if (key == "out")
            cfg.out = val;
        else
            throw ConfigError("config: unknown key '" + key + "'");
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "experiment = " << cfg.experiment << "\n";
    out << "L = " << format_full(cfg.L) << "\n";
    out << "eps = " << format_full(cfg.eps) << "\n";
    out << "n_x = " << cfg.n_x << "\n";
    out << "n_y = " << cfg.n_y << "\n";
    out << "delta_T = " << format_full(cfg.delta_T) << "\n";
    out << "delta_t = " << format_full(cfg.delta_t) << "\n";
    out << "m_R = " << cfg.m_R << "\n";
    out << "m_I = " << cfg.m_I << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "noise = " << (cfg.noise ? "on" : "off") << "\n";
    out << "snapshots = ";
    for (std::size_t i = 0; i < cfg.snapshots.size(); ++i)
        out << (i ? "," : "") << format_full(cfg.snapshots[i]);
    out << "\n";
    out << "mode = " << cfg.mode << "\n";
    out << "noise_amplitude = " << format_full(cfg.noise_amplitude) << "\n";
    out << "replicas = " << cfg.replicas << "\n";
    if (!cfg.a_real_path.empty()) out << "a_real_path = " << cfg.a_real_path << "\n";
    if (!cfg.a_imag_path.empty()) out << "a_imag_path = " << cfg.a_imag_path << "\n";
    out << "out = " << cfg.out << "\n";
    return out.str();
}

struct RunManifest {
    RunConfig config;
    std::vector<std::string> notes;                 // free-form '#' records
    std::map<std::string, std::uint64_t> checksums;  // file name -> FNV-1a 64
};

struct ManifestData {
    bool complete = false;
    std::vector<std::string> notes;  // every '#' record except status/checksum lines
    std::map<std::string, std::uint64_t> checksums;
    RunConfig config;
};

// Manifests parse back into their config (comment records skipped) plus the
// structured status and checksum lines; used by replay verification.
inline ManifestData read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_manifest: cannot open " + path.string());
    ManifestData md;
    std::ostringstream config_text;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = detail::trim(line);
        if (!t.empty() && t[0] == '#') {
            const std::string body = detail::trim(t.substr(1));
            if (body == "status=complete") {
                md.complete = true;
            } else if (body == "status=running") {
                md.complete = false;
            } else if (body.rfind("checksum ", 0) == 0) {
                std::istringstream ss(body.substr(9));
                std::string name, sum;
                ss >> name >> sum;
                if (name.empty() || sum.rfind("fnv1a64:", 0) != 0)
                    throw IoError("read_manifest: bad checksum record '" + body + "'");
                md.checksums[name] = std::stoull(sum.substr(8), nullptr, 16);
            } else {
                md.notes.push_back(body);
            }
        } else {
            config_text << line << "\n";
        }
    }
    md.config = parse_config(config_text.str());
    return md;
}

// The manifest is written once before any field data (status running) and
// rewritten at the end with checksums (status complete).
inline void write_manifest(const std::filesystem::path& path, const RunManifest& m,
                           bool complete) {
    std::ofstream out(path);
    if (!out) throw IoError("write_manifest: cannot open " + path.string());
    out << "# " << kVersion << "\n";
    out << "# status=" << (complete ? "complete" : "running") << "\n";
    for (const std::string& n : m.notes) out << "# " << n << "\n";
    for (const auto& [name, sum] : m.checksums) {
        char hex[32];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(sum));
        out << "# checksum " << name << " fnv1a64:" << hex << "\n";
    }
    out << serialize_config(m.config);
    if (!out) throw IoError("write_manifest: write failed for " + path.string());
}

}  // namespace shpattern
