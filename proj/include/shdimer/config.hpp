#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shdimer/common.hpp"
#include "shdimer/components.hpp"
#include "shdimer/lattice.hpp"
#include "shdimer/limitshape.hpp"

namespace shdimer {

// Flat key/value config with [section] headers, '#' comments, and
// comma-separated lists for vector values.
class Config {
  public:
    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    static Config parse(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw std::runtime_error("config line " + std::to_string(lineno) +
                                             ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                cfg.sections_[section]; // create even if empty
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": expected key = value");
            std::string key = trim(line.substr(0, eq));
            std::string val = trim(line.substr(eq + 1));
            if (key.empty())
                throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
            cfg.sections_[section][key] = val;
        }
        return cfg;
    }

    bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
    bool has(const std::string& s, const std::string& k) const {
        auto it = sections_.find(s);
        return it != sections_.end() && it->second.count(k) > 0;
    }

    std::string get(const std::string& s, const std::string& k) const {
        auto it = sections_.find(s);
        if (it == sections_.end()) throw std::runtime_error("config: missing section [" + s + "]");
        auto kt = it->second.find(k);
        if (kt == it->second.end())
            throw std::runtime_error("config: missing key '" + k + "' in [" + s + "]");
        return kt->second;
    }

    std::string get_or(const std::string& s, const std::string& k, const std::string& dflt) const {
        return has(s, k) ? get(s, k) : dflt;
    }

    long long get_int(const std::string& s, const std::string& k) const {
        return std::stoll(get(s, k));
    }
    Rat get_rat(const std::string& s, const std::string& k) const { return parse_rat(get(s, k)); }

    std::vector<Rat> get_rat_list(const std::string& s, const std::string& k) const {
        std::vector<Rat> out;
        for (auto& item : split_list(get(s, k))) out.push_back(parse_rat(item));
        return out;
    }

    std::vector<long long> get_int_list(const std::string& s, const std::string& k) const {
        std::vector<long long> out;
        for (auto& item : split_list(get(s, k))) out.push_back(std::stoll(item));
        return out;
    }

    LatticeSpec lattice_spec() const {
        LatticeSpec spec;
        spec.n = static_cast<size_t>(get_int("lattice", "n"));
        for (long long v : get_int_list("lattice", "a")) spec.a.push_back(static_cast<int>(v));
        spec.x = get_rat_list("lattice", "x");
        spec.y = get_rat_list("lattice", "y");
        spec.N = static_cast<size_t>(get_int("lattice", "N"));
        spec.Omega = get_int_list("lattice", "omega");
        spec.validate();
        return spec;
    }

    BoundaryProfile boundary_profile() const {
        BoundaryProfile p;
        p.alpha = get_rat_list("profile", "alpha");
        p.b = get_rat_list("profile", "b");
        p.s = static_cast<int>(p.alpha.size());
        p.gamma = has("profile", "gamma") ? get_rat("profile", "gamma") : Rat(0);
        p.validate();
        return p;
    }

    WeightProfile weight_profile() const {
        WeightProfile w;
        w.n = static_cast<int>(get_int("weights", "n"));
        if (has("weights", "y")) w.yValues = get_rat_list("weights", "y");
        w.x = has("weights", "x") ? get_rat("weights", "x") : Rat(1);
        w.validate();
        return w;
    }

    BlockBoundary block_boundary() const {
        BlockBoundary b;
        b.blockFrac = get_rat_list("blocks", "fractions");
        b.mu = get_rat_list("blocks", "mu");
        b.s = static_cast<int>(b.blockFrac.size());
        b.validate();
        return b;
    }

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;

    static std::string trim(const std::string& s) {
        size_t a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        size_t b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

    static std::vector<std::string> split_list(const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        std::istringstream in(s);
        while (std::getline(in, cur, ',')) {
            cur = trim(cur);
            if (!cur.empty()) out.push_back(cur);
        }
        return out;
    }
};

} // namespace shdimer
