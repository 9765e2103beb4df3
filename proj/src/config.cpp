#include "fbmtp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

extern char** environ;

namespace fbmtp {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string upper_key(const std::string& key) {
    std::string out = "FBMTP_";
    for (char c : key)
        out += (c == '-' || c == '.') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

Config Config::from_file(const std::string& path) {
    Config cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + " is not key=value: " + t);
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.values_[key] = val;
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

void Config::apply_env() {
    // collect existing keys plus any FBMTP_* variables for fresh keys
    for (char** e = environ; e && *e; ++e) {
        const std::string entry = *e;
        if (entry.rfind("FBMTP_", 0) != 0) continue;
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string key = entry.substr(6, eq - 6);
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        values_[key] = entry.substr(eq + 1);
    }
    // exact-case overrides for keys already present
    for (auto& [key, val] : values_) {
        if (const char* env = std::getenv(upper_key(key).c_str())) val = env;
    }
}

std::string Config::raw(const std::string& key, bool& found) {
    auto it = values_.find(key);
    consumed_.insert(key);
    if (it == values_.end()) {
        found = false;
        return {};
    }
    found = true;
    return it->second;
}

double Config::get_double(const std::string& key, double def) {
    bool found;
    const std::string v = raw(key, found);
    if (!found) return def;
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: " + v);
    }
}

int Config::get_int(const std::string& key, int def) {
    bool found;
    const std::string v = raw(key, found);
    if (!found) return def;
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not an integer: " + v);
    }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t def) {
    bool found;
    const std::string v = raw(key, found);
    if (!found) return def;
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not an unsigned integer: " + v);
    }
}

bool Config::get_bool(const std::string& key, bool def) {
    bool found;
    std::string v = raw(key, found);
    if (!found) return def;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "': not a boolean: " + v);
}

std::string Config::get_string(const std::string& key, const std::string& def) {
    bool found;
    const std::string v = raw(key, found);
    return found ? v : def;
}

std::vector<int> Config::get_int_list(const std::string& key, const std::vector<int>& def) {
    bool found;
    const std::string v = raw(key, found);
    if (!found) return def;
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': bad integer list entry: " + item);
        }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::vector<double> Config::get_double_list(const std::string& key, const std::vector<double>& def) {
    bool found;
    const std::string v = raw(key, found);
    if (!found) return def;
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': bad number list entry: " + item);
        }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

void Config::finish() const {
    std::string unknown;
    for (const auto& [key, val] : values_) {
        if (!consumed_.count(key)) {
            if (!unknown.empty()) unknown += ", ";
            unknown += key;
        }
    }
    if (!unknown.empty()) throw ConfigError("unknown config keys: " + unknown);
}

} // namespace fbmtp
