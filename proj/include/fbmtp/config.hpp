#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbmtp {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat key=value configuration: file, then FBMTP_* environment overrides,
// then command-line overrides. Typed getters consume keys; finish() rejects
// anything left over so misspelled keys never pass silently.
class Config {
public:
    Config() = default;
    static Config from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    // Applies FBMTP_<KEY> environment overrides (case-insensitive key match).
    void apply_env();
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    double get_double(const std::string& key, double def);
    int get_int(const std::string& key, int def);
    std::uint64_t get_u64(const std::string& key, std::uint64_t def);
    bool get_bool(const std::string& key, bool def);
    std::string get_string(const std::string& key, const std::string& def);
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& def);
    std::vector<double> get_double_list(const std::string& key, const std::vector<double>& def);

    // Throws ConfigError naming any unconsumed (unknown) keys.
    void finish() const;

private:
    std::string raw(const std::string& key, bool& found);
    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
};

} // namespace fbmtp
