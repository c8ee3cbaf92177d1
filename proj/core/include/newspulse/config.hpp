#pragma once

#include <map>
#include <string>
#include <vector>

namespace newspulse {

// INI-style configuration: [section] headers, key = value lines, '#'
// and ';' comments. Values keep everything after '=' trimmed; optional
// surrounding quotes are stripped.
class Config {
public:
    static Config load(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback = {}) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    // Comma-separated list.
    std::vector<std::string> get_list(const std::string& section, const std::string& key) const;

    // Throws ConfigError when any of the given [paths] keys is missing
    // or does not exist on disk.
    void require_paths(const std::vector<std::string>& keys) const;

    // [paths] value with the NEWSPULSE_STORE override applied for "store".
    std::string path(const std::string& key, const std::string& fallback = {}) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

} // namespace newspulse
