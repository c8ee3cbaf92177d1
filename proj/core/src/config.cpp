#include "newspulse/config.hpp"

#include <cstdlib>
#include <filesystem>

#include "newspulse/csv.hpp"
#include "newspulse/errors.hpp"

namespace newspulse {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

} // namespace

Config Config::load(const std::string& path) {
    try {
        return from_string(read_file(path));
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::string section;
    size_t pos = 0, line_no = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string line = trim(text.substr(pos, (nl == std::string::npos ? text.size() : nl) - pos));
        ++line_no;
        if (nl == std::string::npos) pos = text.size() + 1;
        else pos = nl + 1;

        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = unquote(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    auto it = s->second.find(key);
    return it == s->second.end() ? fallback : it->second;
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
    std::string v = get(section, key);
    if (v.empty()) return fallback;
    try {
        return std::stol(v);
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": expected an integer, got '" + v + "'");
    }
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
    std::string v = get(section, key);
    if (v.empty()) return fallback;
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": expected a number, got '" + v + "'");
    }
}

std::vector<std::string> Config::get_list(const std::string& section, const std::string& key) const {
    std::vector<std::string> out;
    std::string v = get(section, key);
    size_t pos = 0;
    while (pos <= v.size()) {
        size_t comma = v.find(',', pos);
        std::string item = trim(v.substr(pos, (comma == std::string::npos ? v.size() : comma) - pos));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string Config::path(const std::string& key, const std::string& fallback) const {
    if (key == "store") {
        const char* env = std::getenv("NEWSPULSE_STORE");
        if (env && *env) return env;
    }
    return get("paths", key, fallback);
}

void Config::require_paths(const std::vector<std::string>& keys) const {
    for (const auto& key : keys) {
        std::string value = path(key);
        if (value.empty()) throw ConfigError("[paths] " + key + " is required but not set");
        if (!std::filesystem::exists(value))
            throw ConfigError("[paths] " + key + " = " + value + " does not exist");
    }
}

} // namespace newspulse
