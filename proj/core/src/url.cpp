#include "newspulse/url.hpp"

#include <algorithm>
#include <cctype>

namespace newspulse {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return out;
}

int default_port(std::string_view scheme) {
    if (scheme == "http") return 80;
    if (scheme == "https") return 443;
    return 0;
}

} // namespace

std::string UrlParts::netloc() const {
    if (port == 0 || port == default_port(scheme)) return host;
    return host + ":" + std::to_string(port);
}

std::optional<UrlParts> parse_url(std::string_view url) {
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
    UrlParts parts;
    parts.scheme = lower(url.substr(0, scheme_end));
    for (char c : parts.scheme)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
            return std::nullopt;

    size_t rest = scheme_end + 3;
    size_t authority_end = url.find_first_of("/?#", rest);
    std::string_view authority =
        url.substr(rest, (authority_end == std::string_view::npos ? url.size() : authority_end) - rest);
    if (authority.empty()) return std::nullopt;

    size_t colon = authority.rfind(':');
    if (colon != std::string_view::npos &&
        authority.find_first_not_of("0123456789", colon + 1) == std::string_view::npos &&
        colon + 1 < authority.size()) {
        parts.host = lower(authority.substr(0, colon));
        parts.port = std::stoi(std::string(authority.substr(colon + 1)));
    } else {
        parts.host = lower(authority);
    }
    if (parts.host.empty()) return std::nullopt;

    if (authority_end == std::string_view::npos) {
        parts.path = "/";
        return parts;
    }

    std::string_view tail = url.substr(authority_end);
    size_t frag = tail.find('#');
    if (frag != std::string_view::npos) {
        parts.fragment = std::string(tail.substr(frag + 1));
        tail = tail.substr(0, frag);
    }
    size_t q = tail.find('?');
    if (q != std::string_view::npos) {
        parts.query = std::string(tail.substr(q + 1));
        tail = tail.substr(0, q);
    }
    parts.path = tail.empty() ? "/" : std::string(tail);
    return parts;
}

std::string canonical_url(std::string_view url) {
    auto parts = parse_url(url);
    if (!parts) return std::string(url);

    std::string out = parts->scheme + "://" + parts->host;
    if (parts->port != 0 && parts->port != default_port(parts->scheme))
        out += ":" + std::to_string(parts->port);
    out += parts->path;

    if (!parts->query.empty()) {
        std::string kept;
        std::string_view query = parts->query;
        size_t pos = 0;
        while (pos <= query.size()) {
            size_t amp = query.find('&', pos);
            std::string_view param = query.substr(pos, (amp == std::string_view::npos ? query.size() : amp) - pos);
            std::string_view key = param.substr(0, param.find('='));
            std::string key_lower = lower(key);
            if (!param.empty() && key_lower.rfind("utm_", 0) != 0) {
                if (!kept.empty()) kept.push_back('&');
                kept += std::string(param);
            }
            if (amp == std::string_view::npos) break;
            pos = amp + 1;
        }
        if (!kept.empty()) out += "?" + kept;
    }
    return out;
}

std::optional<std::string> resolve_url(std::string_view base, std::string_view ref) {
    if (ref.empty()) return std::nullopt;
    if (ref.find("://") != std::string_view::npos) return std::string(ref);

    auto b = parse_url(base);
    if (!b) return std::nullopt;
    std::string origin = b->scheme + "://" + b->netloc();

    if (ref.rfind("//", 0) == 0) return b->scheme + ":" + std::string(ref);
    if (ref[0] == '/') return origin + std::string(ref);

    // Relative path: resolve against the base path's directory.
    std::string dir = b->path.substr(0, b->path.rfind('/') + 1);
    return origin + dir + std::string(ref);
}

} // namespace newspulse
