#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace newspulse {

struct UrlParts {
    std::string scheme;   // lowercase
    std::string host;     // lowercase
    int port = 0;         // 0 = default for scheme
    std::string path;     // starts with '/', may be "/"
    std::string query;    // without '?', may be empty
    std::string fragment; // without '#', may be empty

    // "host" or "host:port" when the port is explicit.
    std::string netloc() const;
};

std::optional<UrlParts> parse_url(std::string_view url);

// Canonical form used for dedup: scheme and host lowercased, default
// ports dropped, fragment dropped, utm_* query parameters removed.
std::string canonical_url(std::string_view url);

// Resolves `ref` against `base` when ref is relative; absolute refs pass
// through unchanged. Returns nullopt when no absolute URL can be formed.
std::optional<std::string> resolve_url(std::string_view base, std::string_view ref);

} // namespace newspulse
