#include "newspulse/http.hpp"

#include <algorithm>
#include <cctype>

// CPPHTTPLIB_OPENSSL_SUPPORT comes from the build when OpenSSL is
// available (NEWSPULSE_WITH_TLS).
#include <httplib.h>

#include "newspulse/url.hpp"

namespace newspulse {

FetchResult http_get_once(const std::string& url, const FetchOptions& options) {
    FetchResult result;
    auto parts = parse_url(url);
    if (!parts) {
        result.error = "unparseable URL: " + url;
        return result;
    }
    if (parts->scheme != "http" && parts->scheme != "https") {
        result.error = "unsupported scheme '" + parts->scheme + "'";
        return result;
    }
#ifndef NEWSPULSE_WITH_TLS
    if (parts->scheme == "https") {
        result.error = "built without TLS support";
        return result;
    }
#endif

    std::string origin = parts->scheme + "://" + parts->netloc();
    httplib::Client client(origin);
    client.set_connection_timeout(options.timeout_sec, 0);
    client.set_read_timeout(options.timeout_sec, 0);
    client.set_follow_location(options.follow_redirects);
    httplib::Headers headers = {{"User-Agent", options.user_agent}};

    std::string path = parts->path;
    if (!parts->query.empty()) path += "?" + parts->query;

    auto response = client.Get(path, headers);
    if (!response) {
        result.error = httplib::to_string(response.error());
        return result;
    }
    result.transport_ok = true;
    result.status = response->status;
    result.body = response->body;
    result.content_type = response->get_header_value("Content-Type");
    return result;
}

std::string charset_from_content_type(const std::string& content_type) {
    std::string lower(content_type);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    size_t pos = lower.find("charset=");
    if (pos == std::string::npos) return {};
    size_t start = pos + 8;
    size_t end = start;
    while (end < lower.size() && lower[end] != ';' && !std::isspace((unsigned char)lower[end]) &&
           lower[end] != '"')
        ++end;
    if (start < lower.size() && lower[start] == '"') {
        ++start;
        end = lower.find('"', start);
        if (end == std::string::npos) end = lower.size();
    }
    return lower.substr(start, end - start);
}

} // namespace newspulse
