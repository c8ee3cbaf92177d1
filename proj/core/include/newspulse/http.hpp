#pragma once

#include <string>

namespace newspulse {

struct FetchResult {
    bool transport_ok = false; // a response arrived (any status)
    int status = 0;
    std::string body;
    std::string content_type;
    std::string error; // transport error description when !transport_ok
};

struct FetchOptions {
    int timeout_sec = 20;
    std::string user_agent = "newspulse/0.1 (+local news monitor)";
    bool follow_redirects = true;
};

// Single HTTP(S) GET attempt; retry scheduling is the crawler's job.
FetchResult http_get_once(const std::string& url, const FetchOptions& options = {});

// "text/html; charset=ISO-8859-1" -> "iso-8859-1" (empty if absent).
std::string charset_from_content_type(const std::string& content_type);

} // namespace newspulse
