#pragma once

#include <string>
#include <string_view>

namespace newspulse {

struct ExtractOptions {
    // Minimum total body length; below this the page is treated as
    // snippet-only or paywalled.
    size_t min_body_chars = 140;
};

// Extracts the main article body from an HTML page. The densest
// contiguous text region wins (largest text-to-tag ratio among block
// containers); navigation, script/style and other chrome are removed,
// paragraph breaks become single newlines, and identical duplicate
// blocks are emitted once.
//
// `charset_hint` is the transport-declared charset (may be empty).
// Throws EmptyBody when no region of at least min_body_chars remains.
std::string extract_text(std::string_view html_bytes, std::string_view charset_hint = {},
                         const ExtractOptions& options = {});

} // namespace newspulse
