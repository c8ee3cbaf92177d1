#pragma once

#include <string>
#include <string_view>

namespace newspulse {

// Decodes raw page bytes to UTF-8. Precedence: the transport-level charset
// hint (HTTP Content-Type), then a charset declared in a <meta> tag, then
// UTF-8 with invalid sequences replaced by U+FFFD. Understands utf-8,
// iso-8859-1, windows-1252 and us-ascii; anything else falls back to the
// lossy UTF-8 path.
std::string decode_to_utf8(std::string_view bytes, std::string_view charset_hint = {});

// Charset from a <meta charset=...> or http-equiv Content-Type tag, lowercased;
// empty if none is declared.
std::string detect_meta_charset(std::string_view html);

// Replaces ill-formed UTF-8 sequences with U+FFFD.
std::string utf8_lossy(std::string_view bytes);

bool is_valid_utf8(std::string_view bytes);

} // namespace newspulse
