#pragma once

#include <string>
#include <string_view>

namespace newspulse {

// Porter's suffix-stripping algorithm (with the later logi->log
// amendment from the reference implementation). Input must already be
// lowercase ASCII; words of length <= 2 pass through unchanged.
std::string porter_stem(std::string_view word);

} // namespace newspulse
