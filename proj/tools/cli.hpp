#pragma once

namespace newspulse::cli {

// Entry point behind the newspulse binary. Returns the process exit
// code: 0 success, 1 usage error, 2 data error.
int run(int argc, const char* const* argv);

} // namespace newspulse::cli
