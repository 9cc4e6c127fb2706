// Entry point of the ddsim command-line tool
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.

#pragma once

#include <iosfwd>

namespace ddsim {

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace ddsim
