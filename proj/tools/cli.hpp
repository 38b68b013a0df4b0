#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

namespace ptwalk::cli {

//! Entry point shared by the executable and the tests. Returns the process
//! exit code; usage and runtime errors are reported on `err`, never thrown.
int
run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

//! Non-negative integer from "500000", "5e5" or "1.5e6"; InputError otherwise.
std::size_t
parse_count(const std::string& text, const std::string& what);

} // namespace ptwalk::cli
