#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ltc::cli
{

// Runs one invocation; args excludes the program name. Returns the exit code:
// 0 ok, 1 negative answer, 2 usage or input error.
int run( const std::vector< std::string >& args, std::ostream& out, std::ostream& err, std::istream& in );

} // namespace ltc::cli
