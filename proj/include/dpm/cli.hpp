#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dpm::cli {

enum ExitCode
{
    Success = 0,
    Negative = 1, // non-conforming log, infeasible generation, empty query result
    Failure = 2   // usage or input error
};

/// Runs the command line `args` (without the program name).
int run( const std::vector< std::string >& args, std::ostream& out, std::ostream& err );
int run( int argc, const char* const* argv );

} // namespace dpm::cli
