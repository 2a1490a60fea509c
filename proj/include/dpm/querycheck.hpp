#pragma once

// Query checking: the assignments of activities to the variables of a formula
// under which every trace of a log satisfies it.

#include "dpm/automaton.hpp"

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace dpm {

struct QueryOptions
{
    unsigned jobs = 1;
    /// Count satisfied traces for every candidate assignment (disables early exit).
    bool diagnostics = false;
};

struct QueryResult
{
    Formula query;
    std::vector< std::string > variables;  // sorted
    std::vector< Assignment > assignments; // solutions, in enumeration order
    /// With diagnostics: every candidate and the number of traces it satisfies.
    std::vector< std::pair< Assignment, std::size_t > > support;
};

/// All |Act|^|vars| total assignments, variables sorted by name, activities in
/// declaration order, lexicographic with the first variable most significant.
std::vector< Assignment > enumerate_assignments( const std::set< std::string >& variables,
                                                 const ProcessVocabulary& vocabulary );

/// UsageError on an empty log, ModelError on a trace that does not validate.
QueryResult query_check( const Log& log, const Formula& query, const ProcessVocabulary& vocabulary,
                         const QueryOptions& options = {} );

} // namespace dpm
