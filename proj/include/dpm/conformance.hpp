#pragma once

// Conformance checking: does every trace satisfy every constraint?

#include "dpm/automaton.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dpm {

struct ConformanceReport
{
    std::vector< std::string > trace_ids;       // one per row, the trace id or its 1-based ordinal
    std::vector< std::vector< bool > > verdicts; // verdicts[trace][constraint]

    [[nodiscard]] bool trace_conforms( std::size_t trace ) const;
    [[nodiscard]] bool conforms() const;
    [[nodiscard]] std::size_t num_conforming() const;
};

/// Constraints compiled once, reusable across traces and threads.
class ConformanceChecker
{
public:
    /// UsageError when a constraint carries activity variables.
    ConformanceChecker( const ProcessVocabulary& vocabulary, std::vector< Formula > constraints );

    [[nodiscard]] const std::vector< Formula >& constraints() const { return _constraints; }
    [[nodiscard]] const std::vector< Automaton >& automata() const { return _automata; }

    /// One verdict per constraint. ModelError when the trace does not validate.
    [[nodiscard]] std::vector< bool > check( const Trace& trace ) const;
    /// Rows in log order; `jobs` > 1 evaluates rows concurrently.
    [[nodiscard]] ConformanceReport check( const Log& log, unsigned jobs = 1 ) const;

private:
    const ProcessVocabulary& _vocabulary;
    std::vector< Formula > _constraints;
    std::vector< Automaton > _automata;
};

std::vector< bool > check_trace( const ProcessVocabulary& vocabulary, const Trace& trace,
                                 const std::vector< Formula >& constraints );

ConformanceReport check_log( const ProcessVocabulary& vocabulary, const Log& log,
                             const std::vector< Formula >& constraints, unsigned jobs = 1 );

/// The trace's id, or its 1-based position in the log.
std::string trace_label( const Trace& trace, std::size_t index );

/// Runs body(i) for i in [0, count) on up to `jobs` threads.
void parallel_for( std::size_t count, unsigned jobs, const std::function< void( std::size_t ) >& body );

} // namespace dpm
