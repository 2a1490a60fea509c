#pragma once

// Answer set programs for the three problems, in clingo-compatible syntax,
// plus a small syntax checker and a runner for an external solver.

#include "dpm/automaton.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace dpm {

enum class AspProblem
{
    Generation,
    Conformance,
    Query
};

std::string_view to_string( AspProblem problem ); // "generation", "conformance", "query"

struct AspProgram
{
    AspProblem problem = AspProblem::Generation;
    std::vector< std::string > statements; // facts, rules and comments, in order

    /// One statement per line.
    [[nodiscard]] std::string text() const;
};

/// An activity, attribute or enumeration value as an ASP constant: bare when it
/// is a lowercase identifier, a quoted string otherwise.
std::string asp_constant( std::string_view name );

/// `init`, `acc`, `trans` and `hold` for one automaton, its index as the
/// first argument. In multi-trace form `hold` carries the trace as third argument.
/// UsageError when an attribute has different types on different activities.
std::vector< std::string > emit_automaton( const Automaton& automaton, const ProcessVocabulary& vocabulary,
                                           bool multi_trace = false );

/// The `state` rules and the acceptance constraint.
std::vector< std::string > emit_run_rules( bool multi_trace = false );

/// UsageError when t < 1 or a constraint has variables.
AspProgram emit_generation( const ProcessVocabulary& vocabulary, const std::vector< Formula >& constraints,
                            std::size_t trace_length );
/// Satisfiable iff every trace satisfies every constraint.
AspProgram emit_conformance( const ProcessVocabulary& vocabulary, const std::vector< Formula >& constraints,
                             const Log& log );
/// Answer sets are exactly the solutions of the query on the log. UsageError on an empty log.
AspProgram emit_query( const ProcessVocabulary& vocabulary, const Formula& query, const Log& log );

/// Problems found by a minimal syntax and safety check; empty when the program looks well formed.
std::vector< std::string > validate_asp( std::string_view program );

struct SolverOutcome
{
    bool satisfiable = false;
    std::vector< std::vector< std::string > > models; // shown atoms per answer set
};

/// Runs `command -n 0 <file>` through the shell. IoError when the solver
/// cannot be run or its output has no verdict.
SolverOutcome run_solver( const std::string& command, const AspProgram& program );

/// Traces read from the `trace/2` and `has_val/3` atoms of generation answer sets.
std::vector< Trace > decode_traces( const SolverOutcome& outcome, const ProcessVocabulary& vocabulary );
/// Assignments read from the `assgnmt/2` atoms of query answer sets, sorted.
std::vector< Assignment > decode_assignments( const SolverOutcome& outcome );

} // namespace dpm
