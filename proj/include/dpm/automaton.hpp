#pragma once

// Finite-state automata over events whose transitions carry conjunctions of
// event literals, compiled from formulas by progression.

#include "dpm/formula.hpp"
#include "dpm/model.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dpm {

using StateId = std::uint32_t;

/// Sorted, duplicate-free set of states: the frontier of a subset simulation.
using StateSet = std::vector< StateId >;

struct Transition
{
    StateId source = 0;
    EventFormula guard;
    StateId target = 0;

    bool operator==( const Transition& ) const = default;
};

class Automaton
{
public:
    /// Throws UsageError when an endpoint or the initial state is out of range.
    /// `labels` (optional) describe states, e.g. the residual obligation.
    Automaton( std::size_t num_states, StateId initial, std::vector< Transition > transitions,
               std::vector< bool > accepting, int index = 1, std::vector< std::string > labels = {} );

    [[nodiscard]] std::size_t num_states() const { return _accepting.size(); }
    [[nodiscard]] StateId initial() const { return _initial; }
    [[nodiscard]] bool is_accepting( StateId q ) const { return _accepting[ q ]; }
    [[nodiscard]] std::vector< StateId > accepting_states() const;
    [[nodiscard]] const std::vector< Transition >& transitions() const { return _transitions; }
    /// Transitions leaving q, in declaration order.
    [[nodiscard]] std::span< const Transition > outgoing( StateId q ) const;
    [[nodiscard]] int index() const { return _index; }
    [[nodiscard]] const std::string& label( StateId q ) const;

private:
    StateId _initial;
    std::vector< Transition > _transitions; // sorted by source (stable)
    std::vector< std::size_t > _first;      // _first[q] .. _first[q+1] index q's outgoing transitions
    std::vector< bool > _accepting;
    int _index;
    std::vector< std::string > _labels;
};

/// Residual obligations of formulas under progression. A residual is kept in a
/// canonical disjunctive form, so equal obligations get equal ids within one
/// Progression instance.
class Progression
{
public:
    using ResidualId = std::uint32_t;

    explicit Progression( const ProcessVocabulary& vocabulary );
    ~Progression();
    Progression( const Progression& ) = delete;
    Progression& operator=( const Progression& ) = delete;

    /// Residual for the whole (not yet read) trace.
    ResidualId start( const Formula& formula );
    /// Residual after reading one more event. Variables need an assignment.
    ResidualId advance( ResidualId residual, const Event& event, const Assignment* assignment = nullptr );
    /// True when the trace read so far satisfies the formula.
    [[nodiscard]] bool accepts_empty( ResidualId residual ) const;
    [[nodiscard]] bool is_false( ResidualId residual ) const;
    [[nodiscard]] bool is_true( ResidualId residual ) const;
    /// The residual as a formula, meaningful on nonempty suffixes.
    [[nodiscard]] Formula to_formula( ResidualId residual ) const;
    [[nodiscard]] std::string to_string( ResidualId residual ) const;

    [[nodiscard]] const ProcessVocabulary& vocabulary() const;

    struct Store;
    Store& store() { return *_store; }

private:
    std::unique_ptr< Store > _store;
};

/// progress(phi, e): the obligation on e_2..e_n left after reading e_1.
Formula progress( const ProcessVocabulary& vocabulary, const Formula& formula, const Event& event );

/// Compiles by formula progression; activity variables are kept as symbols.
/// States are numbered in discovery order, the initial state is 0.
Automaton compile( const Formula& formula, const ProcessVocabulary& vocabulary, int index = 1 );
Automaton compile( Progression& progression, const Formula& formula, int index = 1 );

/// Every literal of the guard holds on the event (variables through `assignment`).
bool guard_holds( const ProcessVocabulary& vocabulary, const EventFormula& guard, const Event& event,
                  const Assignment* assignment = nullptr );

StateSet step( const Automaton& automaton, const ProcessVocabulary& vocabulary, const StateSet& states,
               const Event& event, const Assignment* assignment = nullptr );

bool accepts( const Automaton& automaton, const ProcessVocabulary& vocabulary, const Trace& trace,
              const Assignment* assignment = nullptr );

/// Synchronous product: accepts exactly the traces every component accepts.
/// Merged guards that cannot hold on any event are dropped. UsageError on an empty list.
Automaton product( std::span< const Automaton > automata, const ProcessVocabulary& vocabulary, int index = 1 );

/// False when no single event can satisfy the conjunction (two distinct
/// activities, complementary literals, contradictory comparisons on one attribute).
bool satisfiable( const ProcessVocabulary& vocabulary, const EventFormula& conjunction );

/// Human-readable listing for debugging.
std::string dump( const Automaton& automaton );

} // namespace dpm
