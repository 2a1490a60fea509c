#pragma once

// L-LTLf formulas over a process vocabulary, optionally with activity variables.
//
// Concrete syntax, lowest to highest precedence:
//
//   phi ::= phi -> phi          right-associative
//         | phi U phi           right-associative
//         | phi || phi
//         | phi && phi
//         | ! phi | X phi | F phi | G phi
//         | true | false | activity | ?Var | attr OP attr | attr OP value | ( phi )
//   OP  ::= < | <= | == | >= | >
//
// Activities are identifiers or double-quoted names; values are integers,
// identifiers naming enumeration constants, or single/double-quoted symbols.

#include "dpm/model.hpp"

#include <compare>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dpm {

enum class CmpOp
{
    Lt,
    Le,
    Eq,
    Ge,
    Gt
};

std::string_view to_string( CmpOp op );
/// Integer comparison under op (also used on enumeration positions).
bool compare( std::int64_t lhs, CmpOp op, std::int64_t rhs );

struct TrueAtom
{
    auto operator<=>( const TrueAtom& ) const = default;
};

struct ActivityAtom
{
    std::string name;
    auto operator<=>( const ActivityAtom& ) const = default;
};

/// `?name` -- ranges over activity names.
struct VarAtom
{
    std::string name;
    auto operator<=>( const VarAtom& ) const = default;
};

/// `lhs op rhs`, both attributes of the current event.
struct AttrCmpAttr
{
    std::string lhs;
    CmpOp op = CmpOp::Eq;
    std::string rhs;
    auto operator<=>( const AttrCmpAttr& ) const = default;
};

/// `attribute op constant` on the current event.
struct AttrCmpConst
{
    std::string attribute;
    CmpOp op = CmpOp::Eq;
    Value constant;
    auto operator<=>( const AttrCmpConst& ) const = default;
};

using Atom = std::variant< TrueAtom, ActivityAtom, VarAtom, AttrCmpAttr, AttrCmpConst >;

std::string to_string( const Atom& atom );

/// Activity name -> activity name for every variable of a formula.
using Assignment = std::map< std::string, std::string >;

std::string to_string( const Assignment& assignment ); // "?A1=a ?A2=b"

/// Truth of an atom on a single event (the event-local satisfaction clauses).
/// Variables are resolved through `assignment`; UsageError when unbound.
bool holds( const ProcessVocabulary& vocabulary, const Atom& atom, const Event& event,
            const Assignment* assignment = nullptr );

/// A possibly negated atom.
struct EventLiteral
{
    Atom atom;
    bool positive = true;

    auto operator<=>( const EventLiteral& ) const = default;
};

/// A conjunction of literals; the empty conjunction is `true`.
using EventFormula = std::vector< EventLiteral >;

std::string to_string( const EventLiteral& literal );
std::string to_string( const EventFormula& formula );

bool holds( const ProcessVocabulary& vocabulary, const EventFormula& formula, const Event& event,
            const Assignment* assignment = nullptr );

class Formula
{
public:
    enum class Kind
    {
        Atom,
        Not,
        And,
        Or,
        Implies,
        Next,
        Until,
        Eventually,
        Globally
    };

    /// `true`
    Formula();

    static Formula atom( Atom a );
    static Formula truth() { return atom( TrueAtom{} ); }
    static Formula falsity() { return negation( truth() ); }
    static Formula activity( std::string name ) { return atom( ActivityAtom{ std::move( name ) } ); }
    static Formula variable( std::string name ) { return atom( VarAtom{ std::move( name ) } ); }
    static Formula negation( Formula f );
    static Formula conjunction( Formula lhs, Formula rhs );
    static Formula disjunction( Formula lhs, Formula rhs );
    static Formula implication( Formula lhs, Formula rhs );
    static Formula next( Formula f );
    static Formula until( Formula lhs, Formula rhs );
    static Formula eventually( Formula f );
    static Formula globally( Formula f );

    [[nodiscard]] Kind kind() const;
    /// Precondition: kind() == Kind::Atom.
    [[nodiscard]] const Atom& atom_value() const;
    /// Unary operand or left operand.
    [[nodiscard]] const Formula& lhs() const;
    /// Right operand of a binary node.
    [[nodiscard]] const Formula& rhs() const;
    [[nodiscard]] bool is_binary() const;
    [[nodiscard]] bool is_temporal() const; // Next, Until, Eventually, Globally

    /// Structural equality.
    bool operator==( const Formula& other ) const;

private:
    struct Node;
    explicit Formula( std::shared_ptr< const Node > node ) : _node{ std::move( node ) } {}

    std::shared_ptr< const Node > _node;
};

/// Parses the concrete syntax and type-checks against the vocabulary.
/// Throws SyntaxError or TypeError.
Formula parse_formula( std::string_view text, const ProcessVocabulary& vocabulary );

/// Type-checks an AST: known activities and attributes, constants inside some
/// declaring domain, compatible attribute types. Throws TypeError.
void check_formula( const Formula& formula, const ProcessVocabulary& vocabulary );

/// Prints in the concrete syntax; parse_formula(to_string(f)) == f.
std::string to_string( const Formula& formula );

/// tau, i |= phi for 1 <= i <= |tau|, by the satisfaction clauses.
/// UsageError on variables or an out-of-range position.
bool eval_at( const ProcessVocabulary& vocabulary, const Trace& trace, std::size_t position,
              const Formula& formula );

/// tau |= phi, i.e. eval_at(trace, 1, phi).
bool satisfies( const ProcessVocabulary& vocabulary, const Trace& trace, const Formula& formula );

std::set< std::string > variables_of( const Formula& formula );

/// Replaces every ?V by the activity assignment[V]. UsageError when some variable is unbound.
Formula substitute( const Formula& formula, const Assignment& assignment );

/// True when the formula contains no X, U, F or G.
bool is_event_formula( const Formula& formula );

/// DNF of the formula's negation. UsageError when a temporal operator occurs.
std::vector< EventFormula > negate_event_formula( const Formula& formula );
std::vector< EventFormula > negate_event_formula( const EventFormula& formula );

/// DNF of an event formula; clauses with complementary literals are dropped.
std::vector< EventFormula > to_dnf( const Formula& formula );

Formula to_formula( const EventFormula& formula );

} // namespace dpm
