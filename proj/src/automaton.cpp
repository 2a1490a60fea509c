#include "dpm/automaton.hpp"

#include "dpm/error.hpp"
#include "minimize.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace dpm {

// ---------------------------------------------------------------------------
// Event-level consistency

namespace {

// Candidate values that decide every comparison against the given constants.
std::vector< Value > witness_values( const AttributeType& type, const std::vector< const Value* >& constants )
{
    std::vector< Value > out;
    if ( type.is_enum() )
    {
        for ( const auto& v : type.enumeration().values )
            out.emplace_back( v );
        return out;
    }
    const auto& r = type.range();
    std::set< std::int64_t > points{ r.lo, r.hi };
    for ( const Value* c : constants )
        if ( const auto* i = std::get_if< std::int64_t >( c ) )
            for ( std::int64_t d : { -1, 0, 1 } )
            {
                if ( ( d < 0 && *i == std::numeric_limits< std::int64_t >::min() ) ||
                     ( d > 0 && *i == std::numeric_limits< std::int64_t >::max() ) )
                    continue;
                points.insert( std::clamp( *i + d, r.lo, r.hi ) );
            }
    for ( auto p : points )
        out.emplace_back( p );
    return out;
}

bool constant_holds( const Value& value, const AttributeType& type, CmpOp op, const Value& constant )
{
    if ( type.is_int() )
    {
        const auto* c = std::get_if< std::int64_t >( &constant );
        return c && compare( std::get< std::int64_t >( value ), op, *c );
    }
    const auto* c = std::get_if< std::string >( &constant );
    if ( !c || !type.position( *c ) )
        return false;
    return compare( static_cast< std::int64_t >( *type.position( std::get< std::string >( value ) ) ), op,
                    static_cast< std::int64_t >( *type.position( *c ) ) );
}

// Intrinsic consistency of a set of literal truth values, ignoring which
// activity carries which attribute: at most one concrete activity, no literal
// with both polarities, and comparisons on one uniformly typed attribute that
// some domain value satisfies together.
bool consistent( const ProcessVocabulary& vocabulary, const std::vector< std::pair< const Atom*, bool > >& literals )
{
    const std::string* activity = nullptr;
    std::map< std::string, std::vector< std::pair< const AttrCmpConst*, bool > > > by_attribute;
    for ( std::size_t i = 0; i < literals.size(); ++i )
    {
        const auto& [ atom, positive ] = literals[ i ];
        if ( std::holds_alternative< TrueAtom >( *atom ) && !positive )
            return false;
        for ( std::size_t j = 0; j < i; ++j )
            if ( *literals[ j ].first == *atom && literals[ j ].second != positive )
                return false;
        if ( const auto* a = std::get_if< ActivityAtom >( atom ); a && positive )
        {
            if ( activity && *activity != a->name )
                return false;
            activity = &a->name;
        }
        if ( const auto* c = std::get_if< AttrCmpConst >( atom ) )
            by_attribute[ c->attribute ].emplace_back( c, positive );
    }

    for ( const auto& [ attribute, comparisons ] : by_attribute )
    {
        // with no positive comparison the attribute may simply be absent
        if ( std::none_of( comparisons.begin(), comparisons.end(), []( const auto& c ) { return c.second; } ) )
            continue;
        const AttributeType* type = vocabulary.uniform_attribute_type( attribute );
        if ( !type )
            continue;
        std::vector< const Value* > constants;
        for ( const auto& c : comparisons )
            constants.push_back( &c.first->constant );
        bool witnessed = false;
        for ( const auto& v : witness_values( *type, constants ) )
        {
            if ( std::all_of( comparisons.begin(), comparisons.end(), [ & ]( const auto& c ) {
                     return constant_holds( v, *type, c.first->op, c.first->constant ) == c.second;
                 } ) )
            {
                witnessed = true;
                break;
            }
        }
        if ( !witnessed )
            return false;
    }
    return true;
}

} // namespace

bool satisfiable( const ProcessVocabulary& vocabulary, const EventFormula& conjunction )
{
    std::vector< std::pair< const Atom*, bool > > literals;
    for ( const auto& l : conjunction )
        literals.emplace_back( &l.atom, l.positive );
    return consistent( vocabulary, literals );
}

// ---------------------------------------------------------------------------
// Automaton

Automaton::Automaton( std::size_t num_states, StateId initial, std::vector< Transition > transitions,
                      std::vector< bool > accepting, int index, std::vector< std::string > labels )
    : _initial{ initial }, _transitions{ std::move( transitions ) }, _accepting{ std::move( accepting ) },
      _index{ index }, _labels{ std::move( labels ) }
{
    if ( num_states == 0 || _accepting.size() != num_states )
        throw UsageError( "automaton needs one acceptance flag per state" );
    if ( initial >= num_states )
        throw UsageError( "initial state out of range" );
    for ( const auto& t : _transitions )
        if ( t.source >= num_states || t.target >= num_states )
            throw UsageError( "transition endpoint out of range" );
    _labels.resize( num_states );
    std::stable_sort( _transitions.begin(), _transitions.end(),
                      []( const Transition& a, const Transition& b ) { return a.source < b.source; } );
    _first.assign( num_states + 1, 0 );
    for ( const auto& t : _transitions )
        ++_first[ t.source + 1 ];
    std::partial_sum( _first.begin(), _first.end(), _first.begin() );
}

std::vector< StateId > Automaton::accepting_states() const
{
    std::vector< StateId > out;
    for ( StateId q = 0; q < num_states(); ++q )
        if ( _accepting[ q ] )
            out.push_back( q );
    return out;
}

std::span< const Transition > Automaton::outgoing( StateId q ) const
{
    return std::span< const Transition >( _transitions ).subspan( _first[ q ], _first[ q + 1 ] - _first[ q ] );
}

const std::string& Automaton::label( StateId q ) const { return _labels.at( q ); }

// ---------------------------------------------------------------------------
// Progression store
//
// Formulas are kept in negation normal form with weak next (WX) and release (R)
// as duals of X and U. A residual is a set of clauses over "leaves" (literals
// and temporal nodes), read as a disjunction of conjunctions, with
// contradictory clauses removed and absorbed clauses dropped.
//
// A residual is evaluated on the (possibly empty) rest of the trace: on a
// nonempty rest it means the usual thing, on the empty rest X, U and literals
// are false while WX and R are true.

using NodeId = std::uint32_t;
using Clause = std::vector< NodeId >;
using Dnf = std::vector< Clause >;

enum class NKind : std::uint8_t
{
    True,
    False,
    Lit,
    And,
    Or,
    Next,
    WeakNext,
    Until,
    Release
};

struct NNode
{
    NKind kind = NKind::True;
    std::uint32_t atom = 0;
    bool positive = true;
    std::vector< NodeId > kids;

    auto operator<=>( const NNode& ) const = default;
};

struct Progression::Store
{
    explicit Store( const ProcessVocabulary& v ) : vocabulary{ v }
    {
        true_node = intern( { NKind::True, 0, true, {} } );
        false_node = intern( { NKind::False, 0, true, {} } );
        nonempty = intern( { NKind::Until, 0, true, { true_node, true_node } } );
        empty = intern( { NKind::Release, 0, true, { false_node, false_node } } );
    }

    const ProcessVocabulary& vocabulary;
    std::vector< Atom > atoms;
    std::map< Atom, std::uint32_t > atom_ids;
    std::vector< NNode > nodes;
    std::map< NNode, NodeId > node_ids;
    std::vector< Dnf > residuals;
    std::map< Dnf, Progression::ResidualId > residual_ids;
    NodeId true_node = 0, false_node = 0, nonempty = 0, empty = 0;

    std::uint32_t atom_id( const Atom& atom )
    {
        auto [ it, inserted ] = atom_ids.emplace( atom, static_cast< std::uint32_t >( atoms.size() ) );
        if ( inserted )
            atoms.push_back( atom );
        return it->second;
    }

    NodeId intern( NNode node )
    {
        auto [ it, inserted ] = node_ids.emplace( node, static_cast< NodeId >( nodes.size() ) );
        if ( inserted )
            nodes.push_back( std::move( node ) );
        return it->second;
    }

    NodeId junction( NKind kind, std::vector< NodeId > kids )
    {
        const NodeId unit = kind == NKind::And ? true_node : false_node;
        const NodeId zero = kind == NKind::And ? false_node : true_node;
        std::vector< NodeId > flat;
        for ( NodeId k : kids )
        {
            if ( k == zero )
                return zero;
            if ( k == unit )
                continue;
            if ( nodes[ k ].kind == kind )
                flat.insert( flat.end(), nodes[ k ].kids.begin(), nodes[ k ].kids.end() );
            else
                flat.push_back( k );
        }
        std::sort( flat.begin(), flat.end() );
        flat.erase( std::unique( flat.begin(), flat.end() ), flat.end() );
        if ( flat.empty() )
            return unit;
        if ( flat.size() == 1 )
            return flat.front();
        return intern( { kind, 0, true, std::move( flat ) } );
    }

    NodeId unary( NKind kind, NodeId kid ) { return intern( { kind, 0, true, { kid } } ); }
    NodeId binary( NKind kind, NodeId l, NodeId r ) { return intern( { kind, 0, true, { l, r } } ); }

    NodeId from_formula( const Formula& f, bool positive )
    {
        using K = Formula::Kind;
        switch ( f.kind() )
        {
        case K::Atom:
            if ( std::holds_alternative< TrueAtom >( f.atom_value() ) )
                return positive ? true_node : false_node;
            return intern( { NKind::Lit, atom_id( f.atom_value() ), positive, {} } );
        case K::Not: return from_formula( f.lhs(), !positive );
        case K::And:
            return junction( positive ? NKind::And : NKind::Or,
                             { from_formula( f.lhs(), positive ), from_formula( f.rhs(), positive ) } );
        case K::Or:
            return junction( positive ? NKind::Or : NKind::And,
                             { from_formula( f.lhs(), positive ), from_formula( f.rhs(), positive ) } );
        case K::Implies:
            return junction( positive ? NKind::Or : NKind::And,
                             { from_formula( f.lhs(), !positive ), from_formula( f.rhs(), positive ) } );
        case K::Next: return unary( positive ? NKind::Next : NKind::WeakNext, from_formula( f.lhs(), positive ) );
        case K::Until:
            return binary( positive ? NKind::Until : NKind::Release, from_formula( f.lhs(), positive ),
                           from_formula( f.rhs(), positive ) );
        case K::Eventually:
            return positive ? binary( NKind::Until, true_node, from_formula( f.lhs(), true ) )
                            : binary( NKind::Release, false_node, from_formula( f.lhs(), false ) );
        case K::Globally:
            return positive ? binary( NKind::Release, false_node, from_formula( f.lhs(), true ) )
                            : binary( NKind::Until, true_node, from_formula( f.lhs(), false ) );
        }
        return true_node;
    }

    // --- clause algebra

    bool contradictory( const Clause& c ) const
    {
        bool has_nonempty = false, has_empty = false;
        for ( std::size_t i = 0; i < c.size(); ++i )
        {
            has_nonempty |= c[ i ] == nonempty;
            has_empty |= c[ i ] == empty;
            const auto& n = nodes[ c[ i ] ];
            if ( n.kind != NKind::Lit )
                continue;
            for ( std::size_t j = i + 1; j < c.size(); ++j )
            {
                const auto& m = nodes[ c[ j ] ];
                if ( m.kind == NKind::Lit && m.atom == n.atom && m.positive != n.positive )
                    return true;
            }
        }
        return has_nonempty && has_empty;
    }

    Dnf normalize( Dnf dnf ) const
    {
        Dnf clean;
        for ( auto& c : dnf )
        {
            std::sort( c.begin(), c.end() );
            c.erase( std::unique( c.begin(), c.end() ), c.end() );
            if ( !contradictory( c ) )
                clean.push_back( std::move( c ) );
        }
        std::sort( clean.begin(), clean.end(), []( const Clause& a, const Clause& b ) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        } );
        clean.erase( std::unique( clean.begin(), clean.end() ), clean.end() );
        Dnf out;
        for ( auto& c : clean )
        {
            // clauses are size-ordered, so only earlier clauses can absorb c
            const bool absorbed = std::any_of( out.begin(), out.end(), [ & ]( const Clause& small ) {
                return std::includes( c.begin(), c.end(), small.begin(), small.end() );
            } );
            if ( !absorbed )
                out.push_back( std::move( c ) );
        }
        std::sort( out.begin(), out.end() );
        return out;
    }

    Dnf conjoin( const Dnf& a, const Dnf& b ) const
    {
        Dnf out;
        out.reserve( a.size() * b.size() );
        for ( const auto& x : a )
            for ( const auto& y : b )
            {
                Clause c = x;
                c.insert( c.end(), y.begin(), y.end() );
                out.push_back( std::move( c ) );
            }
        return normalize( std::move( out ) );
    }

    Dnf disjoin( Dnf a, const Dnf& b ) const
    {
        a.insert( a.end(), b.begin(), b.end() );
        return normalize( std::move( a ) );
    }

    static Dnf top() { return Dnf{ Clause{} }; }
    static Dnf bottom() { return Dnf{}; }

    Dnf dnf_of( NodeId id ) const
    {
        const auto& n = nodes[ id ];
        switch ( n.kind )
        {
        case NKind::True: return top();
        case NKind::False: return bottom();
        case NKind::And:
        {
            Dnf acc = top();
            for ( NodeId k : n.kids )
                acc = conjoin( acc, dnf_of( k ) );
            return acc;
        }
        case NKind::Or:
        {
            Dnf acc = bottom();
            for ( NodeId k : n.kids )
                acc = disjoin( std::move( acc ), dnf_of( k ) );
            return acc;
        }
        default: return Dnf{ Clause{ id } };
        }
    }

    // Truth on the empty rest of the trace.
    bool empty_truth( NodeId id ) const
    {
        const auto& n = nodes[ id ];
        switch ( n.kind )
        {
        case NKind::True:
        case NKind::WeakNext:
        case NKind::Release: return true;
        case NKind::And:
            return std::all_of( n.kids.begin(), n.kids.end(), [ & ]( NodeId k ) { return empty_truth( k ); } );
        case NKind::Or:
            return std::any_of( n.kids.begin(), n.kids.end(), [ & ]( NodeId k ) { return empty_truth( k ); } );
        default: return false;
        }
    }

    bool empty_truth( const Clause& c ) const
    {
        return std::all_of( c.begin(), c.end(), [ & ]( NodeId k ) { return empty_truth( k ); } );
    }

    bool empty_truth( const Dnf& d ) const
    {
        return std::any_of( d.begin(), d.end(), [ & ]( const Clause& c ) { return empty_truth( c ); } );
    }

    using Valuation = std::function< bool( std::uint32_t ) >;

    // Obligation on the rest of the trace after reading one event.
    Dnf progress( NodeId id, const Valuation& valuation ) const
    {
        const auto& n = nodes[ id ];
        switch ( n.kind )
        {
        case NKind::True: return top();
        case NKind::False: return bottom();
        case NKind::Lit: return valuation( n.atom ) == n.positive ? top() : bottom();
        case NKind::And:
        {
            Dnf acc = top();
            for ( NodeId k : n.kids )
            {
                acc = conjoin( acc, progress( k, valuation ) );
                if ( acc.empty() )
                    break;
            }
            return acc;
        }
        case NKind::Or:
        {
            Dnf acc = bottom();
            for ( NodeId k : n.kids )
                acc = disjoin( std::move( acc ), progress( k, valuation ) );
            return acc;
        }
        case NKind::Next:
        {
            // the next position must exist: clauses true on the empty rest get `nonempty`
            Dnf d = dnf_of( n.kids[ 0 ] );
            for ( auto& c : d )
                if ( empty_truth( c ) )
                    c.push_back( nonempty );
            return normalize( std::move( d ) );
        }
        case NKind::WeakNext: return disjoin( dnf_of( n.kids[ 0 ] ), Dnf{ Clause{ empty } } );
        case NKind::Until:
        {
            Dnf now = progress( n.kids[ 1 ], valuation );
            Dnf later = conjoin( progress( n.kids[ 0 ], valuation ), Dnf{ Clause{ id } } );
            return disjoin( std::move( now ), later );
        }
        case NKind::Release:
        {
            Dnf now = progress( n.kids[ 1 ], valuation );
            if ( now.empty() )
                return now;
            Dnf later = disjoin( progress( n.kids[ 0 ], valuation ), Dnf{ Clause{ id } } );
            return conjoin( now, later );
        }
        }
        return bottom();
    }

    Progression::ResidualId residual( Dnf dnf )
    {
        auto [ it, inserted ] = residual_ids.emplace( dnf, static_cast< Progression::ResidualId >( residuals.size() ) );
        if ( inserted )
            residuals.push_back( std::move( dnf ) );
        return it->second;
    }

    Progression::ResidualId advance( Progression::ResidualId r, const Valuation& valuation )
    {
        Dnf acc = bottom();
        for ( const auto& clause : residuals[ r ] )
        {
            Dnf part = top();
            for ( NodeId leaf : clause )
            {
                part = conjoin( part, progress( leaf, valuation ) );
                if ( part.empty() )
                    break;
            }
            acc = disjoin( std::move( acc ), part );
        }
        return residual( std::move( acc ) );
    }

    // Atoms read at the current position, in discovery order.
    void current_atoms( NodeId id, std::vector< std::uint32_t >& out, std::set< NodeId >& seen ) const
    {
        if ( !seen.insert( id ).second )
            return;
        const auto& n = nodes[ id ];
        switch ( n.kind )
        {
        case NKind::Lit:
            if ( std::find( out.begin(), out.end(), n.atom ) == out.end() )
                out.push_back( n.atom );
            return;
        case NKind::And:
        case NKind::Or:
        case NKind::Until:
        case NKind::Release:
            for ( NodeId k : n.kids )
                current_atoms( k, out, seen );
            return;
        default: return;
        }
    }

    // --- back to formulas

    Formula formula_of( NodeId id ) const
    {
        const auto& n = nodes[ id ];
        switch ( n.kind )
        {
        case NKind::True: return Formula::truth();
        case NKind::False: return Formula::falsity();
        case NKind::Lit:
        {
            Formula a = Formula::atom( atoms[ n.atom ] );
            return n.positive ? a : Formula::negation( a );
        }
        case NKind::And:
        case NKind::Or:
        {
            Formula acc = formula_of( n.kids[ 0 ] );
            for ( std::size_t i = 1; i < n.kids.size(); ++i )
                acc = n.kind == NKind::And ? Formula::conjunction( acc, formula_of( n.kids[ i ] ) )
                                           : Formula::disjunction( acc, formula_of( n.kids[ i ] ) );
            return acc;
        }
        case NKind::Next: return Formula::next( formula_of( n.kids[ 0 ] ) );
        case NKind::WeakNext:
            return Formula::negation( Formula::next( Formula::negation( formula_of( n.kids[ 0 ] ) ) ) );
        case NKind::Until:
            if ( n.kids[ 0 ] == true_node )
                return Formula::eventually( formula_of( n.kids[ 1 ] ) );
            return Formula::until( formula_of( n.kids[ 0 ] ), formula_of( n.kids[ 1 ] ) );
        case NKind::Release:
            if ( n.kids[ 0 ] == false_node )
                return Formula::globally( formula_of( n.kids[ 1 ] ) );
            return Formula::negation(
                Formula::until( Formula::negation( formula_of( n.kids[ 0 ] ) ), Formula::negation( formula_of( n.kids[ 1 ] ) ) ) );
        }
        return Formula::truth();
    }

    Formula formula_of( const Dnf& dnf ) const
    {
        if ( dnf.empty() )
            return Formula::falsity();
        Formula out;
        for ( std::size_t i = 0; i < dnf.size(); ++i )
        {
            Formula clause = Formula::truth();
            for ( std::size_t j = 0; j < dnf[ i ].size(); ++j )
                clause = j == 0 ? formula_of( dnf[ i ][ j ] ) : Formula::conjunction( clause, formula_of( dnf[ i ][ j ] ) );
            out = i == 0 ? clause : Formula::disjunction( out, clause );
        }
        return out;
    }
};

Progression::Progression( const ProcessVocabulary& vocabulary ) : _store{ std::make_unique< Store >( vocabulary ) } {}
Progression::~Progression() = default;

const ProcessVocabulary& Progression::vocabulary() const { return _store->vocabulary; }

Progression::ResidualId Progression::start( const Formula& formula )
{
    return _store->residual( _store->dnf_of( _store->from_formula( formula, true ) ) );
}

Progression::ResidualId Progression::advance( ResidualId residual, const Event& event, const Assignment* assignment )
{
    auto& s = *_store;
    return s.advance( residual, [ & ]( std::uint32_t atom ) {
        return holds( s.vocabulary, s.atoms[ atom ], event, assignment );
    } );
}

bool Progression::accepts_empty( ResidualId residual ) const { return _store->empty_truth( _store->residuals[ residual ] ); }
bool Progression::is_false( ResidualId residual ) const { return _store->residuals[ residual ].empty(); }

bool Progression::is_true( ResidualId residual ) const
{
    const auto& d = _store->residuals[ residual ];
    return d.size() == 1 && d.front().empty();
}

Formula Progression::to_formula( ResidualId residual ) const { return _store->formula_of( _store->residuals[ residual ] ); }
std::string Progression::to_string( ResidualId residual ) const { return dpm::to_string( to_formula( residual ) ); }

Formula progress( const ProcessVocabulary& vocabulary, const Formula& formula, const Event& event )
{
    Progression p{ vocabulary };
    return p.to_formula( p.advance( p.start( formula ), event ) );
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

constexpr unsigned max_atoms_per_state = 20;

} // namespace

Automaton compile( const Formula& formula, const ProcessVocabulary& vocabulary, int index )
{
    Progression p{ vocabulary };
    return compile( p, formula, index );
}

Automaton compile( Progression& progression, const Formula& formula, int index )
{
    auto& s = progression.store();
    const auto initial = progression.start( formula );

    std::map< Progression::ResidualId, StateId > state_of;
    std::vector< Progression::ResidualId > residual_of;
    std::deque< StateId > queue;
    auto state = [ & ]( Progression::ResidualId r ) {
        auto [ it, inserted ] = state_of.emplace( r, static_cast< StateId >( residual_of.size() ) );
        if ( inserted )
        {
            residual_of.push_back( r );
            queue.push_back( it->second );
        }
        return it->second;
    };
    state( initial );

    std::vector< Transition > transitions;
    while ( !queue.empty() )
    {
        const StateId q = queue.front();
        queue.pop_front();
        const auto r = residual_of[ q ];
        if ( progression.is_false( r ) )
            continue;

        std::vector< std::uint32_t > atoms;
        std::set< NodeId > seen;
        for ( const auto& clause : s.residuals[ r ] )
            for ( NodeId leaf : clause )
                s.current_atoms( leaf, atoms, seen );
        if ( atoms.size() > max_atoms_per_state )
            throw UsageError( "formula reads " + std::to_string( atoms.size() ) +
                              " atoms at one position; split it into separate constraints" );

        const unsigned width = static_cast< unsigned >( atoms.size() );
        std::vector< std::uint32_t > dont_care;
        std::vector< Progression::ResidualId > targets; // in order of first minterm
        std::map< Progression::ResidualId, std::vector< std::uint32_t > > on_sets;
        std::vector< std::pair< const Atom*, bool > > literals( width );
        for ( std::uint32_t mask = 0; mask < ( 1u << width ); ++mask )
        {
            for ( unsigned b = 0; b < width; ++b )
                literals[ b ] = { &s.atoms[ atoms[ b ] ], ( ( mask >> b ) & 1u ) != 0 };
            if ( !consistent( s.vocabulary, literals ) )
            {
                dont_care.push_back( mask );
                continue;
            }
            const auto next = s.advance( r, [ & ]( std::uint32_t atom ) {
                const auto pos = std::find( atoms.begin(), atoms.end(), atom ) - atoms.begin();
                return ( ( mask >> pos ) & 1u ) != 0;
            } );
            if ( progression.is_false( next ) )
                continue;
            auto& on = on_sets[ next ];
            if ( on.empty() )
                targets.push_back( next );
            on.push_back( mask );
        }

        for ( const auto next : targets )
        {
            const StateId target = state( next );
            for ( const auto& cube : detail::minimize( width, on_sets[ next ], dont_care ) )
            {
                EventFormula guard;
                for ( unsigned b = 0; b < width; ++b )
                    if ( ( cube.care >> b ) & 1u )
                        guard.push_back( EventLiteral{ s.atoms[ atoms[ b ] ], ( ( cube.value >> b ) & 1u ) != 0 } );
                transitions.push_back( Transition{ q, std::move( guard ), target } );
            }
        }
    }

    std::vector< bool > accepting;
    std::vector< std::string > labels;
    for ( auto r : residual_of )
    {
        accepting.push_back( progression.accepts_empty( r ) );
        labels.push_back( progression.to_string( r ) );
    }
    return Automaton{ residual_of.size(), 0, std::move( transitions ), std::move( accepting ), index, std::move( labels ) };
}

// ---------------------------------------------------------------------------
// Simulation

bool guard_holds( const ProcessVocabulary& vocabulary, const EventFormula& guard, const Event& event,
                  const Assignment* assignment )
{
    return holds( vocabulary, guard, event, assignment );
}

StateSet step( const Automaton& automaton, const ProcessVocabulary& vocabulary, const StateSet& states,
               const Event& event, const Assignment* assignment )
{
    StateSet next;
    for ( StateId q : states )
        for ( const auto& t : automaton.outgoing( q ) )
            if ( guard_holds( vocabulary, t.guard, event, assignment ) )
                next.push_back( t.target );
    std::sort( next.begin(), next.end() );
    next.erase( std::unique( next.begin(), next.end() ), next.end() );
    return next;
}

bool accepts( const Automaton& automaton, const ProcessVocabulary& vocabulary, const Trace& trace,
              const Assignment* assignment )
{
    StateSet states{ automaton.initial() };
    for ( const auto& e : trace.events )
    {
        states = step( automaton, vocabulary, states, e, assignment );
        if ( states.empty() )
            return false;
    }
    return std::any_of( states.begin(), states.end(), [ & ]( StateId q ) { return automaton.is_accepting( q ); } );
}

// ---------------------------------------------------------------------------
// Product

Automaton product( std::span< const Automaton > automata, const ProcessVocabulary& vocabulary, int index )
{
    if ( automata.empty() )
        throw UsageError( "product of no automata" );

    using Tuple = std::vector< StateId >;
    std::map< Tuple, StateId > id_of;
    std::vector< Tuple > tuples;
    std::deque< StateId > queue;
    auto state = [ & ]( const Tuple& t ) {
        auto [ it, inserted ] = id_of.emplace( t, static_cast< StateId >( tuples.size() ) );
        if ( inserted )
        {
            tuples.push_back( t );
            queue.push_back( it->second );
        }
        return it->second;
    };

    Tuple start;
    for ( const auto& a : automata )
        start.push_back( a.initial() );
    state( start );

    std::vector< Transition > transitions;
    while ( !queue.empty() )
    {
        const StateId q = queue.front();
        queue.pop_front();
        const Tuple current = tuples[ q ];

        Tuple target( automata.size() );
        EventFormula guard;
        std::function< void( std::size_t ) > combine = [ & ]( std::size_t i ) {
            if ( i == automata.size() )
            {
                if ( satisfiable( vocabulary, guard ) )
                {
                    EventFormula merged;
                    for ( const auto& l : guard )
                        if ( std::find( merged.begin(), merged.end(), l ) == merged.end() &&
                             !( l.positive && std::holds_alternative< TrueAtom >( l.atom ) ) )
                            merged.push_back( l );
                    const StateId t = state( target );
                    Transition tr{ q, std::move( merged ), t };
                    if ( std::find( transitions.begin(), transitions.end(), tr ) == transitions.end() )
                        transitions.push_back( std::move( tr ) );
                }
                return;
            }
            for ( const auto& t : automata[ i ].outgoing( current[ i ] ) )
            {
                const auto mark = guard.size();
                guard.insert( guard.end(), t.guard.begin(), t.guard.end() );
                target[ i ] = t.target;
                combine( i + 1 );
                guard.resize( mark );
            }
        };
        combine( 0 );
    }

    std::vector< bool > accepting;
    std::vector< std::string > labels;
    for ( const auto& t : tuples )
    {
        bool all = true;
        std::string label;
        for ( std::size_t i = 0; i < t.size(); ++i )
        {
            all = all && automata[ i ].is_accepting( t[ i ] );
            label += ( i ? " & " : "" ) + std::string{ "(" } + automata[ i ].label( t[ i ] ) + ")";
        }
        accepting.push_back( all );
        labels.push_back( std::move( label ) );
    }
    return Automaton{ tuples.size(), 0, std::move( transitions ), std::move( accepting ), index, std::move( labels ) };
}

std::string dump( const Automaton& automaton )
{
    std::ostringstream out;
    out << "automaton " << automaton.index() << ": " << automaton.num_states() << " states, initial s"
        << automaton.initial() << "\n";
    for ( StateId q = 0; q < automaton.num_states(); ++q )
    {
        out << "  s" << q << ( automaton.is_accepting( q ) ? " [accepting]" : "" );
        if ( !automaton.label( q ).empty() )
            out << "  -- " << automaton.label( q );
        out << "\n";
        for ( const auto& t : automaton.outgoing( q ) )
            out << "    --[" << to_string( t.guard ) << "]--> s" << t.target << "\n";
    }
    return out.str();
}

} // namespace dpm
