#include "dpm/querycheck.hpp"

#include "dpm/conformance.hpp"
#include "dpm/error.hpp"

#include <algorithm>

namespace dpm {

std::vector< Assignment > enumerate_assignments( const std::set< std::string >& variables,
                                                 const ProcessVocabulary& vocabulary )
{
    const std::vector< std::string > vars( variables.begin(), variables.end() );
    std::vector< Assignment > out;
    std::vector< std::size_t > digits( vars.size(), 0 );
    for ( ;; )
    {
        Assignment a;
        for ( std::size_t i = 0; i < vars.size(); ++i )
            a[ vars[ i ] ] = vocabulary[ digits[ i ] ].name();
        out.push_back( std::move( a ) );
        std::size_t i = vars.size();
        while ( i > 0 )
        {
            --i;
            if ( ++digits[ i ] < vocabulary.size() )
                break;
            digits[ i ] = 0;
            if ( i == 0 )
                return out;
        }
        if ( vars.empty() )
            return out;
    }
}

namespace {

struct VarLiteral
{
    std::size_t variable;
    bool positive;
};

// A transition split into the part that is fixed per event and the part that
// depends on the assignment.
struct SplitGuard
{
    EventFormula fixed;
    std::vector< VarLiteral > variable;
};

class Simulator
{
public:
    Simulator( const Automaton& automaton, const ProcessVocabulary& vocabulary, const std::vector< std::string >& vars,
               const Log& log )
        : _automaton{ automaton }
    {
        for ( const auto& t : automaton.transitions() )
        {
            SplitGuard g;
            for ( const auto& l : t.guard )
            {
                if ( const auto* v = std::get_if< VarAtom >( &l.atom ) )
                    g.variable.push_back(
                        { static_cast< std::size_t >( std::find( vars.begin(), vars.end(), v->name ) - vars.begin() ),
                          l.positive } );
                else
                    g.fixed.push_back( l );
            }
            _guards.push_back( std::move( g ) );
        }

        // per trace, per position: activity index and which fixed parts hold
        for ( const auto& trace : log.traces )
        {
            std::vector< std::size_t > activities;
            std::vector< std::vector< char > > fixed;
            for ( const auto& e : trace.events )
            {
                activities.push_back( *vocabulary.index_of( e.activity ) );
                std::vector< char > row;
                for ( const auto& g : _guards )
                    row.push_back( holds( vocabulary, g.fixed, e ) );
                fixed.push_back( std::move( row ) );
            }
            _activities.push_back( std::move( activities ) );
            _fixed.push_back( std::move( fixed ) );
        }
    }

    // values[i] = activity index assigned to the i-th variable
    bool accepts( std::size_t trace, const std::vector< std::size_t >& values ) const
    {
        StateSet states{ _automaton.initial() };
        StateSet next;
        const auto* base = _automaton.transitions().data();
        for ( std::size_t pos = 0; pos < _activities[ trace ].size(); ++pos )
        {
            const std::size_t activity = _activities[ trace ][ pos ];
            const auto& fixed = _fixed[ trace ][ pos ];
            next.clear();
            for ( StateId q : states )
                for ( const auto& t : _automaton.outgoing( q ) )
                {
                    const std::size_t k = static_cast< std::size_t >( &t - base );
                    if ( !fixed[ k ] )
                        continue;
                    const auto& vl = _guards[ k ].variable;
                    if ( std::all_of( vl.begin(), vl.end(), [ & ]( const VarLiteral& l ) {
                             return ( values[ l.variable ] == activity ) == l.positive;
                         } ) )
                        next.push_back( t.target );
                }
            std::sort( next.begin(), next.end() );
            next.erase( std::unique( next.begin(), next.end() ), next.end() );
            std::swap( states, next );
            if ( states.empty() )
                return false;
        }
        return std::any_of( states.begin(), states.end(), [ & ]( StateId q ) { return _automaton.is_accepting( q ); } );
    }

private:
    const Automaton& _automaton;
    std::vector< SplitGuard > _guards;
    std::vector< std::vector< std::size_t > > _activities;
    std::vector< std::vector< std::vector< char > > > _fixed;
};

} // namespace

QueryResult query_check( const Log& log, const Formula& query, const ProcessVocabulary& vocabulary,
                         const QueryOptions& options )
{
    if ( log.traces.empty() )
        throw UsageError( "query checking needs a nonempty log" );
    for ( std::size_t i = 0; i < log.size(); ++i )
        if ( auto violations = validate_trace( vocabulary, log.traces[ i ] ); !violations.empty() )
            throw ModelError( "trace " + trace_label( log.traces[ i ], i ) + ": " + violations.front().message );

    const auto var_set = variables_of( query );
    QueryResult result;
    result.query = query;
    result.variables.assign( var_set.begin(), var_set.end() );

    const Automaton automaton = compile( query, vocabulary );
    const Simulator simulator{ automaton, vocabulary, result.variables, log };
    const auto candidates = enumerate_assignments( var_set, vocabulary );

    std::vector< std::size_t > satisfied( candidates.size(), 0 );
    std::vector< char > solution( candidates.size(), 0 );
    parallel_for( candidates.size(), options.jobs, [ & ]( std::size_t c ) {
        std::vector< std::size_t > values;
        for ( const auto& v : result.variables )
            values.push_back( *vocabulary.index_of( candidates[ c ].at( v ) ) );
        bool all = true;
        for ( std::size_t t = 0; t < log.size(); ++t )
        {
            if ( simulator.accepts( t, values ) )
                ++satisfied[ c ];
            else
            {
                all = false;
                if ( !options.diagnostics )
                    break;
            }
        }
        solution[ c ] = all;
    } );

    for ( std::size_t c = 0; c < candidates.size(); ++c )
    {
        if ( solution[ c ] )
            result.assignments.push_back( candidates[ c ] );
        if ( options.diagnostics )
            result.support.emplace_back( candidates[ c ], satisfied[ c ] );
    }
    return result;
}

} // namespace dpm
