#include "dpm/loggen.hpp"

#include "dpm/automaton.hpp"
#include "dpm/conformance.hpp"
#include "dpm/error.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace dpm {

namespace {

void collect_constants( const Formula& f, const std::string& attribute, std::vector< Value >& out )
{
    if ( f.kind() == Formula::Kind::Atom )
    {
        if ( const auto* c = std::get_if< AttrCmpConst >( &f.atom_value() ); c && c->attribute == attribute )
            out.push_back( c->constant );
        return;
    }
    collect_constants( f.lhs(), attribute, out );
    if ( f.is_binary() )
        collect_constants( f.rhs(), attribute, out );
}

std::uint64_t splitmix64( std::uint64_t x )
{
    x += 0x9e3779b97f4a7c15ULL;
    x = ( x ^ ( x >> 30 ) ) * 0xbf58476d1ce4e5b9ULL;
    x = ( x ^ ( x >> 27 ) ) * 0x94d049bb133111ebULL;
    return x ^ ( x >> 31 );
}

std::uint64_t checked_mul( std::uint64_t a, std::uint64_t b )
{
    std::uint64_t r = 0;
    if ( __builtin_mul_overflow( a, b, &r ) )
        return std::numeric_limits< std::uint64_t >::max();
    return r;
}

std::uint64_t checked_add( std::uint64_t a, std::uint64_t b )
{
    std::uint64_t r = 0;
    if ( __builtin_add_overflow( a, b, &r ) )
        return std::numeric_limits< std::uint64_t >::max();
    return r;
}

constexpr std::int32_t dead = -1;

// Candidate events partitioned into classes that no guard can tell apart, and
// the product of the constraint automata explored layer by layer over those
// classes. A product node is a tuple of per-automaton state sets.
class Space
{
public:
    Space( const ProcessVocabulary& vocabulary, const std::vector< Formula >& constraints, std::size_t length,
           std::uint64_t threshold, std::uint64_t branching_cap )
        : _vocabulary{ vocabulary }, _length{ length }
    {
        Progression progression{ vocabulary };
        for ( std::size_t i = 0; i < constraints.size(); ++i )
        {
            if ( !variables_of( constraints[ i ] ).empty() )
                throw UsageError( "constraint " + std::to_string( i + 1 ) + " contains activity variables" );
            _automata.push_back( compile( progression, constraints[ i ], static_cast< int >( i + 1 ) ) );
        }
        build_events( constraints, threshold, branching_cap );
        build_classes();
        explore();
    }

    [[nodiscard]] bool reduced() const { return _reduced; }
    [[nodiscard]] bool feasible() const { return _can[ 0 ][ 0 ]; }
    [[nodiscard]] const std::vector< Event >& events() const { return _events; }
    [[nodiscard]] const std::vector< Automaton >& automata() const { return _automata; }

    // Number of accepted traces, saturating at UINT64_MAX.
    [[nodiscard]] std::uint64_t count() const
    {
        std::vector< std::uint64_t > below( _tuples.size(), 0 ), here( _tuples.size(), 0 );
        for ( std::size_t x = 0; x < _tuples.size(); ++x )
            below[ x ] = _can[ _length ][ x ] ? 1 : 0;
        for ( std::size_t k = _length; k-- > 0; )
        {
            std::fill( here.begin(), here.end(), 0 );
            for ( std::size_t x : _layers[ k ] )
            {
                std::uint64_t total = 0;
                for ( std::size_t c = 0; c < _classes.size(); ++c )
                {
                    const auto y = _succ[ x ][ c ];
                    if ( y != dead && _can[ k + 1 ][ y ] )
                        total = checked_add( total, checked_mul( _classes[ c ].size(), below[ y ] ) );
                }
                here[ x ] = total;
            }
            std::swap( below, here );
        }
        return below[ 0 ];
    }

    // Random trace: at each step a uniform pick among the events that still allow completion.
    [[nodiscard]] Trace sample( std::uint64_t seed, std::uint64_t ordinal ) const
    {
        std::mt19937_64 rng{ splitmix64( splitmix64( seed ) ^ splitmix64( ordinal + 1 ) ) };
        Trace trace;
        std::size_t x = 0;
        std::vector< std::pair< std::size_t, std::uint64_t > > options;
        for ( std::size_t k = 0; k < _length; ++k )
        {
            options.clear();
            std::uint64_t total = 0;
            for ( std::size_t c = 0; c < _classes.size(); ++c )
            {
                const auto y = _succ[ x ][ c ];
                if ( y != dead && _can[ k + 1 ][ y ] )
                {
                    total += _classes[ c ].size();
                    options.emplace_back( c, total );
                }
            }
            const auto r = std::uniform_int_distribution< std::uint64_t >{ 0, total - 1 }( rng );
            const auto it = std::upper_bound( options.begin(), options.end(), r,
                                              []( std::uint64_t v, const auto& o ) { return v < o.second; } );
            const auto& members = _classes[ it->first ];
            trace.events.push_back(
                _events[ members[ std::uniform_int_distribution< std::size_t >{ 0, members.size() - 1 }( rng ) ] ] );
            x = static_cast< std::size_t >( _succ[ x ][ it->first ] );
        }
        return trace;
    }

    // Accepted traces in canonical order (events by activity declaration, then values), at most `limit`.
    [[nodiscard]] std::vector< Trace > enumerate( std::size_t limit ) const
    {
        std::vector< Trace > out;
        std::vector< std::size_t > path;
        enumerate( 0, 0, path, limit, out );
        return out;
    }

private:
    void enumerate( std::size_t k, std::size_t x, std::vector< std::size_t >& path, std::size_t limit,
                    std::vector< Trace >& out ) const
    {
        if ( out.size() >= limit )
            return;
        if ( k == _length )
        {
            Trace t;
            for ( auto e : path )
                t.events.push_back( _events[ e ] );
            out.push_back( std::move( t ) );
            return;
        }
        std::vector< char > open( _classes.size(), 0 );
        for ( std::size_t c = 0; c < _classes.size(); ++c )
        {
            const auto y = _succ[ x ][ c ];
            open[ c ] = y != dead && _can[ k + 1 ][ y ];
        }
        for ( std::size_t e = 0; e < _events.size() && out.size() < limit; ++e )
        {
            const auto c = _class_of[ e ];
            if ( !open[ c ] )
                continue;
            path.push_back( e );
            enumerate( k + 1, static_cast< std::size_t >( _succ[ x ][ c ] ), path, limit, out );
            path.pop_back();
        }
    }

    void build_events( const std::vector< Formula >& constraints, std::uint64_t threshold, std::uint64_t cap )
    {
        std::uint64_t total = 0;
        std::vector< std::vector< std::vector< Value > > > per_activity;
        for ( const auto& a : _vocabulary.activities() )
        {
            std::vector< std::vector< Value > > lists;
            std::uint64_t combos = 1;
            for ( const auto& attr : a.attributes() )
            {
                lists.push_back( candidate_values( attr, constraints, threshold ) );
                _reduced |= attr.type.size() > threshold;
                combos = checked_mul( combos, lists.back().size() );
            }
            total = checked_add( total, combos );
            per_activity.push_back( std::move( lists ) );
        }
        if ( total > cap )
            throw UsageError( "per-step event space has " +
                              ( total == std::numeric_limits< std::uint64_t >::max() ? std::string{ "too many" }
                                                                                     : std::to_string( total ) ) +
                              " candidates, above the cap of " + std::to_string( cap ) );

        for ( std::size_t i = 0; i < _vocabulary.size(); ++i )
        {
            const auto& lists = per_activity[ i ];
            std::vector< std::size_t > digits( lists.size(), 0 );
            for ( ;; )
            {
                Event e{ _vocabulary[ i ].name(), {} };
                for ( std::size_t j = 0; j < lists.size(); ++j )
                    e.values.push_back( lists[ j ][ digits[ j ] ] );
                _events.push_back( std::move( e ) );
                std::size_t j = lists.size();
                while ( j > 0 && ++digits[ j - 1 ] == lists[ j - 1 ].size() )
                    digits[ --j ] = 0;
                if ( j == 0 )
                    break;
            }
        }
    }

    void build_classes()
    {
        std::set< Atom > atom_set;
        for ( const auto& a : _automata )
            for ( const auto& t : a.transitions() )
                for ( const auto& l : t.guard )
                    atom_set.insert( l.atom );
        const std::vector< Atom > atoms( atom_set.begin(), atom_set.end() );

        std::map< std::vector< bool >, std::size_t > class_ids;
        for ( std::size_t e = 0; e < _events.size(); ++e )
        {
            std::vector< bool > signature;
            for ( const auto& atom : atoms )
                signature.push_back( holds( _vocabulary, atom, _events[ e ] ) );
            auto [ it, inserted ] = class_ids.emplace( std::move( signature ), _classes.size() );
            if ( inserted )
                _classes.emplace_back();
            _classes[ it->second ].push_back( e );
            _class_of.push_back( it->second );
        }
    }

    // Interned state set of automaton i; dead when empty.
    std::int32_t frontier( std::size_t i, StateSet states )
    {
        if ( states.empty() )
            return dead;
        auto [ it, inserted ] = _frontier_ids[ i ].emplace( states, static_cast< std::int32_t >( _frontiers[ i ].size() ) );
        if ( inserted )
        {
            _frontiers[ i ].push_back( std::move( states ) );
            _frontier_succ[ i ].emplace_back();
        }
        return it->second;
    }

    std::int32_t frontier_step( std::size_t i, std::int32_t f, std::size_t c )
    {
        auto& row = _frontier_succ[ i ][ f ];
        if ( row.empty() )
        {
            row.assign( _classes.size(), -2 );
        }
        if ( row[ c ] == -2 )
        {
            auto next = step( _automata[ i ], _vocabulary, _frontiers[ i ][ f ], _events[ _classes[ c ].front() ] );
            const auto id = frontier( i, std::move( next ) );
            _frontier_succ[ i ][ f ][ c ] = id; // frontier() may have reallocated
        }
        return _frontier_succ[ i ][ f ][ c ];
    }

    std::size_t tuple( std::vector< std::int32_t > t, bool& inserted )
    {
        auto [ it, ins ] = _tuple_ids.emplace( t, _tuples.size() );
        inserted = ins;
        if ( ins )
        {
            _tuples.push_back( std::move( t ) );
            _succ.emplace_back();
        }
        return it->second;
    }

    bool accepting( std::size_t x ) const
    {
        const auto& t = _tuples[ x ];
        for ( std::size_t i = 0; i < t.size(); ++i )
        {
            const auto& states = _frontiers[ i ][ t[ i ] ];
            if ( std::none_of( states.begin(), states.end(),
                               [ & ]( StateId q ) { return _automata[ i ].is_accepting( q ); } ) )
                return false;
        }
        return true;
    }

    void explore()
    {
        const std::size_t n = _automata.size();
        _frontier_ids.resize( n );
        _frontiers.resize( n );
        _frontier_succ.resize( n );

        std::vector< std::int32_t > start;
        for ( std::size_t i = 0; i < n; ++i )
            start.push_back( frontier( i, StateSet{ _automata[ i ].initial() } ) );
        bool inserted = false;
        tuple( start, inserted );

        _layers.assign( _length + 1, {} );
        _layers[ 0 ].push_back( 0 );
        for ( std::size_t k = 0; k < _length; ++k )
        {
            std::unordered_set< std::size_t > seen;
            for ( std::size_t x : _layers[ k ] )
            {
                if ( _succ[ x ].empty() )
                {
                    std::vector< std::int32_t > row( _classes.size(), dead );
                    for ( std::size_t c = 0; c < _classes.size(); ++c )
                    {
                        std::vector< std::int32_t > next( n );
                        bool alive = true;
                        for ( std::size_t i = 0; i < n && alive; ++i )
                        {
                            next[ i ] = frontier_step( i, _tuples[ x ][ i ], c );
                            alive = next[ i ] != dead;
                        }
                        if ( alive )
                            row[ c ] = static_cast< std::int32_t >( tuple( std::move( next ), inserted ) );
                    }
                    _succ[ x ] = std::move( row );
                }
                for ( auto y : _succ[ x ] )
                    if ( y != dead && seen.insert( static_cast< std::size_t >( y ) ).second )
                        _layers[ k + 1 ].push_back( static_cast< std::size_t >( y ) );
            }
        }

        _can.assign( _length + 1, std::vector< char >( _tuples.size(), 0 ) );
        for ( std::size_t x : _layers[ _length ] )
            _can[ _length ][ x ] = accepting( x );
        for ( std::size_t k = _length; k-- > 0; )
            for ( std::size_t x : _layers[ k ] )
                _can[ k ][ x ] = std::any_of( _succ[ x ].begin(), _succ[ x ].end(),
                                              [ & ]( std::int32_t y ) { return y != dead && _can[ k + 1 ][ y ]; } );
    }

    struct VectorHash
    {
        std::size_t operator()( const std::vector< std::int32_t >& v ) const
        {
            std::uint64_t h = 0x84222325;
            for ( auto x : v )
                h = splitmix64( h ^ static_cast< std::uint32_t >( x ) );
            return static_cast< std::size_t >( h );
        }
    };

    const ProcessVocabulary& _vocabulary;
    std::size_t _length;
    std::vector< Automaton > _automata;
    bool _reduced = false;

    std::vector< Event > _events;
    std::vector< std::vector< std::size_t > > _classes;
    std::vector< std::size_t > _class_of;

    std::vector< std::map< StateSet, std::int32_t > > _frontier_ids;
    std::vector< std::vector< StateSet > > _frontiers;
    std::vector< std::vector< std::vector< std::int32_t > > > _frontier_succ;

    std::unordered_map< std::vector< std::int32_t >, std::size_t, VectorHash > _tuple_ids;
    std::vector< std::vector< std::int32_t > > _tuples;
    std::vector< std::vector< std::int32_t > > _succ; // per tuple, per class
    std::vector< std::vector< std::size_t > > _layers;
    std::vector< std::vector< char > > _can; // _can[k][x]: from x after k events some completion is accepted
};

void check_request( const GenerationRequest& request )
{
    if ( request.trace_length < 1 )
        throw UsageError( "trace length must be at least 1" );
    if ( request.count < 1 )
        throw UsageError( "trace count must be at least 1" );
}

void name_traces( Log& log )
{
    for ( std::size_t i = 0; i < log.size(); ++i )
        log.traces[ i ].id = "t" + std::to_string( i + 1 );
}

void verify( const Space& space, const ProcessVocabulary& vocabulary, const Log& log )
{
    for ( const auto& t : log.traces )
        for ( const auto& a : space.automata() )
            if ( !accepts( a, vocabulary, t ) )
                throw std::logic_error( "generated trace violates constraint " + std::to_string( a.index() ) );
}

} // namespace

std::vector< Value > candidate_values( const Attribute& attribute, const std::vector< Formula >& constraints,
                                       std::uint64_t threshold )
{
    const auto& type = attribute.type;
    std::vector< Value > out;
    if ( type.size() <= threshold )
    {
        for ( std::uint64_t i = 0; i < type.size(); ++i )
            out.push_back( type.at( i ) );
        return out;
    }

    std::vector< Value > constants;
    for ( const auto& f : constraints )
        collect_constants( f, attribute.name, constants );

    if ( type.is_int() )
    {
        const auto [ lo, hi ] = type.range();
        std::set< std::int64_t > points{ lo, hi };
        for ( const auto& c : constants )
            if ( const auto* v = std::get_if< std::int64_t >( &c ) )
            {
                points.insert( std::clamp( *v, lo, hi ) );
                if ( *v > std::numeric_limits< std::int64_t >::min() )
                    points.insert( std::clamp( *v - 1, lo, hi ) );
                if ( *v < std::numeric_limits< std::int64_t >::max() )
                    points.insert( std::clamp( *v + 1, lo, hi ) );
            }
        for ( auto p : points )
            out.emplace_back( p );
        return out;
    }

    const auto& values = type.enumeration().values;
    std::set< std::size_t > positions{ 0, values.size() - 1 };
    for ( const auto& c : constants )
        if ( const auto* s = std::get_if< std::string >( &c ) )
            if ( auto p = type.position( *s ) )
            {
                positions.insert( *p );
                if ( *p > 0 )
                    positions.insert( *p - 1 );
                if ( *p + 1 < values.size() )
                    positions.insert( *p + 1 );
            }
    for ( auto p : positions )
        out.emplace_back( values[ p ] );
    return out;
}

std::uint64_t count_models( const ProcessVocabulary& vocabulary, const std::vector< Formula >& constraints,
                            std::size_t trace_length, std::uint64_t branching_cap )
{
    if ( trace_length < 1 )
        throw UsageError( "trace length must be at least 1" );
    const Space space{ vocabulary, constraints, trace_length, std::numeric_limits< std::uint64_t >::max(),
                       branching_cap };
    const auto n = space.count();
    if ( n == std::numeric_limits< std::uint64_t >::max() )
        throw UsageError( "model count does not fit in 64 bits" );
    return n;
}

GenerationResult generate( const GenerationRequest& request )
{
    check_request( request );
    const auto& vocabulary = request.vocabulary;
    const bool exhaustive = request.mode == GenerationMode::Exhaustive;
    if ( exhaustive )
        for ( const auto& a : vocabulary.activities() )
            for ( const auto& attr : a.attributes() )
                if ( attr.type.size() > request.domain_threshold )
                    throw UsageError( "exhaustive generation needs domains of at most " +
                                      std::to_string( request.domain_threshold ) + " values; " + a.name() + "." +
                                      attr.name + " has more" );

    const Space space{ vocabulary, request.constraints, request.trace_length, request.domain_threshold,
                       request.branching_cap };
    GenerationResult result;
    if ( !space.feasible() )
    {
        result.status = GenerationStatus::Infeasible;
        return result;
    }

    auto report = [ & ]( std::size_t done ) {
        if ( request.progress )
            request.progress( done );
    };

    if ( exhaustive )
    {
        result.log.traces = space.enumerate( request.count );
        report( result.log.size() );
        if ( result.log.size() < request.count )
            result.status = GenerationStatus::Exhausted;
    }
    else if ( !request.unique )
    {
        result.log.traces.resize( request.count );
        parallel_for( request.count, request.jobs,
                      [ & ]( std::size_t i ) { result.log.traces[ i ] = space.sample( request.seed, i ); } );
        report( result.log.size() );
    }
    else if ( !space.reduced() && space.count() < request.count )
    {
        result.log.traces = space.enumerate( request.count );
        report( result.log.size() );
        result.status = GenerationStatus::Exhausted;
    }
    else
    {
        const std::uint64_t max_attempts = checked_mul( 100, request.count );
        std::set< std::vector< Event > > seen;
        std::uint64_t ordinal = 0;
        while ( result.log.size() < request.count && ordinal < max_attempts )
        {
            const std::size_t batch = static_cast< std::size_t >(
                std::min< std::uint64_t >( request.count - result.log.size(), max_attempts - ordinal ) );
            std::vector< Trace > drawn( batch );
            parallel_for( batch, request.jobs,
                          [ & ]( std::size_t i ) { drawn[ i ] = space.sample( request.seed, ordinal + i ); } );
            ordinal += batch;
            for ( auto& t : drawn )
                if ( result.log.size() < request.count && seen.insert( t.events ).second )
                    result.log.traces.push_back( std::move( t ) );
            report( result.log.size() );
        }
        if ( result.log.size() < request.count )
            result.status = GenerationStatus::Exhausted;
    }

    name_traces( result.log );
    verify( space, vocabulary, result.log );
    return result;
}

GenerationResult generate_range( GenerationRequest request, std::size_t min_length, std::size_t max_length )
{
    if ( min_length < 1 || max_length < min_length )
        throw UsageError( "invalid trace length range" );
    GenerationResult out;
    bool any_feasible = false;
    const auto seed = request.seed;
    for ( std::size_t t = min_length; t <= max_length; ++t )
    {
        request.trace_length = t;
        request.seed = splitmix64( seed ^ t );
        auto part = generate( request );
        if ( part.status == GenerationStatus::Infeasible )
            continue;
        any_feasible = true;
        if ( part.status == GenerationStatus::Exhausted )
            out.status = GenerationStatus::Exhausted;
        for ( auto& tr : part.log.traces )
            out.log.traces.push_back( std::move( tr ) );
    }
    if ( !any_feasible )
        out.status = GenerationStatus::Infeasible;
    name_traces( out.log );
    return out;
}

} // namespace dpm
