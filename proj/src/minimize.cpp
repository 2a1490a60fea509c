#include "minimize.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace dpm::detail {

namespace {

constexpr unsigned exact_width_limit = 10;

std::vector< Cube > prime_implicants( unsigned width, const std::vector< std::uint32_t >& minterms )
{
    const std::uint32_t full = width == 32 ? ~0u : ( ( 1u << width ) - 1 );
    std::set< std::pair< std::uint32_t, std::uint32_t > > level; // (care, value)
    for ( auto m : minterms )
        level.emplace( full, m );

    std::vector< Cube > primes;
    while ( !level.empty() )
    {
        std::set< std::pair< std::uint32_t, std::uint32_t > > next;
        std::set< std::pair< std::uint32_t, std::uint32_t > > merged;
        for ( auto it = level.begin(); it != level.end(); ++it )
        {
            for ( auto jt = std::next( it ); jt != level.end() && jt->first == it->first; ++jt )
            {
                const std::uint32_t diff = it->second ^ jt->second;
                if ( std::popcount( diff ) != 1 )
                    continue;
                next.emplace( it->first & ~diff, it->second & ~diff );
                merged.insert( *it );
                merged.insert( *jt );
            }
        }
        for ( const auto& c : level )
            if ( !merged.count( c ) )
                primes.push_back( Cube{ c.second, c.first } );
        level = std::move( next );
    }
    return primes;
}

// Lower first constrained atom first, then fewer literals.
bool cube_order( const Cube& a, const Cube& b )
{
    const int fa = a.care ? std::countr_zero( a.care ) : 64;
    const int fb = b.care ? std::countr_zero( b.care ) : 64;
    if ( fa != fb )
        return fa < fb;
    if ( a.care != b.care )
        return std::popcount( a.care ) != std::popcount( b.care ) ? std::popcount( a.care ) < std::popcount( b.care )
                                                                  : a.care < b.care;
    return a.value < b.value;
}

std::vector< Cube > exact_cover( unsigned width, const std::vector< std::uint32_t >& on,
                                 const std::vector< std::uint32_t >& dont_care )
{
    std::vector< std::uint32_t > all = on;
    all.insert( all.end(), dont_care.begin(), dont_care.end() );
    std::vector< Cube > primes;
    for ( const auto& p : prime_implicants( width, all ) )
        if ( std::any_of( on.begin(), on.end(), [ & ]( std::uint32_t m ) { return p.covers( m ); } ) )
            primes.push_back( p );

    std::vector< Cube > chosen;
    std::vector< bool > covered( on.size(), false );
    auto take = [ & ]( const Cube& c ) {
        chosen.push_back( c );
        for ( std::size_t i = 0; i < on.size(); ++i )
            if ( c.covers( on[ i ] ) )
                covered[ i ] = true;
    };

    // essential primes
    for ( std::size_t i = 0; i < on.size(); ++i )
    {
        const Cube* only = nullptr;
        int count = 0;
        for ( const auto& p : primes )
            if ( p.covers( on[ i ] ) )
            {
                only = &p;
                ++count;
            }
        if ( count == 1 && std::find( chosen.begin(), chosen.end(), *only ) == chosen.end() )
            take( *only );
    }

    // greedy completion
    for ( ;; )
    {
        const Cube* best = nullptr;
        std::size_t best_gain = 0;
        for ( const auto& p : primes )
        {
            std::size_t gain = 0;
            for ( std::size_t i = 0; i < on.size(); ++i )
                gain += !covered[ i ] && p.covers( on[ i ] );
            if ( gain == 0 )
                continue;
            if ( !best || gain > best_gain ||
                 ( gain == best_gain && std::popcount( p.care ) < std::popcount( best->care ) ) ||
                 ( gain == best_gain && std::popcount( p.care ) == std::popcount( best->care ) && cube_order( p, *best ) ) )
            {
                best = &p;
                best_gain = gain;
            }
        }
        if ( !best )
            break;
        take( *best );
    }
    std::sort( chosen.begin(), chosen.end(), cube_order );
    return chosen;
}

// 0 = off, 1 = on, 2 = don't care
void split( unsigned width, unsigned atom, std::uint32_t value, std::uint32_t care,
            const std::vector< std::uint8_t >& table, std::vector< Cube >& out )
{
    // is the subcube uniformly on-or-dc with at least one on?
    const std::uint32_t free_bits = ( ( width == 32 ? ~0u : ( 1u << width ) - 1 ) ) & ~care;
    bool any_on = false;
    bool any_off = false;
    for ( std::uint32_t sub = free_bits;; sub = ( sub - 1 ) & free_bits )
    {
        const auto v = table[ value | sub ];
        any_on |= v == 1;
        any_off |= v == 0;
        if ( any_off && any_on )
            break;
        if ( sub == 0 )
            break;
    }
    if ( !any_on )
        return;
    if ( !any_off )
    {
        out.push_back( Cube{ value, care } );
        return;
    }
    const std::uint32_t bit = 1u << atom;
    split( width, atom + 1, value, care | bit, table, out );
    split( width, atom + 1, value | bit, care | bit, table, out );
}

} // namespace

std::vector< Cube > minimize( unsigned width, const std::vector< std::uint32_t >& on,
                              const std::vector< std::uint32_t >& dont_care )
{
    if ( on.empty() )
        return {};
    if ( width <= exact_width_limit )
        return exact_cover( width, on, dont_care );

    std::vector< std::uint8_t > table( std::size_t{ 1 } << width, 0 );
    for ( auto m : dont_care )
        table[ m ] = 2;
    for ( auto m : on )
        table[ m ] = 1;
    std::vector< Cube > out;
    split( width, 0, 0, 0, table, out );
    return out;
}

} // namespace dpm::detail
