#pragma once

#include "dpm/automaton.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace dpm::ref {

struct Edge
{
    StateId source;
    std::set< std::string > guard; // printed literals
    StateId target;
    auto operator<=>( const Edge& ) const = default;
};

struct Shape
{
    std::size_t states = 0;
    StateId initial = 0;
    std::set< StateId > accepting;
    std::vector< Edge > edges;
};

inline Shape shape_of( const Automaton& a )
{
    Shape s{ a.num_states(), a.initial(), {}, {} };
    for ( StateId q = 0; q < a.num_states(); ++q )
        if ( a.is_accepting( q ) )
            s.accepting.insert( q );
    for ( const auto& t : a.transitions() )
    {
        Edge e{ t.source, {}, t.target };
        for ( const auto& l : t.guard )
            e.guard.insert( to_string( l ) );
        s.edges.push_back( std::move( e ) );
    }
    return s;
}

// Brute force over state permutations; fine for the handful of states involved.
inline bool isomorphic( const Shape& x, const Shape& y )
{
    if ( x.states != y.states || x.edges.size() != y.edges.size() || x.accepting.size() != y.accepting.size() )
        return false;
    std::vector< StateId > perm( x.states );
    std::iota( perm.begin(), perm.end(), 0 );
    std::multiset< Edge > target_edges( y.edges.begin(), y.edges.end() );
    do
    {
        if ( perm[ x.initial ] != y.initial )
            continue;
        bool ok = true;
        for ( StateId q = 0; q < x.states && ok; ++q )
            ok = x.accepting.count( q ) == y.accepting.count( perm[ q ] );
        if ( !ok )
            continue;
        std::multiset< Edge > mapped;
        for ( const auto& e : x.edges )
            mapped.insert( Edge{ perm[ e.source ], e.guard, perm[ e.target ] } );
        if ( mapped == target_edges )
            return true;
    } while ( std::next_permutation( perm.begin(), perm.end() ) );
    return false;
}

// The two-state Response automaton for G(a -> F b).
inline Shape response_shape()
{
    return Shape{ 2, 0, { 0 }, { { 0, { "!a" }, 0 }, { 0, { "a" }, 1 }, { 1, { "!b" }, 1 }, { 1, { "b" }, 0 } } };
}

} // namespace dpm::ref
