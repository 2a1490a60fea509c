#include "dpm/conformance.hpp"
#include "dpm/error.hpp"
#include "dpm/loggen.hpp"
#include "support/oracle.hpp"

#include <gtest/gtest.h>

using namespace dpm;

namespace {

GenerationRequest request( ProcessVocabulary v, std::vector< std::string > constraints, std::size_t t, std::size_t n )
{
    GenerationRequest r{ v, {} };
    for ( const auto& c : constraints )
        r.constraints.push_back( parse_formula( c, r.vocabulary ) );
    r.trace_length = t;
    r.count = n;
    return r;
}

ProcessVocabulary ab() { return ProcessVocabulary{ { ActivitySignature{ "a" }, ActivitySignature{ "b" } } }; }

std::set< std::vector< Event > > oracle_models( const ProcessVocabulary& v, const std::vector< Formula >& constraints,
                                                std::size_t t )
{
    std::set< std::vector< Event > > out;
    ref::for_each_trace( ref::all_events( v ), t, [ & ]( const Trace& trace ) {
        for ( const auto& c : constraints )
            if ( !ref::oracle_satisfies( v, trace, c ) )
                return;
        out.insert( trace.events );
    } );
    return out;
}

} // namespace

TEST( Generate, ResponseOfLengthOne )
{
    auto r = request( ab(), { "G(a -> F b)" }, 1, 5 );
    r.mode = GenerationMode::Exhaustive;
    const auto result = generate( r );
    EXPECT_EQ( result.status, GenerationStatus::Exhausted );
    ASSERT_EQ( result.log.size(), 1u );
    EXPECT_EQ( result.log.traces[ 0 ].events, ( std::vector< Event >{ Event{ "b", {} } } ) );
    EXPECT_EQ( result.log.traces[ 0 ].id, "t1" );
}

TEST( Generate, RespectsDataConditions )
{
    ProcessVocabulary v{ { ActivitySignature{ "a", { Attribute{ "n", AttributeType::int_range( 0, 9 ) } } } } };
    for ( auto mode : { GenerationMode::Random, GenerationMode::Exhaustive } )
    {
        auto r = request( v, { "G(a -> n < 5)" }, 2, 25 );
        r.mode = mode;
        const auto result = generate( r );
        EXPECT_EQ( result.status, GenerationStatus::Complete );
        EXPECT_EQ( result.log.size(), 25u );
        for ( const auto& t : result.log.traces )
            for ( const auto& e : t.events )
                EXPECT_LT( std::get< std::int64_t >( e.values[ 0 ] ), 5 );
    }
}

TEST( Generate, ContradictionIsInfeasible )
{
    for ( std::size_t t = 1; t <= 4; ++t )
    {
        const auto result = generate( request( ab(), { "F a", "G !a" }, t, 3 ) );
        EXPECT_EQ( result.status, GenerationStatus::Infeasible );
        EXPECT_TRUE( result.log.traces.empty() );
    }
}

TEST( Generate, CountsModels )
{
    EXPECT_EQ( count_models( ab(), {}, 2 ), 4u );
    const auto v = ab();
    EXPECT_EQ( count_models( v, { parse_formula( "G(a -> F b)", v ) }, 1 ), 1u );
    ProcessVocabulary w{ { ActivitySignature{ "a", { Attribute{ "n", AttributeType::int_range( 0, 1 ) } } } } };
    EXPECT_EQ( count_models( w, {}, 1 ), 2u );
    ProcessVocabulary big{ { ActivitySignature{ "a", { Attribute{ "n", AttributeType::int_range( 0, 1000000 ) } } } } };
    EXPECT_THROW( count_models( big, {}, 1 ), UsageError );
}

TEST( Generate, ExhaustiveMatchesBruteForce )
{
    ProcessVocabulary v{ { ActivitySignature{ "a", { Attribute{ "n", AttributeType::int_range( 0, 3 ) } } },
                           ActivitySignature{ "b", { Attribute{ "n", AttributeType::int_range( 0, 3 ) } } },
                           ActivitySignature{ "c" } } };
    ref::FormulaShape shape{ { "a", "b", "c" }, "n", 0, 3, {} };
    std::mt19937_64 rng{ 8 };
    for ( int i = 0; i < 15; ++i )
    {
        std::vector< Formula > constraints;
        for ( std::size_t k = 0, m = 1 + rng() % 3; k < m; ++k )
            constraints.push_back( ref::random_formula( shape, 3, rng ) );
        const std::size_t t = 1 + rng() % 3;
        const auto expected = oracle_models( v, constraints, t );

        GenerationRequest r{ v, constraints };
        r.trace_length = t;
        r.count = 100000;
        r.mode = GenerationMode::Exhaustive;
        const auto result = generate( r );
        std::set< std::vector< Event > > got;
        for ( const auto& trace : result.log.traces )
            got.insert( trace.events );
        EXPECT_EQ( got.size(), result.log.size() );
        EXPECT_EQ( got, expected );
        EXPECT_EQ( count_models( v, constraints, t ), expected.size() );
    }
}

TEST( Generate, RandomTracesAreValidUniqueAndReproducible )
{
    ProcessVocabulary v{ { ActivitySignature{ "a", { Attribute{ "n", AttributeType::int_range( 0, 9 ) } } },
                           ActivitySignature{ "b" }, ActivitySignature{ "c" } } };
    auto r = request( v, { "G((a && n < 5) -> F b)", "F c", "G(c -> X !c)" }, 8, 200 );
    r.seed = 42;
    const auto one = generate( r );
    r.jobs = 4;
    const auto four = generate( r );
    EXPECT_EQ( one.log, four.log );
    std::set< std::vector< Event > > seen;
    for ( const auto& t : one.log.traces )
    {
        seen.insert( t.events );
        for ( const auto& c : r.constraints )
            ASSERT_TRUE( ref::oracle_satisfies( v, t, c ) );
    }
    EXPECT_EQ( seen.size(), 200u );
    r.seed = 43;
    EXPECT_NE( generate( r ).log, one.log );
}

TEST( Generate, ExhaustsSmallSpaces )
{
    auto r = request( ab(), { "F b" }, 2, 10 );
    const auto result = generate( r );
    EXPECT_EQ( result.status, GenerationStatus::Exhausted );
    EXPECT_EQ( result.log.size(), 3u );

    r.unique = false;
    const auto repeated = generate( r );
    EXPECT_EQ( repeated.status, GenerationStatus::Complete );
    EXPECT_EQ( repeated.log.size(), 10u );
}

TEST( Generate, RangesOverLengths )
{
    auto r = request( ab(), { "F b" }, 1, 2 );
    r.unique = false;
    const auto result = generate_range( r, 2, 4 );
    ASSERT_EQ( result.log.size(), 6u );
    EXPECT_EQ( result.log.traces[ 0 ].size(), 2u );
    EXPECT_EQ( result.log.traces[ 5 ].size(), 4u );
    EXPECT_EQ( validate_log( r.vocabulary, result.log ), std::vector< Violation >{} );
}

TEST( Generate, RejectsBadRequests )
{
    EXPECT_THROW( generate( request( ab(), {}, 0, 1 ) ), UsageError );
    EXPECT_THROW( generate( request( ab(), {}, 1, 0 ) ), UsageError );
    EXPECT_THROW( generate( request( ab(), { "F ?A" }, 1, 1 ) ), UsageError );
    ProcessVocabulary big{ { ActivitySignature{ "a", { Attribute{ "n", AttributeType::int_range( 0, 999 ) } } } } };
    auto r = request( big, {}, 1, 1 );
    r.mode = GenerationMode::Exhaustive;
    EXPECT_THROW( generate( r ), UsageError );
}

TEST( Generate, LargeDomainsUseBoundaryValues )
{
    ProcessVocabulary v{ { ActivitySignature{ "a", { Attribute{ "n", AttributeType::int_range( 0, 1000 ) } } } } };
    const auto f = parse_formula( "G(n > 500 && n < 700)", v );
    const auto values = candidate_values( v[ 0 ].attributes()[ 0 ], { f }, 64 );
    auto has = [ & ]( std::int64_t x ) { return std::find( values.begin(), values.end(), Value{ x } ) != values.end(); };
    EXPECT_TRUE( has( 0 ) && has( 1000 ) && has( 500 ) && has( 501 ) && has( 699 ) && has( 700 ) );
    EXPECT_LT( values.size(), 20u );

    auto r = request( v, { "G(n > 500 && n < 700)" }, 3, 5 );
    const auto result = generate( r );
    EXPECT_EQ( result.status, GenerationStatus::Complete );
    for ( const auto& t : result.log.traces )
        EXPECT_TRUE( ref::oracle_satisfies( v, t, r.constraints[ 0 ] ) );
}

TEST( Generate, ReportsProgress )
{
    auto r = request( ab(), {}, 5, 20 );
    std::size_t last = 0;
    r.progress = [ & ]( std::size_t done ) { last = done; };
    generate( r );
    EXPECT_EQ( last, 20u );
}
