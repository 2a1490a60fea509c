#include "dpm/conformance.hpp"
#include "dpm/error.hpp"
#include "dpm/querycheck.hpp"
#include "support/oracle.hpp"

#include <gtest/gtest.h>

using namespace dpm;

namespace {

ProcessVocabulary vocabulary()
{
    return ProcessVocabulary{ { ActivitySignature{ "a", { Attribute{ "number", AttributeType::int_range( 0, 9 ) } } },
                                ActivitySignature{ "b" }, ActivitySignature{ "c" } } };
}

Event a( std::int64_t n ) { return Event{ "a", { Value{ n } } }; }
Event act( const char* name ) { return Event{ name, {} }; }
Trace trace_of( std::vector< Event > events ) { return Trace{ std::move( events ), std::nullopt }; }

std::set< Assignment > as_set( const QueryResult& r ) { return { r.assignments.begin(), r.assignments.end() }; }

} // namespace

TEST( Query, EnumeratesAssignments )
{
    ProcessVocabulary v{ { ActivitySignature{ "a" }, ActivitySignature{ "b" } } };
    EXPECT_EQ( enumerate_assignments( { "A1" }, v ),
               ( std::vector< Assignment >{ { { "A1", "a" } }, { { "A1", "b" } } } ) );
    EXPECT_EQ( enumerate_assignments( {}, v ), std::vector< Assignment >{ Assignment{} } );
    const auto four = enumerate_assignments( { "A1", "A2" }, v );
    ASSERT_EQ( four.size(), 4u );
    EXPECT_EQ( four.front(), ( Assignment{ { "A1", "a" }, { "A2", "a" } } ) );
    EXPECT_EQ( four[ 1 ], ( Assignment{ { "A1", "a" }, { "A2", "b" } } ) );
}

TEST( Query, ResponseQuery )
{
    const auto v = vocabulary();
    Log log{ { trace_of( { act( "c" ), a( 1 ), act( "b" ) } ), trace_of( { a( 2 ), act( "b" ) } ) } };
    const auto q = parse_formula( "G(?A1 -> F ?A2)", v );
    const auto result = query_check( log, q, v );
    const auto got = as_set( result );
    EXPECT_TRUE( got.count( { { "A1", "a" }, { "A2", "b" } } ) );
    EXPECT_FALSE( got.count( { { "A1", "a" }, { "A2", "c" } } ) );
    EXPECT_EQ( got, ref::oracle_query( v, log, q ) );
    EXPECT_EQ( result.variables, ( std::vector< std::string >{ "A1", "A2" } ) );
}

TEST( Query, VariableFreeQueryDegeneratesToConformance )
{
    const auto v = vocabulary();
    Log log{ { trace_of( { a( 1 ), act( "b" ) } ) } };
    const auto ok = query_check( log, parse_formula( "G(a -> F b)", v ), v );
    EXPECT_EQ( ok.assignments, std::vector< Assignment >{ Assignment{} } );
    const auto bad = query_check( log, parse_formula( "G(b -> F a)", v ), v );
    EXPECT_TRUE( bad.assignments.empty() );
}

TEST( Query, VacuousActivation )
{
    const auto v = vocabulary();
    Log log{ { trace_of( { a( 5 ), act( "c" ) } ), trace_of( { act( "b" ), a( 9 ) } ) } };
    const auto q = parse_formula( "G((?A1 && number < 5) -> F ?A2)", v );
    const auto got = as_set( query_check( log, q, v ) );
    for ( const auto& y : { "a", "b", "c" } )
        EXPECT_TRUE( got.count( { { "A1", "a" }, { "A2", y } } ) ) << y;
    EXPECT_EQ( got, ref::oracle_query( v, log, q ) );
}

TEST( Query, DiagnosticsCountSupport )
{
    const auto v = vocabulary();
    Log log{ { trace_of( { act( "b" ) } ), trace_of( { act( "c" ) } ), trace_of( { act( "b" ), act( "c" ) } ) } };
    QueryOptions options;
    options.diagnostics = true;
    const auto result = query_check( log, parse_formula( "F ?X", v ), v, options );
    ASSERT_EQ( result.support.size(), 3u );
    EXPECT_EQ( result.support[ 0 ].second, 0u );
    EXPECT_EQ( result.support[ 1 ].second, 2u );
    EXPECT_EQ( result.support[ 2 ].second, 2u );
    EXPECT_TRUE( result.assignments.empty() );
}

TEST( Query, MatchesBruteForceOnRandomInstances )
{
    const auto v = vocabulary();
    const auto events = ref::all_events( v );
    ref::FormulaShape shape{ { "a", "b", "c" }, "number", 0, 9, { "A1", "A2" } };
    std::mt19937_64 rng{ 17 };
    for ( int i = 0; i < 100; ++i )
    {
        const auto q = ref::random_formula( shape, 3, rng );
        Log log;
        for ( int k = 0; k < 4; ++k )
            log.traces.push_back( ref::random_trace( events, 1 + rng() % 4, rng ) );
        QueryOptions options;
        options.jobs = 1 + i % 3;
        ASSERT_EQ( as_set( query_check( log, q, v, options ) ), ref::oracle_query( v, log, q ) ) << to_string( q );
    }
}

TEST( Query, RejectsBadInput )
{
    const auto v = vocabulary();
    EXPECT_THROW( query_check( Log{}, parse_formula( "F ?A", v ), v ), UsageError );
    Log bad{ { trace_of( { a( 11 ) } ) } };
    EXPECT_THROW( query_check( bad, parse_formula( "F ?A", v ), v ), ModelError );
}
