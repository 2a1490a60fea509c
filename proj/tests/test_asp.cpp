#include "dpm/asp.hpp"
#include "dpm/conformance.hpp"
#include "dpm/error.hpp"
#include "dpm/loggen.hpp"
#include "dpm/querycheck.hpp"
#include "support/oracle.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace dpm;

namespace {

std::string normalize( const std::string& text )
{
    std::string out;
    for ( char c : text )
        if ( !std::isspace( static_cast< unsigned char >( c ) ) )
            out += c;
    return out;
}

std::string join( const std::vector< std::string >& lines )
{
    std::string out;
    for ( const auto& l : lines )
        out += l + "\n";
    return out;
}

std::string read_file( const std::string& path )
{
    std::ifstream in( path );
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

ProcessVocabulary ab() { return ProcessVocabulary{ { ActivitySignature{ "a" }, ActivitySignature{ "b" } } }; }

ProcessVocabulary data()
{
    return ProcessVocabulary{ { ActivitySignature{ "a", { Attribute{ "n", AttributeType::int_range( 0, 9 ) } } },
                                ActivitySignature{ "b" } } };
}

const char* solver() { return std::getenv( "DPM_ASP_SOLVER" ); }

} // namespace

TEST( Asp, ResponseListingMatchesGolden )
{
    const auto v = ab();
    const auto lines = emit_automaton( compile( parse_formula( "G(a -> F b)", v ), v ), v );
    EXPECT_EQ( normalize( join( lines ) ), normalize( read_file( DPM_TEST_DATA "/response.lp" ) ) ) << join( lines );
}

TEST( Asp, DataConditionUsesHasVal )
{
    const auto v = data();
    const auto text = join( emit_automaton( compile( parse_formula( "G((a && n < 5) -> F b)", v ), v ), v ) );
    EXPECT_NE( text.find( "hold(1,1,T) :- trace(a,T), has_val(n,V,T), V<5." ), std::string::npos ) << text;
}

TEST( Asp, TrueAutomaton )
{
    const auto v = ab();
    const auto lines = emit_automaton( compile( Formula::truth(), v, 7 ), v );
    EXPECT_EQ( normalize( join( lines ) ),
               normalize( "init(7,s0). acc(7,s0). trans(7,s0,1,s0). hold(7,1,T) :- time(T)." ) );
}

TEST( Asp, RunRules )
{
    const auto single = join( emit_run_rules( false ) );
    EXPECT_NE( single.find( "state(I,S,0) :- init(I,S)." ), std::string::npos );
    EXPECT_NE( single.find( "state(I,S2,T) :- state(I,S,T-1), trans(I,S,F,S2), hold(I,F,T-1)." ), std::string::npos );
    EXPECT_NE( single.find( "#count" ), std::string::npos );
    const auto multi = join( emit_run_rules( true ) );
    EXPECT_NE( multi.find( "state(I,J,S,0) :- init(I,S), tr(J)." ), std::string::npos );
    EXPECT_TRUE( validate_asp( single ).empty() );
    EXPECT_TRUE( validate_asp( multi ).empty() );
}

TEST( Asp, QueryProgramDeclaresVariables )
{
    ProcessVocabulary v{ { ActivitySignature{ "a", { Attribute{ "number", AttributeType::int_range( 0, 9 ) } } },
                           ActivitySignature{ "b" } } };
    Log log{ { Trace{ { Event{ "a", { Value{ std::int64_t{ 3 } } } }, Event{ "b", {} } }, "x" } } };
    const auto program = emit_query( v, parse_formula( "G((?A1 && number < 5) -> F ?A2)", v ), log );
    const auto text = program.text();
    EXPECT_NE( text.find( "var(varA1)." ), std::string::npos );
    EXPECT_NE( text.find( "var(varA2)." ), std::string::npos );
    EXPECT_NE( text.find( "assgnmt" ), std::string::npos );
    EXPECT_TRUE( validate_asp( text ).empty() ) << validate_asp( text ).front();
    EXPECT_THROW( emit_query( v, parse_formula( "F ?A1", v ), Log{} ), UsageError );
}

TEST( Asp, EmittedProgramsAreWellFormed )
{
    ProcessVocabulary v{ { ActivitySignature{ "a", { Attribute{ "n", AttributeType::int_range( 0, 3 ) } } },
                           ActivitySignature{ "b", { Attribute{ "n", AttributeType::int_range( 0, 3 ) } } },
                           ActivitySignature{ "check in" } } };
    const auto events = ref::all_events( v );
    ref::FormulaShape shape{ { "a", "b", "check in" }, "n", 0, 3, {} };
    ref::FormulaShape qshape{ { "a", "b", "check in" }, "n", 0, 3, { "A1", "A2" } };
    std::mt19937_64 rng{ 77 };
    for ( int i = 0; i < 40; ++i )
    {
        std::vector< Formula > constraints{ ref::random_formula( shape, 4, rng ), ref::random_formula( shape, 3, rng ) };
        Log log;
        for ( int k = 0; k < 3; ++k )
            log.traces.push_back( ref::random_trace( events, 1 + rng() % 4, rng ) );
        for ( const auto& program : { emit_generation( v, constraints, 3 ), emit_conformance( v, constraints, log ),
                                      emit_query( v, ref::random_formula( qshape, 3, rng ), log ) } )
        {
            const auto problems = validate_asp( program.text() );
            ASSERT_TRUE( problems.empty() ) << problems.front() << "\n" << program.text();
        }
    }
}

TEST( Asp, ValidatorFindsProblems )
{
    EXPECT_TRUE( validate_asp( "p(a). q(X) :- p(X), not r(X)." ).empty() );
    EXPECT_FALSE( validate_asp( "p(a)" ).empty() );
    EXPECT_FALSE( validate_asp( "q(X) :- not p(X)." ).empty() );
    EXPECT_FALSE( validate_asp( "q(X :- p(X)." ).empty() );
    EXPECT_FALSE( validate_asp( "q(X) :- p(Y)." ).empty() );
}

TEST( Asp, QuotesConstants )
{
    EXPECT_EQ( asp_constant( "a" ), "a" );
    EXPECT_EQ( asp_constant( "check in" ), "\"check in\"" );
    EXPECT_EQ( asp_constant( "Big" ), "\"Big\"" );
}

TEST( Asp, DecodesSolverOutput )
{
    const auto v = data();
    SolverOutcome outcome{ true,
                           { { "trace(a,0)", "has_val(n,3,0)", "trace(b,1)" }, { "trace(b,1)", "trace(b,0)" } } };
    const auto traces = decode_traces( outcome, v );
    ASSERT_EQ( traces.size(), 2u );
    EXPECT_EQ( traces[ 0 ].events, ( std::vector< Event >{ Event{ "a", { Value{ std::int64_t{ 3 } } } }, Event{ "b", {} } } ) );
    EXPECT_EQ( traces[ 1 ].events, ( std::vector< Event >{ Event{ "b", {} }, Event{ "b", {} } } ) );

    SolverOutcome q{ true, { { "assgnmt(varA2,b)", "assgnmt(varA1,a)" }, { "assgnmt(varA1,b)", "assgnmt(varA2,b)" } } };
    const auto as = decode_assignments( q );
    ASSERT_EQ( as.size(), 2u );
    EXPECT_EQ( as[ 0 ], ( Assignment{ { "A1", "a" }, { "A2", "b" } } ) );
}

TEST( Asp, SolverAgreesOnGeneration )
{
    if ( !solver() )
        GTEST_SKIP() << "no ASP solver configured";
    const auto v = data();
    const std::vector< Formula > constraints{ parse_formula( "G((a && n < 5) -> F b)", v ) };
    const auto outcome = run_solver( solver(), emit_generation( v, constraints, 2 ) );
    std::set< std::vector< Event > > got;
    for ( const auto& t : decode_traces( outcome, v ) )
        got.insert( t.events );
    std::set< std::vector< Event > > expected;
    ref::for_each_trace( ref::all_events( v ), 2, [ & ]( const Trace& t ) {
        if ( ref::oracle_satisfies( v, t, constraints[ 0 ] ) )
            expected.insert( t.events );
    } );
    EXPECT_EQ( got, expected );
}

TEST( Asp, SolverAgreesOnConformance )
{
    if ( !solver() )
        GTEST_SKIP() << "no ASP solver configured";
    const auto v = data();
    const std::vector< Formula > constraints{ parse_formula( "G((a && n < 5) -> F b)", v ) };
    Log good{ { Trace{ { Event{ "a", { Value{ std::int64_t{ 3 } } } }, Event{ "b", {} } }, "g" } } };
    Log bad{ { Trace{ { Event{ "b", {} }, Event{ "a", { Value{ std::int64_t{ 3 } } } } }, "x" } } };
    EXPECT_TRUE( run_solver( solver(), emit_conformance( v, constraints, good ) ).satisfiable );
    EXPECT_FALSE( run_solver( solver(), emit_conformance( v, constraints, bad ) ).satisfiable );
}
