#include "dpm/automaton.hpp"
#include "dpm/error.hpp"
#include "support/iso.hpp"
#include "support/oracle.hpp"

#include <gtest/gtest.h>

using namespace dpm;

namespace {

ProcessVocabulary small_vocabulary()
{
    return ProcessVocabulary{ {
        ActivitySignature{ "a", { Attribute{ "n", AttributeType::int_range( 0, 3 ) } } },
        ActivitySignature{ "b", { Attribute{ "n", AttributeType::int_range( 0, 3 ) } } },
        ActivitySignature{ "c" },
    } };
}

} // namespace

TEST( Automaton, ResponseMatchesTheTwoStateAutomaton )
{
    ProcessVocabulary v{ { ActivitySignature{ "a" }, ActivitySignature{ "b" } } };
    const auto automaton = compile( parse_formula( "G(a -> F b)", v ), v );
    EXPECT_TRUE( ref::isomorphic( ref::shape_of( automaton ), ref::response_shape() ) )
        << dump( automaton );
}

TEST( Automaton, DataAwareResponseSplitsTheLoop )
{
    ProcessVocabulary v{ { ActivitySignature{ "a", { Attribute{ "n", AttributeType::int_range( 0, 9 ) } } },
                           ActivitySignature{ "b" } } };
    const auto automaton = compile( parse_formula( "G((a && n < 5) -> F b)", v ), v );
    const ref::Shape expected{ 2,
                                   0,
                                   { 0 },
                                   { { 0, { "!a" }, 0 },
                                     { 0, { "!(n < 5)" }, 0 },
                                     { 0, { "a", "n < 5" }, 1 },
                                     { 1, { "!b" }, 1 },
                                     { 1, { "b" }, 0 } } };
    EXPECT_TRUE( ref::isomorphic( ref::shape_of( automaton ), expected ) ) << dump( automaton );
}

TEST( Automaton, RunsOnExampleTraces )
{
    ProcessVocabulary v{ { ActivitySignature{ "a" }, ActivitySignature{ "b" } } };
    const auto automaton = compile( parse_formula( "G(a -> F b)", v ), v );
    auto run = [ & ]( std::vector< std::string > acts ) {
        Trace t;
        for ( auto& x : acts )
            t.events.push_back( Event{ x, {} } );
        return accepts( automaton, v, t );
    };
    EXPECT_TRUE( run( { "a", "b" } ) );
    EXPECT_FALSE( run( { "a", "a" } ) );
    EXPECT_TRUE( run( { "b", "b", "b" } ) );
    EXPECT_FALSE( run( { "b", "a" } ) );
    StateSet start{ automaton.initial() };
    EXPECT_EQ( step( automaton, v, start, Event{ "a", {} } ).size(), 1u );
}

TEST( Automaton, AgreesWithReferenceSemantics )
{
    const auto v = small_vocabulary();
    const auto events = ref::all_events( v );
    ref::FormulaShape shape{ { "a", "b", "c" }, "n", 0, 3, {} };
    std::mt19937_64 rng{ 2024 };
    for ( int i = 0; i < 60; ++i )
    {
        const auto f = ref::random_formula( shape, 4, rng );
        const auto automaton = compile( f, v );
        for ( std::size_t len = 1; len <= 2; ++len )
            ref::for_each_trace( events, len, [ & ]( const Trace& t ) {
                ASSERT_EQ( accepts( automaton, v, t ), ref::oracle_satisfies( v, t, f ) ) << to_string( f );
            } );
        for ( int k = 0; k < 50; ++k )
        {
            const auto t = ref::random_trace( events, 1 + rng() % 6, rng );
            ASSERT_EQ( accepts( automaton, v, t ), ref::oracle_satisfies( v, t, f ) ) << to_string( f );
        }
    }
}

TEST( Automaton, ProgressionIsSound )
{
    const auto v = small_vocabulary();
    const auto events = ref::all_events( v );
    ref::FormulaShape shape{ { "a", "b", "c" }, "n", 0, 3, {} };
    std::mt19937_64 rng{ 99 };
    for ( int i = 0; i < 100; ++i )
    {
        const auto f = ref::random_formula( shape, 3, rng );
        for ( int k = 0; k < 20; ++k )
        {
            const auto t = ref::random_trace( events, 2 + rng() % 4, rng );
            Trace rest{ { t.events.begin() + 1, t.events.end() }, std::nullopt };
            const auto residual = progress( v, f, t.events.front() );
            ASSERT_EQ( ref::oracle_satisfies( v, rest, residual ), ref::oracle_satisfies( v, t, f ) )
                << to_string( f ) << " residual " << to_string( residual );
        }
    }
}

TEST( Automaton, ProductAcceptsTheIntersection )
{
    const auto v = small_vocabulary();
    const auto events = ref::all_events( v );
    const auto f = parse_formula( "G(a -> F b)", v );
    const auto g = parse_formula( "F(c && X(n > 1))", v );
    std::vector< Automaton > parts{ compile( f, v, 1 ), compile( g, v, 2 ) };
    const auto p = product( parts, v );
    ref::for_each_trace( events, 3, [ & ]( const Trace& t ) {
        ASSERT_EQ( accepts( p, v, t ), ref::oracle_satisfies( v, t, f ) && ref::oracle_satisfies( v, t, g ) );
    } );
    EXPECT_THROW( product( std::span< const Automaton >{}, v ), UsageError );
}

TEST( Automaton, GuardsAreConjunctionsOfLiterals )
{
    const auto v = small_vocabulary();
    const auto automaton = compile( parse_formula( "(a U (b && n >= 2)) || G !c", v ), v );
    for ( const auto& t : automaton.transitions() )
        EXPECT_TRUE( satisfiable( v, t.guard ) );
    EXPECT_FALSE( satisfiable( v, { EventLiteral{ ActivityAtom{ "a" }, true }, EventLiteral{ ActivityAtom{ "b" }, true } } ) );
    EXPECT_FALSE( satisfiable( v, { EventLiteral{ AttrCmpConst{ "n", CmpOp::Lt, Value{ std::int64_t{ 1 } } }, true },
                                    EventLiteral{ AttrCmpConst{ "n", CmpOp::Gt, Value{ std::int64_t{ 2 } } }, true } } ) );
}

TEST( Automaton, VariablesStaySymbolic )
{
    const auto v = small_vocabulary();
    const auto q = parse_formula( "G(?A1 -> F ?A2)", v );
    const auto automaton = compile( q, v );
    const auto events = ref::all_events( v );
    for ( const auto& x : v.activities() )
        for ( const auto& y : v.activities() )
        {
            Assignment as{ { "A1", x.name() }, { "A2", y.name() } };
            ref::for_each_trace( events, 2, [ & ]( const Trace& t ) {
                ASSERT_EQ( accepts( automaton, v, t, &as ), ref::oracle_satisfies( v, t, q, &as ) );
            } );
        }
}

TEST( Automaton, ConstructorChecksEndpoints )
{
    EXPECT_THROW( Automaton( 1, 0, { Transition{ 0, {}, 3 } }, { true } ), UsageError );
    EXPECT_THROW( Automaton( 1, 2, {}, { true } ), UsageError );
}

TEST( Automaton, TrueHasOneAcceptingLoop )
{
    ProcessVocabulary v{ { ActivitySignature{ "a" } } };
    const auto automaton = compile( Formula::truth(), v );
    ASSERT_EQ( automaton.num_states(), 1u );
    EXPECT_TRUE( automaton.is_accepting( 0 ) );
    ASSERT_EQ( automaton.transitions().size(), 1u );
    EXPECT_TRUE( automaton.transitions()[ 0 ].guard.empty() );
    EXPECT_TRUE( step( automaton, v, {}, Event{ "a", {} } ).empty() );
}

TEST( Automaton, GuardsHoldOnSingleEvents )
{
    const auto v = small_vocabulary();
    const Event a3{ "a", { Value{ std::int64_t{ 3 } } } };
    const EventFormula active{ EventLiteral{ ActivityAtom{ "a" }, true },
                               EventLiteral{ AttrCmpConst{ "n", CmpOp::Lt, Value{ std::int64_t{ 5 } } }, true } };
    EXPECT_TRUE( guard_holds( v, active, a3 ) );
    EXPECT_TRUE( guard_holds( v, { EventLiteral{ ActivityAtom{ "b" }, false } }, a3 ) );
    Assignment as{ { "A1", "b" } };
    EXPECT_FALSE( guard_holds( v, { EventLiteral{ VarAtom{ "A1" }, true } }, a3, &as ) );
}

TEST( Automaton, ResponseAndEventuallyProduct )
{
    ProcessVocabulary v{ { ActivitySignature{ "a" }, ActivitySignature{ "b" }, ActivitySignature{ "c" } } };
    std::vector< Automaton > parts{ compile( parse_formula( "G(a -> F b)", v ), v ),
                                    compile( parse_formula( "F c", v ), v ) };
    const auto p = product( parts, v );
    auto t = []( std::vector< std::string > acts ) {
        Trace out;
        for ( auto& x : acts )
            out.events.push_back( Event{ x, {} } );
        return out;
    };
    EXPECT_TRUE( accepts( p, v, t( { "a", "b", "c" } ) ) );
    EXPECT_FALSE( accepts( p, v, t( { "a", "b" } ) ) );
}
