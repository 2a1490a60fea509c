#include "dpm/asp.hpp"

#include "dpm/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace dpm {

std::string_view to_string( AspProblem problem )
{
    switch ( problem )
    {
    case AspProblem::Generation: return "generation";
    case AspProblem::Conformance: return "conformance";
    case AspProblem::Query: return "query";
    }
    return "";
}

std::string AspProgram::text() const
{
    std::string out;
    for ( const auto& s : statements )
        out += s + "\n";
    return out;
}

std::string asp_constant( std::string_view name )
{
    const bool plain = !name.empty() && std::islower( static_cast< unsigned char >( name[ 0 ] ) ) &&
                       std::all_of( name.begin(), name.end(), []( char c ) {
                           return std::isalnum( static_cast< unsigned char >( c ) ) || c == '_';
                       } ) &&
                       name != "not";
    if ( plain )
        return std::string{ name };
    std::string out = "\"";
    for ( char c : name )
    {
        if ( c == '"' || c == '\\' )
            out += '\\';
        if ( c == '\n' )
        {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + '"';
}

namespace {

std::string value_constant( const Value& v )
{
    if ( const auto* i = std::get_if< std::int64_t >( &v ) )
        return std::to_string( *i );
    return asp_constant( std::get< std::string >( v ) );
}

std::string variable_constant( const std::string& name ) { return asp_constant( "var" + name ); }

std::string state_name( StateId q ) { return "s" + std::to_string( q ); }

std::string asp_op( CmpOp op )
{
    switch ( op )
    {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    }
    return "=";
}

// Each attribute must have one type across the vocabulary.
const AttributeType& attribute_type( const ProcessVocabulary& vocabulary, const std::string& attribute )
{
    const auto* type = vocabulary.uniform_attribute_type( attribute );
    if ( !type )
    {
        if ( vocabulary.declares_attribute( attribute ) )
            throw UsageError( "attribute " + attribute + " has different types on different activities" );
        throw UsageError( "unknown attribute " + attribute );
    }
    return *type;
}

// Predicate spellings for single- and multi-trace programs.
struct Shape
{
    bool multi = false;

    std::string hold( int automaton, const std::string& index, const std::string& time = "T" ) const
    {
        return "hold(" + std::to_string( automaton ) + "," + index + ( multi ? ",J," : "," ) + time + ")";
    }
    std::string trace( const std::string& activity ) const
    {
        return multi ? "trace(J," + activity + ",T)" : "trace(" + activity + ",T)";
    }
    std::string has_val( const std::string& attribute, const std::string& value ) const
    {
        return multi ? "has_val(J," + attribute + "," + value + ",T)" : "has_val(" + attribute + "," + value + ",T)";
    }
    std::string domain() const { return multi ? "time(T), tr(J)" : "time(T)"; }
};

using Body = std::vector< std::string >;

// Builds rule bodies for one conjunction of literals; a conjunction may need
// several alternative bodies (orderings over enumerations).
class GuardWriter
{
public:
    GuardWriter( const ProcessVocabulary& vocabulary, const Shape& shape, int automaton,
                 std::vector< std::string >& aux_rules, int& next_aux )
        : _vocabulary{ vocabulary }, _shape{ shape }, _automaton{ automaton }, _aux_rules{ aux_rules },
          _next_aux{ next_aux } {}

    std::vector< Body > bodies( const EventFormula& cube )
    {
        _values.clear();
        std::vector< Body > alternatives{ Body{} };
        auto extend = [ & ]( const std::vector< Body >& options ) {
            std::vector< Body > out;
            for ( const auto& a : alternatives )
                for ( const auto& o : options )
                {
                    Body b = a;
                    b.insert( b.end(), o.begin(), o.end() );
                    out.push_back( std::move( b ) );
                }
            alternatives = std::move( out );
        };

        extend( { activity_part( cube ) } );
        bool needs_domain = alternatives.front().empty();
        for ( const auto& l : cube )
        {
            if ( std::holds_alternative< ActivityAtom >( l.atom ) || std::holds_alternative< VarAtom >( l.atom ) ||
                 std::holds_alternative< TrueAtom >( l.atom ) )
                continue;
            if ( l.positive )
            {
                extend( comparison( l.atom ) );
                needs_domain = false;
            }
        }
        std::vector< std::string > negated;
        for ( const auto& l : cube )
            if ( !l.positive && !std::holds_alternative< ActivityAtom >( l.atom ) &&
                 !std::holds_alternative< VarAtom >( l.atom ) )
                negated.push_back( "not " + _shape.hold( _automaton, std::to_string( aux_index( l.atom ) ) ) );
        for ( auto& b : alternatives )
        {
            b.insert( b.end(), negated.begin(), negated.end() );
            if ( needs_domain )
                b.push_back( _shape.domain() );
        }
        return alternatives;
    }

private:
    std::string fresh_value()
    {
        ++_fresh;
        return _fresh == 1 ? "V" : "V" + std::to_string( _fresh );
    }

    std::string value_of( const std::string& attribute, Body& body )
    {
        if ( auto it = _values.find( attribute ); it != _values.end() )
            return it->second;
        const std::string v = fresh_value();
        _values[ attribute ] = v;
        body.push_back( _shape.has_val( asp_constant( attribute ), v ) );
        return v;
    }

    Body activity_part( const EventFormula& cube )
    {
        _fresh = 0;
        _witness = 0;
        std::vector< std::string > positive_acts, negative_acts, positive_vars, negative_vars;
        for ( const auto& l : cube )
        {
            if ( const auto* a = std::get_if< ActivityAtom >( &l.atom ) )
                ( l.positive ? positive_acts : negative_acts ).push_back( asp_constant( a->name ) );
            else if ( const auto* v = std::get_if< VarAtom >( &l.atom ) )
                ( l.positive ? positive_vars : negative_vars ).push_back( variable_constant( v->name ) );
        }
        Body body;
        std::string current;
        if ( !positive_acts.empty() )
        {
            current = positive_acts.front();
            body.push_back( _shape.trace( current ) );
            for ( std::size_t i = 1; i < positive_acts.size(); ++i )
                body.push_back( current + " = " + positive_acts[ i ] );
            for ( const auto& b : negative_acts )
                if ( b != current )
                    body.push_back( current + " != " + b );
        }
        else if ( !positive_vars.empty() || !negative_acts.empty() || !negative_vars.empty() )
        {
            current = "A";
            body.push_back( _shape.trace( current ) );
            if ( positive_vars.empty() )
                body.push_back( "act(A)" );
            for ( const auto& b : negative_acts )
                body.push_back( "A != " + b );
        }
        for ( const auto& v : positive_vars )
            body.push_back( "assgnmt(" + v + "," + current + ")" );
        for ( const auto& v : negative_vars )
        {
            const std::string w = ++_witness == 1 ? "W" : "W" + std::to_string( _witness );
            body.push_back( "assgnmt(" + v + "," + w + ")" );
            body.push_back( current + " != " + w );
        }
        return body;
    }

    std::vector< Body > comparison( const Atom& atom )
    {
        std::vector< Body > out;
        if ( const auto* c = std::get_if< AttrCmpConst >( &atom ) )
        {
            const auto& type = attribute_type( _vocabulary, c->attribute );
            Body base;
            const std::string v = value_of( c->attribute, base );
            if ( type.is_int() )
            {
                if ( const auto* k = std::get_if< std::int64_t >( &c->constant ) )
                {
                    base.push_back( v + asp_op( c->op ) + std::to_string( *k ) );
                    out.push_back( base );
                }
                return out;
            }
            const auto* k = std::get_if< std::string >( &c->constant );
            const auto kp = k ? type.position( *k ) : std::nullopt;
            if ( !kp )
                return out;
            const auto& values = type.enumeration().values;
            for ( std::size_t i = 0; i < values.size(); ++i )
                if ( compare( static_cast< std::int64_t >( i ), c->op, static_cast< std::int64_t >( *kp ) ) )
                {
                    Body b = base;
                    b.push_back( v + " = " + asp_constant( values[ i ] ) );
                    out.push_back( std::move( b ) );
                }
            return out;
        }
        const auto& c = std::get< AttrCmpAttr >( atom );
        const auto& lt = attribute_type( _vocabulary, c.lhs );
        const auto& rt = attribute_type( _vocabulary, c.rhs );
        Body base;
        const std::string lv = value_of( c.lhs, base );
        const std::string rv = value_of( c.rhs, base );
        if ( lt.is_int() && rt.is_int() )
        {
            base.push_back( lv + asp_op( c.op ) + rv );
            out.push_back( base );
        }
        else if ( lt.is_enum() && rt.is_enum() && ( c.op == CmpOp::Eq || !( lt == rt ) ) )
        {
            if ( c.op == CmpOp::Eq )
            {
                base.push_back( lv + " = " + rv );
                out.push_back( base );
            }
        }
        else if ( lt.is_enum() && lt == rt )
        {
            const auto& values = lt.enumeration().values;
            for ( std::size_t i = 0; i < values.size(); ++i )
                for ( std::size_t j = 0; j < values.size(); ++j )
                    if ( compare( static_cast< std::int64_t >( i ), c.op, static_cast< std::int64_t >( j ) ) )
                    {
                        Body b = base;
                        b.push_back( lv + " = " + asp_constant( values[ i ] ) );
                        b.push_back( rv + " = " + asp_constant( values[ j ] ) );
                        out.push_back( std::move( b ) );
                    }
        }
        return out;
    }

    // Index of an auxiliary guard holding exactly when the atom does.
    int aux_index( const Atom& atom )
    {
        if ( auto it = _aux.find( atom ); it != _aux.end() )
            return it->second;
        const int index = _next_aux++;
        _aux.emplace( atom, index );
        const auto saved_values = _values;
        const auto saved_fresh = _fresh;
        _values.clear();
        _fresh = 0;
        for ( const auto& body : comparison( atom ) )
            _aux_rules.push_back( rule( _shape.hold( _automaton, std::to_string( index ) ), body ) );
        _values = saved_values;
        _fresh = saved_fresh;
        return index;
    }

public:
    static std::string rule( const std::string& head, const Body& body )
    {
        if ( body.empty() )
            return head + ".";
        std::string out = head + " :- ";
        for ( std::size_t i = 0; i < body.size(); ++i )
            out += ( i ? ", " : "" ) + body[ i ];
        return out + ".";
    }

private:
    const ProcessVocabulary& _vocabulary;
    const Shape& _shape;
    int _automaton;
    std::vector< std::string >& _aux_rules;
    int& _next_aux;
    std::map< std::string, std::string > _values;
    int _fresh = 0;
    int _witness = 0;
    std::map< Atom, int > _aux;
};

struct EdgeGroup
{
    StateId source;
    StateId target;
    std::vector< EventFormula > cubes;
};

bool cube_holds( const EventFormula& cube, const std::vector< Atom >& atoms, std::uint32_t valuation )
{
    for ( const auto& l : cube )
    {
        const auto i = std::find( atoms.begin(), atoms.end(), l.atom ) - atoms.begin();
        if ( ( ( ( valuation >> i ) & 1u ) != 0 ) != l.positive )
            return false;
    }
    return true;
}

// Over every consistent valuation of their atoms, exactly one of the two guards holds.
bool complementary( const ProcessVocabulary& vocabulary, const EdgeGroup& a, const EdgeGroup& b )
{
    std::vector< Atom > atoms;
    for ( const auto* g : { &a, &b } )
        for ( const auto& cube : g->cubes )
            for ( const auto& l : cube )
                if ( std::find( atoms.begin(), atoms.end(), l.atom ) == atoms.end() )
                    atoms.push_back( l.atom );
    if ( atoms.size() > 16 )
        return false;
    for ( std::uint32_t v = 0; v < ( 1u << atoms.size() ); ++v )
    {
        EventFormula literals;
        for ( std::size_t i = 0; i < atoms.size(); ++i )
            literals.push_back( { atoms[ i ], ( ( v >> i ) & 1u ) != 0 } );
        if ( !satisfiable( vocabulary, literals ) )
            continue;
        auto any = [ & ]( const EdgeGroup& g ) {
            return std::any_of( g.cubes.begin(), g.cubes.end(),
                                [ & ]( const EventFormula& c ) { return cube_holds( c, atoms, v ); } );
        };
        if ( any( a ) == any( b ) )
            return false;
    }
    return true;
}

std::vector< std::string > emit_automaton( const Automaton& automaton, const ProcessVocabulary& vocabulary,
                                           const Shape& shape )
{
    const int id = automaton.index();
    const std::string I = std::to_string( id );
    std::vector< std::string > out;
    out.push_back( "init(" + I + "," + state_name( automaton.initial() ) + ")." );
    for ( StateId q : automaton.accepting_states() )
        out.push_back( "acc(" + I + "," + state_name( q ) + ")." );

    std::map< std::pair< StateId, StateId >, std::vector< EventFormula > > by_edge;
    for ( const auto& t : automaton.transitions() )
        by_edge[ { t.source, t.target } ].push_back( t.guard );
    std::vector< EdgeGroup > groups;
    for ( const auto& [ edge, cubes ] : by_edge )
        if ( edge.first != edge.second )
            groups.push_back( { edge.first, edge.second, cubes } );
    for ( const auto& [ edge, cubes ] : by_edge )
        if ( edge.first == edge.second )
            groups.push_back( { edge.first, edge.second, cubes } );

    std::vector< std::string > aux_rules;
    int next_aux = static_cast< int >( groups.size() ) + 1;
    GuardWriter writer{ vocabulary, shape, id, aux_rules, next_aux };

    for ( std::size_t k = 0; k < groups.size(); ++k )
    {
        const auto& g = groups[ k ];
        const std::string index = std::to_string( k + 1 );
        out.push_back( "trans(" + I + "," + state_name( g.source ) + "," + index + "," + state_name( g.target ) + ")." );
        const std::string head = shape.hold( id, index );

        std::optional< std::size_t > complement_of;
        for ( std::size_t j = 0; j < k && !complement_of; ++j )
        {
            const auto& e = groups[ j ];
            if ( e.source == g.source && e.source != e.target && automaton.is_accepting( e.source ) &&
                 !automaton.is_accepting( e.target ) && complementary( vocabulary, e, g ) )
                complement_of = j;
        }
        if ( complement_of )
        {
            out.push_back( GuardWriter::rule(
                head, { "not " + shape.hold( id, std::to_string( *complement_of + 1 ) ), shape.domain() } ) );
            continue;
        }
        for ( const auto& cube : g.cubes )
            for ( const auto& body : writer.bodies( cube ) )
                out.push_back( GuardWriter::rule( head, body ) );
    }
    out.insert( out.end(), aux_rules.begin(), aux_rules.end() );
    return out;
}

std::vector< std::string > vocabulary_facts( const ProcessVocabulary& vocabulary )
{
    std::vector< std::string > out;
    std::map< std::string, const AttributeType* > attributes;
    for ( const auto& a : vocabulary.activities() )
        out.push_back( "act(" + asp_constant( a.name() ) + ")." );
    for ( const auto& a : vocabulary.activities() )
        for ( const auto& attr : a.attributes() )
        {
            out.push_back( "has_attr(" + asp_constant( a.name() ) + "," + asp_constant( attr.name ) + ")." );
            attributes.emplace( attr.name, &attribute_type( vocabulary, attr.name ) );
        }
    for ( const auto& [ name, type ] : attributes )
    {
        const std::string n = asp_constant( name );
        if ( type->is_int() )
            out.push_back( "val(" + n + "," + std::to_string( type->range().lo ) + ".." +
                           std::to_string( type->range().hi ) + ")." );
        else
            for ( const auto& v : type->enumeration().values )
                out.push_back( "val(" + n + "," + asp_constant( v ) + ")." );
    }
    return out;
}

void emit_constraints( std::vector< std::string >& out, const ProcessVocabulary& vocabulary,
                       const std::vector< Formula >& formulas, const Shape& shape )
{
    Progression progression{ vocabulary };
    for ( std::size_t i = 0; i < formulas.size(); ++i )
    {
        out.push_back( "% constraint " + std::to_string( i + 1 ) + ": " + to_string( formulas[ i ] ) );
        const auto automaton = compile( progression, formulas[ i ], static_cast< int >( i + 1 ) );
        const auto part = emit_automaton( automaton, vocabulary, shape );
        out.insert( out.end(), part.begin(), part.end() );
    }
}

void emit_log( std::vector< std::string >& out, const Log& log )
{
    std::size_t longest = 0;
    for ( std::size_t j = 0; j < log.size(); ++j )
    {
        const auto& trace = log.traces[ j ];
        const std::string J = std::to_string( j + 1 );
        out.push_back( "% trace " + J + ( trace.id ? ": " + *trace.id : std::string{} ) );
        out.push_back( "tr(" + J + ")." );
        out.push_back( "tlength(" + J + "," + std::to_string( trace.size() ) + ")." );
        longest = std::max( longest, trace.size() );
    }
    for ( std::size_t j = 0; j < log.size(); ++j )
    {
        const auto& trace = log.traces[ j ];
        const std::string J = std::to_string( j + 1 );
        for ( std::size_t t = 0; t < trace.size(); ++t )
        {
            const auto& e = trace.events[ t ];
            const std::string T = std::to_string( t );
            out.push_back( "trace(" + J + "," + asp_constant( e.activity ) + "," + T + ")." );
        }
    }
    if ( longest > 0 )
        out.push_back( "time(0.." + std::to_string( longest - 1 ) + ")." );
}

void emit_payload( std::vector< std::string >& out, const ProcessVocabulary& vocabulary, const Log& log )
{
    for ( std::size_t j = 0; j < log.size(); ++j )
    {
        const auto& trace = log.traces[ j ];
        const std::string J = std::to_string( j + 1 );
        for ( std::size_t t = 0; t < trace.size(); ++t )
        {
            const auto& e = trace.events[ t ];
            const auto* signature = vocabulary.find( e.activity );
            for ( std::size_t i = 0; i < e.values.size(); ++i )
                out.push_back( "has_val(" + J + "," + asp_constant( signature->attributes()[ i ].name ) + "," +
                               value_constant( e.values[ i ] ) + "," + std::to_string( t ) + ")." );
        }
    }
}

void check_log_valid( const ProcessVocabulary& vocabulary, const Log& log )
{
    if ( auto violations = validate_log( vocabulary, log ); !violations.empty() )
        throw ModelError( "invalid log: " + violations.front().message );
}

} // namespace

std::vector< std::string > emit_automaton( const Automaton& automaton, const ProcessVocabulary& vocabulary,
                                           bool multi_trace )
{
    return emit_automaton( automaton, vocabulary, Shape{ multi_trace } );
}

std::vector< std::string > emit_run_rules( bool multi_trace )
{
    if ( multi_trace )
        return {
            "state(I,J,S,0) :- init(I,S), tr(J).",
            "state(I,J,S2,T) :- state(I,J,S,T-1), trans(I,S,F,S2), hold(I,F,J,T-1).",
            "% every automaton ends every trace in an accepting state",
            "% (literal form: :- {state(I,S,T): not acc(I,S), tlength(T)} = 0.)",
            ":- init(I,_), tr(J), tlength(J,T), #count{ S : state(I,J,S,T), acc(I,S) } = 0.",
        };
    return {
        "state(I,S,0) :- init(I,S).",
        "state(I,S2,T) :- state(I,S,T-1), trans(I,S,F,S2), hold(I,F,T-1).",
        "% every automaton ends in an accepting state",
        "% (literal form: :- {state(I,S,T): not acc(I,S), tlength(T)} = 0.)",
        ":- init(I,_), tlength(T), #count{ S : state(I,S,T), acc(I,S) } = 0.",
    };
}

AspProgram emit_generation( const ProcessVocabulary& vocabulary, const std::vector< Formula >& constraints,
                            std::size_t trace_length )
{
    if ( trace_length < 1 )
        throw UsageError( "trace length must be at least 1" );
    for ( const auto& c : constraints )
        if ( !variables_of( c ).empty() )
            throw UsageError( "generation constraints cannot contain activity variables" );

    AspProgram p{ AspProblem::Generation, {} };
    auto& out = p.statements;
    out.push_back( "% event log generation, traces of length " + std::to_string( trace_length ) );
    const auto facts = vocabulary_facts( vocabulary );
    out.insert( out.end(), facts.begin(), facts.end() );
    out.push_back( "time(0.." + std::to_string( trace_length - 1 ) + ")." );
    out.push_back( "tlength(" + std::to_string( trace_length ) + ")." );
    out.push_back( "1 { trace(A,T) : act(A) } 1 :- time(T)." );
    out.push_back( "1 { has_val(N,V,T) : val(N,V) } 1 :- trace(A,T), has_attr(A,N)." );
    out.push_back( ":- has_val(N,_,T), trace(A,T), not has_attr(A,N)." );
    emit_constraints( out, vocabulary, constraints, Shape{ false } );
    const auto run = emit_run_rules( false );
    out.insert( out.end(), run.begin(), run.end() );
    out.push_back( "#show trace/2." );
    out.push_back( "#show has_val/3." );
    return p;
}

AspProgram emit_conformance( const ProcessVocabulary& vocabulary, const std::vector< Formula >& constraints,
                             const Log& log )
{
    for ( const auto& c : constraints )
        if ( !variables_of( c ).empty() )
            throw UsageError( "conformance constraints cannot contain activity variables" );
    check_log_valid( vocabulary, log );

    AspProgram p{ AspProblem::Conformance, {} };
    auto& out = p.statements;
    out.push_back( "% conformance checking of " + std::to_string( log.size() ) + " traces" );
    const auto facts = vocabulary_facts( vocabulary );
    out.insert( out.end(), facts.begin(), facts.end() );
    emit_log( out, log );
    emit_payload( out, vocabulary, log );
    emit_constraints( out, vocabulary, constraints, Shape{ true } );
    const auto run = emit_run_rules( true );
    out.insert( out.end(), run.begin(), run.end() );
    out.push_back( "#show." );
    return p;
}

AspProgram emit_query( const ProcessVocabulary& vocabulary, const Formula& query, const Log& log )
{
    if ( log.traces.empty() )
        throw UsageError( "query checking needs a nonempty log" );
    check_log_valid( vocabulary, log );

    AspProgram p{ AspProblem::Query, {} };
    auto& out = p.statements;
    out.push_back( "% query checking over " + std::to_string( log.size() ) + " traces" );
    const auto facts = vocabulary_facts( vocabulary );
    out.insert( out.end(), facts.begin(), facts.end() );
    emit_log( out, log );
    emit_payload( out, vocabulary, log );
    for ( const auto& v : variables_of( query ) )
        out.push_back( "var(" + variable_constant( v ) + ")." );
    out.push_back( "1 { assgnmt(V,W) : act(W) } 1 :- var(V)." );
    emit_constraints( out, vocabulary, { query }, Shape{ true } );
    const auto run = emit_run_rules( true );
    out.insert( out.end(), run.begin(), run.end() );
    out.push_back( "#show assgnmt/2." );
    return p;
}

} // namespace dpm
