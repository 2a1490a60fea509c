#include "dpm/formula.hpp"

#include "dpm/error.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace dpm {

std::string_view to_string( CmpOp op )
{
    switch ( op )
    {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    }
    return "?";
}

bool compare( std::int64_t lhs, CmpOp op, std::int64_t rhs )
{
    switch ( op )
    {
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ge: return lhs >= rhs;
    case CmpOp::Gt: return lhs > rhs;
    }
    return false;
}

namespace {

bool is_identifier( std::string_view s )
{
    if ( s.empty() || !( std::isalpha( static_cast< unsigned char >( s[ 0 ] ) ) || s[ 0 ] == '_' ) )
        return false;
    return std::all_of( s.begin(), s.end(),
                        []( char c ) { return std::isalnum( static_cast< unsigned char >( c ) ) || c == '_'; } );
}

bool is_reserved( std::string_view s )
{
    return s == "true" || s == "false" || s == "X" || s == "F" || s == "G" || s == "U";
}

std::string quote( std::string_view s, char q )
{
    std::string out( 1, q );
    for ( char c : s )
    {
        if ( c == q || c == '\\' )
            out += '\\';
        out += c;
    }
    return out + q;
}

std::string print_name( std::string_view name )
{
    if ( is_identifier( name ) && !is_reserved( name ) )
        return std::string{ name };
    return quote( name, '"' );
}

std::string print_constant( const Value& value )
{
    if ( const auto* i = std::get_if< std::int64_t >( &value ) )
        return std::to_string( *i );
    return quote( std::get< std::string >( value ), '\'' );
}

// Comparison of two attribute values under the compatibility rule:
// ints compare numerically, identical enumerations by position, distinct
// enumerations only by `==` on the symbols. Anything else is false.
bool compare_values( const Value& lhs, const AttributeType& lhs_type, CmpOp op, const Value& rhs,
                     const AttributeType& rhs_type )
{
    if ( lhs_type.is_int() && rhs_type.is_int() )
        return compare( std::get< std::int64_t >( lhs ), op, std::get< std::int64_t >( rhs ) );
    if ( lhs_type.is_enum() && rhs_type.is_enum() )
    {
        const auto& l = std::get< std::string >( lhs );
        const auto& r = std::get< std::string >( rhs );
        if ( lhs_type == rhs_type )
            return compare( static_cast< std::int64_t >( *lhs_type.position( l ) ), op,
                            static_cast< std::int64_t >( *rhs_type.position( r ) ) );
        return op == CmpOp::Eq && l == r;
    }
    return false;
}

bool compare_constant( const Value& value, const AttributeType& type, CmpOp op, const Value& constant )
{
    if ( type.is_int() )
    {
        const auto* c = std::get_if< std::int64_t >( &constant );
        return c && compare( std::get< std::int64_t >( value ), op, *c );
    }
    const auto* c = std::get_if< std::string >( &constant );
    if ( !c )
        return false;
    auto cp = type.position( *c );
    if ( !cp )
        return false;
    return compare( static_cast< std::int64_t >( *type.position( std::get< std::string >( value ) ) ), op,
                    static_cast< std::int64_t >( *cp ) );
}

bool types_compatible( const AttributeType& lhs, CmpOp op, const AttributeType& rhs )
{
    if ( lhs.is_int() && rhs.is_int() )
        return true;
    if ( lhs.is_enum() && rhs.is_enum() )
    {
        if ( lhs == rhs )
            return true;
        if ( op != CmpOp::Eq )
            return false;
        for ( const auto& v : lhs.enumeration().values )
            if ( rhs.position( v ) )
                return true;
    }
    return false;
}

} // namespace

std::string to_string( const Atom& atom )
{
    struct Printer
    {
        std::string operator()( const TrueAtom& ) const { return "true"; }
        std::string operator()( const ActivityAtom& a ) const { return print_name( a.name ); }
        std::string operator()( const VarAtom& v ) const { return "?" + v.name; }
        std::string operator()( const AttrCmpAttr& c ) const
        {
            return c.lhs + " " + std::string{ to_string( c.op ) } + " " + c.rhs;
        }
        std::string operator()( const AttrCmpConst& c ) const
        {
            return c.attribute + " " + std::string{ to_string( c.op ) } + " " + print_constant( c.constant );
        }
    };
    return std::visit( Printer{}, atom );
}

std::string to_string( const Assignment& assignment )
{
    std::string out;
    for ( const auto& [ var, activity ] : assignment )
        out += ( out.empty() ? "?" : " ?" ) + var + "=" + activity;
    return out;
}

bool holds( const ProcessVocabulary& vocabulary, const Atom& atom, const Event& event, const Assignment* assignment )
{
    if ( std::holds_alternative< TrueAtom >( atom ) )
        return true;
    if ( const auto* a = std::get_if< ActivityAtom >( &atom ) )
        return event.activity == a->name;
    if ( const auto* v = std::get_if< VarAtom >( &atom ) )
    {
        if ( !assignment )
            throw UsageError( "activity variable ?" + v->name + " without an assignment" );
        auto it = assignment->find( v->name );
        if ( it == assignment->end() )
            throw UsageError( "activity variable ?" + v->name + " is unbound" );
        return event.activity == it->second;
    }

    const auto* signature = vocabulary.find( event.activity );
    if ( !signature )
        return false;
    if ( const auto* c = std::get_if< AttrCmpConst >( &atom ) )
    {
        auto j = signature->attribute_index( c->attribute );
        if ( !j || *j >= event.values.size() )
            return false;
        return compare_constant( event.values[ *j ], signature->attributes()[ *j ].type, c->op, c->constant );
    }
    const auto& c = std::get< AttrCmpAttr >( atom );
    auto j = signature->attribute_index( c.lhs );
    auto k = signature->attribute_index( c.rhs );
    if ( !j || !k || *j >= event.values.size() || *k >= event.values.size() )
        return false;
    return compare_values( event.values[ *j ], signature->attributes()[ *j ].type, c.op, event.values[ *k ],
                           signature->attributes()[ *k ].type );
}

std::string to_string( const EventLiteral& literal )
{
    const bool bare = std::holds_alternative< ActivityAtom >( literal.atom ) ||
                      std::holds_alternative< VarAtom >( literal.atom ) ||
                      std::holds_alternative< TrueAtom >( literal.atom );
    if ( literal.positive )
        return to_string( literal.atom );
    return bare ? "!" + to_string( literal.atom ) : "!(" + to_string( literal.atom ) + ")";
}

std::string to_string( const EventFormula& formula )
{
    if ( formula.empty() )
        return "true";
    std::string out;
    for ( std::size_t i = 0; i < formula.size(); ++i )
        out += ( i ? " && " : "" ) + to_string( formula[ i ] );
    return out;
}

bool holds( const ProcessVocabulary& vocabulary, const EventFormula& formula, const Event& event,
            const Assignment* assignment )
{
    return std::all_of( formula.begin(), formula.end(), [ & ]( const EventLiteral& l ) {
        return holds( vocabulary, l.atom, event, assignment ) == l.positive;
    } );
}

// ---------------------------------------------------------------------------
// AST

struct Formula::Node
{
    Kind kind = Kind::Atom;
    Atom atom;
    std::vector< Formula > children;
};

Formula::Formula() : Formula( truth() ) {}

Formula Formula::atom( Atom a )
{
    return Formula{ std::make_shared< const Node >( Node{ Kind::Atom, std::move( a ), {} } ) };
}

namespace {

template < typename... Fs >
std::vector< Formula > children_of( Fs... fs )
{
    return std::vector< Formula >{ std::move( fs )... };
}

} // namespace

Formula Formula::negation( Formula f )
{
    return Formula{ std::make_shared< const Node >( Node{ Kind::Not, TrueAtom{}, children_of( std::move( f ) ) } ) };
}

Formula Formula::conjunction( Formula lhs, Formula rhs )
{
    return Formula{ std::make_shared< const Node >(
        Node{ Kind::And, TrueAtom{}, children_of( std::move( lhs ), std::move( rhs ) ) } ) };
}

Formula Formula::disjunction( Formula lhs, Formula rhs )
{
    return Formula{ std::make_shared< const Node >(
        Node{ Kind::Or, TrueAtom{}, children_of( std::move( lhs ), std::move( rhs ) ) } ) };
}

Formula Formula::implication( Formula lhs, Formula rhs )
{
    return Formula{ std::make_shared< const Node >(
        Node{ Kind::Implies, TrueAtom{}, children_of( std::move( lhs ), std::move( rhs ) ) } ) };
}

Formula Formula::next( Formula f )
{
    return Formula{ std::make_shared< const Node >( Node{ Kind::Next, TrueAtom{}, children_of( std::move( f ) ) } ) };
}

Formula Formula::until( Formula lhs, Formula rhs )
{
    return Formula{ std::make_shared< const Node >(
        Node{ Kind::Until, TrueAtom{}, children_of( std::move( lhs ), std::move( rhs ) ) } ) };
}

Formula Formula::eventually( Formula f )
{
    return Formula{ std::make_shared< const Node >(
        Node{ Kind::Eventually, TrueAtom{}, children_of( std::move( f ) ) } ) };
}

Formula Formula::globally( Formula f )
{
    return Formula{ std::make_shared< const Node >(
        Node{ Kind::Globally, TrueAtom{}, children_of( std::move( f ) ) } ) };
}

Formula::Kind Formula::kind() const { return _node->kind; }
const Atom& Formula::atom_value() const { return _node->atom; }
const Formula& Formula::lhs() const { return _node->children.at( 0 ); }
const Formula& Formula::rhs() const { return _node->children.at( 1 ); }
bool Formula::is_binary() const { return _node->children.size() == 2; }

bool Formula::is_temporal() const
{
    switch ( kind() )
    {
    case Kind::Next:
    case Kind::Until:
    case Kind::Eventually:
    case Kind::Globally: return true;
    default: return false;
    }
}

bool Formula::operator==( const Formula& other ) const
{
    if ( _node == other._node )
        return true;
    if ( kind() != other.kind() || _node->children.size() != other._node->children.size() )
        return false;
    if ( kind() == Kind::Atom )
        return atom_value() == other.atom_value();
    for ( std::size_t i = 0; i < _node->children.size(); ++i )
        if ( !( _node->children[ i ] == other._node->children[ i ] ) )
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok
{
    Ident,
    Var,
    Int,
    SingleQuoted,
    DoubleQuoted,
    Not,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    Cmp,
    End
};

struct Token
{
    Tok kind;
    std::string text;
    std::size_t pos;
    CmpOp op = CmpOp::Eq;
    std::int64_t number = 0;
};

class Lexer
{
public:
    explicit Lexer( std::string_view text ) : _text{ text } {}

    std::vector< Token > run()
    {
        std::vector< Token > out;
        for ( ;; )
        {
            skip_space();
            if ( _pos >= _text.size() )
            {
                out.push_back( { Tok::End, "", _pos } );
                return out;
            }
            out.push_back( next() );
        }
    }

private:
    void skip_space()
    {
        while ( _pos < _text.size() && std::isspace( static_cast< unsigned char >( _text[ _pos ] ) ) )
            ++_pos;
    }

    bool at( std::string_view s ) const { return _text.substr( _pos, s.size() ) == s; }

    Token next()
    {
        const std::size_t start = _pos;
        const char c = _text[ _pos ];
        auto simple = [ & ]( Tok k, std::size_t len ) {
            _pos += len;
            return Token{ k, std::string{ _text.substr( start, len ) }, start };
        };
        auto cmp = [ & ]( CmpOp op, std::size_t len ) {
            Token t = simple( Tok::Cmp, len );
            t.op = op;
            return t;
        };

        if ( at( "&&" ) )
            return simple( Tok::And, 2 );
        if ( at( "||" ) )
            return simple( Tok::Or, 2 );
        if ( at( "->" ) )
            return simple( Tok::Arrow, 2 );
        if ( at( "<=" ) )
            return cmp( CmpOp::Le, 2 );
        if ( at( ">=" ) )
            return cmp( CmpOp::Ge, 2 );
        if ( at( "==" ) )
            return cmp( CmpOp::Eq, 2 );
        if ( at( "!=" ) )
            throw SyntaxError( "'!=' is not a comparison operator; write !(a == b)", start );
        switch ( c )
        {
        case '!': return simple( Tok::Not, 1 );
        case '(': return simple( Tok::LParen, 1 );
        case ')': return simple( Tok::RParen, 1 );
        case '<': return cmp( CmpOp::Lt, 1 );
        case '>': return cmp( CmpOp::Gt, 1 );
        case '=': return cmp( CmpOp::Eq, 1 );
        case '\'':
        case '"': return quoted( c == '\'' ? Tok::SingleQuoted : Tok::DoubleQuoted );
        case '?':
        {
            ++_pos;
            std::string name = identifier();
            if ( name.empty() )
                throw SyntaxError( "expected variable name after '?'", start );
            return Token{ Tok::Var, name, start };
        }
        default: break;
        }
        if ( std::isdigit( static_cast< unsigned char >( c ) ) ||
             ( c == '-' && _pos + 1 < _text.size() && std::isdigit( static_cast< unsigned char >( _text[ _pos + 1 ] ) ) ) )
        {
            std::size_t end = _pos + 1;
            while ( end < _text.size() && std::isdigit( static_cast< unsigned char >( _text[ end ] ) ) )
                ++end;
            Token t{ Tok::Int, std::string{ _text.substr( _pos, end - _pos ) }, start };
            try
            {
                t.number = std::stoll( t.text );
            }
            catch ( const std::out_of_range& )
            {
                throw SyntaxError( "integer literal out of range", start );
            }
            _pos = end;
            return t;
        }
        std::string name = identifier();
        if ( name.empty() )
            throw SyntaxError( std::string{ "unexpected character '" } + c + "'", start );
        return Token{ Tok::Ident, name, start };
    }

    std::string identifier()
    {
        const std::size_t start = _pos;
        if ( _pos < _text.size() && ( std::isalpha( static_cast< unsigned char >( _text[ _pos ] ) ) || _text[ _pos ] == '_' ) )
        {
            ++_pos;
            while ( _pos < _text.size() &&
                    ( std::isalnum( static_cast< unsigned char >( _text[ _pos ] ) ) || _text[ _pos ] == '_' ) )
                ++_pos;
        }
        return std::string{ _text.substr( start, _pos - start ) };
    }

    Token quoted( Tok kind )
    {
        const std::size_t start = _pos;
        const char q = _text[ _pos++ ];
        std::string value;
        while ( _pos < _text.size() && _text[ _pos ] != q )
        {
            if ( _text[ _pos ] == '\\' && _pos + 1 < _text.size() )
                ++_pos;
            value += _text[ _pos++ ];
        }
        if ( _pos >= _text.size() )
            throw SyntaxError( "unterminated quoted name", start );
        ++_pos;
        return Token{ kind, value, start };
    }

    std::string_view _text;
    std::size_t _pos = 0;
};

class Parser
{
public:
    Parser( std::string_view text, const ProcessVocabulary& vocabulary )
        : _tokens{ Lexer{ text }.run() }, _vocabulary{ vocabulary } {}

    Formula run()
    {
        Formula f = implication();
        if ( peek().kind != Tok::End )
            throw SyntaxError( "unexpected '" + peek().text + "'", peek().pos );
        return f;
    }

private:
    const Token& peek( std::size_t ahead = 0 ) const
    {
        return _tokens[ std::min( _index + ahead, _tokens.size() - 1 ) ];
    }
    const Token& advance() { return _tokens[ _index++ ]; }
    bool keyword( std::string_view word, std::size_t ahead = 0 ) const
    {
        return peek( ahead ).kind == Tok::Ident && peek( ahead ).text == word;
    }

    Formula implication()
    {
        Formula lhs = until();
        if ( peek().kind == Tok::Arrow )
        {
            advance();
            return Formula::implication( std::move( lhs ), implication() );
        }
        return lhs;
    }

    Formula until()
    {
        Formula lhs = disjunction();
        if ( keyword( "U" ) )
        {
            advance();
            return Formula::until( std::move( lhs ), until() );
        }
        return lhs;
    }

    Formula disjunction()
    {
        Formula lhs = conjunction();
        while ( peek().kind == Tok::Or )
        {
            advance();
            lhs = Formula::disjunction( std::move( lhs ), conjunction() );
        }
        return lhs;
    }

    Formula conjunction()
    {
        Formula lhs = unary();
        while ( peek().kind == Tok::And )
        {
            advance();
            lhs = Formula::conjunction( std::move( lhs ), unary() );
        }
        return lhs;
    }

    Formula unary()
    {
        if ( peek().kind == Tok::Not )
        {
            advance();
            return Formula::negation( unary() );
        }
        if ( keyword( "X" ) )
        {
            advance();
            return Formula::next( unary() );
        }
        if ( keyword( "F" ) )
        {
            advance();
            return Formula::eventually( unary() );
        }
        if ( keyword( "G" ) )
        {
            advance();
            return Formula::globally( unary() );
        }
        return primary();
    }

    Formula primary()
    {
        const Token& t = peek();
        switch ( t.kind )
        {
        case Tok::LParen:
        {
            advance();
            Formula inner = implication();
            if ( peek().kind != Tok::RParen )
                throw SyntaxError( "expected ')'", peek().pos );
            advance();
            return inner;
        }
        case Tok::Var: advance(); return Formula::variable( t.text );
        case Tok::DoubleQuoted:
            advance();
            if ( peek().kind == Tok::Cmp )
                throw SyntaxError( "attribute names cannot be quoted", t.pos );
            return Formula::activity( t.text );
        case Tok::Ident:
        {
            if ( t.text == "true" )
            {
                advance();
                return Formula::truth();
            }
            if ( t.text == "false" )
            {
                advance();
                return Formula::falsity();
            }
            if ( is_reserved( t.text ) )
                throw SyntaxError( "operator '" + t.text + "' where an operand was expected", t.pos );
            advance();
            if ( peek().kind == Tok::Cmp )
                return comparison( t.text );
            return Formula::activity( t.text );
        }
        case Tok::End: throw SyntaxError( "unexpected end of formula", t.pos );
        default: throw SyntaxError( "unexpected '" + t.text + "'", t.pos );
        }
    }

    Formula comparison( const std::string& attribute )
    {
        const CmpOp op = advance().op;
        const Token& rhs = advance();
        switch ( rhs.kind )
        {
        case Tok::Int: return Formula::atom( AttrCmpConst{ attribute, op, Value{ rhs.number } } );
        case Tok::SingleQuoted:
        case Tok::DoubleQuoted: return Formula::atom( AttrCmpConst{ attribute, op, Value{ rhs.text } } );
        case Tok::Ident:
            if ( is_reserved( rhs.text ) )
                throw SyntaxError( "operator '" + rhs.text + "' where a value was expected", rhs.pos );
            // an identifier names an attribute when the vocabulary declares one
            if ( _vocabulary.declares_attribute( rhs.text ) )
                return Formula::atom( AttrCmpAttr{ attribute, op, rhs.text } );
            return Formula::atom( AttrCmpConst{ attribute, op, Value{ rhs.text } } );
        default: throw SyntaxError( "expected a value or attribute after comparison", rhs.pos );
        }
    }

    std::vector< Token > _tokens;
    std::size_t _index = 0;
    const ProcessVocabulary& _vocabulary;
};

template < typename Fn >
void for_each_atom( const Formula& f, Fn&& fn )
{
    if ( f.kind() == Formula::Kind::Atom )
    {
        fn( f.atom_value() );
        return;
    }
    for_each_atom( f.lhs(), fn );
    if ( f.is_binary() )
        for_each_atom( f.rhs(), fn );
}

} // namespace

Formula parse_formula( std::string_view text, const ProcessVocabulary& vocabulary )
{
    Formula f = Parser{ text, vocabulary }.run();
    check_formula( f, vocabulary );
    return f;
}

void check_formula( const Formula& formula, const ProcessVocabulary& vocabulary )
{
    for_each_atom( formula, [ & ]( const Atom& atom ) {
        if ( const auto* a = std::get_if< ActivityAtom >( &atom ) )
        {
            if ( !vocabulary.find( a->name ) )
                throw TypeError( "unknown activity " + a->name );
        }
        else if ( const auto* c = std::get_if< AttrCmpConst >( &atom ) )
        {
            const auto types = vocabulary.attribute_types( c->attribute );
            if ( types.empty() )
                throw TypeError( "unknown attribute " + c->attribute );
            if ( std::none_of( types.begin(), types.end(),
                               [ & ]( const AttributeType* t ) { return t->contains( c->constant ); } ) )
                throw TypeError( "constant " + to_string( c->constant ) + " is outside every domain of attribute " +
                                 c->attribute );
        }
        else if ( const auto* c = std::get_if< AttrCmpAttr >( &atom ) )
        {
            for ( const auto& name : { c->lhs, c->rhs } )
                if ( !vocabulary.declares_attribute( name ) )
                    throw TypeError( "unknown attribute " + name );
            bool ok = false;
            for ( const auto& signature : vocabulary.activities() )
            {
                auto j = signature.attribute_index( c->lhs );
                auto k = signature.attribute_index( c->rhs );
                if ( j && k &&
                     types_compatible( signature.attributes()[ *j ].type, c->op, signature.attributes()[ *k ].type ) )
                    ok = true;
            }
            if ( !ok )
                throw TypeError( "no activity carries attributes " + c->lhs + " and " + c->rhs +
                                 " with types compatible under " + std::string{ to_string( c->op ) } );
        }
    } );
}

// ---------------------------------------------------------------------------
// Printer

namespace {

int precedence( const Formula& f )
{
    switch ( f.kind() )
    {
    case Formula::Kind::Implies: return 1;
    case Formula::Kind::Until: return 2;
    case Formula::Kind::Or: return 3;
    case Formula::Kind::And: return 4;
    case Formula::Kind::Atom: return 6;
    default: return 5;
    }
}

std::string print( const Formula& f )
{
    using K = Formula::Kind;
    const int p = precedence( f );
    auto wrap = [ & ]( const Formula& child, bool parens ) {
        return parens ? "(" + print( child ) + ")" : print( child );
    };
    auto unary = [ & ]( std::string_view op ) {
        const Formula& operand = f.lhs();
        const bool is_cmp = operand.kind() == K::Atom && ( std::holds_alternative< AttrCmpAttr >( operand.atom_value() ) ||
                                                           std::holds_alternative< AttrCmpConst >( operand.atom_value() ) );
        std::string sep = op == "!" ? "" : " ";
        if ( is_cmp || precedence( operand ) < 5 )
            return std::string{ op } + sep + "(" + print( operand ) + ")";
        return std::string{ op } + sep + print( operand );
    };
    // right-associative operators need parentheses on a same-level left operand
    auto binary = [ & ]( std::string_view op, bool right_assoc ) {
        const int lp = precedence( f.lhs() );
        const int rp = precedence( f.rhs() );
        const bool lparens = lp < p || ( right_assoc && lp == p );
        const bool rparens = rp < p || ( !right_assoc && rp == p );
        return wrap( f.lhs(), lparens ) + " " + std::string{ op } + " " + wrap( f.rhs(), rparens );
    };

    switch ( f.kind() )
    {
    case K::Atom: return to_string( f.atom_value() );
    case K::Not: return unary( "!" );
    case K::Next: return unary( "X" );
    case K::Eventually: return unary( "F" );
    case K::Globally: return unary( "G" );
    case K::And: return binary( "&&", false );
    case K::Or: return binary( "||", false );
    case K::Until: return binary( "U", true );
    case K::Implies: return binary( "->", true );
    }
    return {};
}

} // namespace

std::string to_string( const Formula& formula ) { return print( formula ); }

// ---------------------------------------------------------------------------
// Semantics

namespace {

class Evaluator
{
public:
    Evaluator( const ProcessVocabulary& vocabulary, const Trace& trace )
        : _vocabulary{ vocabulary }, _trace{ trace }, _n{ trace.events.size() } {}

    // positions are 1-based
    bool eval( std::size_t i, const Formula& f ) const
    {
        using K = Formula::Kind;
        switch ( f.kind() )
        {
        case K::Atom: return holds( _vocabulary, f.atom_value(), _trace.events[ i - 1 ] );
        case K::Not: return !eval( i, f.lhs() );
        case K::And: return eval( i, f.lhs() ) && eval( i, f.rhs() );
        case K::Or: return eval( i, f.lhs() ) || eval( i, f.rhs() );
        case K::Implies: return !eval( i, f.lhs() ) || eval( i, f.rhs() );
        case K::Next: return i < _n && eval( i + 1, f.lhs() );
        case K::Until: return until( i, &f.lhs(), f.rhs() );
        case K::Eventually: return until( i, nullptr, f.lhs() );
        case K::Globally:
            // G phi = !F !phi
            for ( std::size_t j = i; j <= _n; ++j )
                if ( !eval( j, f.lhs() ) )
                    return false;
            return true;
        }
        return false;
    }

private:
    // exists j in [i, n] with rhs at j and lhs on [i, j); a null lhs is `true`
    bool until( std::size_t i, const Formula* lhs, const Formula& rhs ) const
    {
        for ( std::size_t j = i; j <= _n; ++j )
        {
            if ( eval( j, rhs ) )
                return true;
            if ( lhs && !eval( j, *lhs ) )
                return false;
        }
        return false;
    }

    const ProcessVocabulary& _vocabulary;
    const Trace& _trace;
    std::size_t _n;
};

} // namespace

bool eval_at( const ProcessVocabulary& vocabulary, const Trace& trace, std::size_t position, const Formula& formula )
{
    if ( position < 1 || position > trace.events.size() )
        throw UsageError( "position " + std::to_string( position ) + " outside trace of length " +
                          std::to_string( trace.events.size() ) );
    if ( auto vars = variables_of( formula ); !vars.empty() )
        throw UsageError( "cannot evaluate a formula with activity variable ?" + *vars.begin() );
    return Evaluator{ vocabulary, trace }.eval( position, formula );
}

bool satisfies( const ProcessVocabulary& vocabulary, const Trace& trace, const Formula& formula )
{
    return eval_at( vocabulary, trace, 1, formula );
}

std::set< std::string > variables_of( const Formula& formula )
{
    std::set< std::string > vars;
    for_each_atom( formula, [ & ]( const Atom& atom ) {
        if ( const auto* v = std::get_if< VarAtom >( &atom ) )
            vars.insert( v->name );
    } );
    return vars;
}

Formula substitute( const Formula& formula, const Assignment& assignment )
{
    using K = Formula::Kind;
    switch ( formula.kind() )
    {
    case K::Atom:
        if ( const auto* v = std::get_if< VarAtom >( &formula.atom_value() ) )
        {
            auto it = assignment.find( v->name );
            if ( it == assignment.end() )
                throw UsageError( "assignment does not bind ?" + v->name );
            return Formula::activity( it->second );
        }
        return formula;
    case K::Not: return Formula::negation( substitute( formula.lhs(), assignment ) );
    case K::Next: return Formula::next( substitute( formula.lhs(), assignment ) );
    case K::Eventually: return Formula::eventually( substitute( formula.lhs(), assignment ) );
    case K::Globally: return Formula::globally( substitute( formula.lhs(), assignment ) );
    case K::And:
        return Formula::conjunction( substitute( formula.lhs(), assignment ), substitute( formula.rhs(), assignment ) );
    case K::Or:
        return Formula::disjunction( substitute( formula.lhs(), assignment ), substitute( formula.rhs(), assignment ) );
    case K::Implies:
        return Formula::implication( substitute( formula.lhs(), assignment ), substitute( formula.rhs(), assignment ) );
    case K::Until:
        return Formula::until( substitute( formula.lhs(), assignment ), substitute( formula.rhs(), assignment ) );
    }
    return formula;
}

bool is_event_formula( const Formula& formula )
{
    if ( formula.is_temporal() )
        return false;
    if ( formula.kind() == Formula::Kind::Atom )
        return true;
    return is_event_formula( formula.lhs() ) && ( !formula.is_binary() || is_event_formula( formula.rhs() ) );
}

// ---------------------------------------------------------------------------
// Event-formula normal forms

namespace {

using Dnf = std::vector< EventFormula >;

// Adds a literal to a clause; false when the clause becomes contradictory.
bool add_literal( EventFormula& clause, const EventLiteral& literal )
{
    if ( std::holds_alternative< TrueAtom >( literal.atom ) )
        return literal.positive;
    for ( const auto& l : clause )
        if ( l.atom == literal.atom )
            return l.positive == literal.positive;
    clause.push_back( literal );
    return true;
}

Dnf normalize( Dnf dnf )
{
    Dnf out;
    for ( auto& clause : dnf )
    {
        if ( std::find( out.begin(), out.end(), clause ) == out.end() )
            out.push_back( std::move( clause ) );
    }
    // absorption: drop clauses that contain another clause's literals
    auto subsumes = []( const EventFormula& small, const EventFormula& big ) {
        return small.size() <= big.size() && std::all_of( small.begin(), small.end(), [ & ]( const EventLiteral& l ) {
                   return std::find( big.begin(), big.end(), l ) != big.end();
               } );
    };
    Dnf kept;
    for ( std::size_t i = 0; i < out.size(); ++i )
    {
        bool absorbed = false;
        for ( std::size_t j = 0; j < out.size() && !absorbed; ++j )
            if ( i != j && subsumes( out[ j ], out[ i ] ) && ( out[ j ].size() < out[ i ].size() || j < i ) )
                absorbed = true;
        if ( !absorbed )
            kept.push_back( out[ i ] );
    }
    return kept;
}

Dnf conjoin( const Dnf& lhs, const Dnf& rhs )
{
    Dnf out;
    for ( const auto& a : lhs )
        for ( const auto& b : rhs )
        {
            EventFormula clause = a;
            bool ok = true;
            for ( const auto& l : b )
                ok = ok && add_literal( clause, l );
            if ( ok )
                out.push_back( std::move( clause ) );
        }
    return out;
}

Dnf dnf_of( const Formula& f, bool positive )
{
    using K = Formula::Kind;
    switch ( f.kind() )
    {
    case K::Atom:
    {
        EventFormula clause;
        if ( !add_literal( clause, EventLiteral{ f.atom_value(), positive } ) )
            return {};
        return { clause };
    }
    case K::Not: return dnf_of( f.lhs(), !positive );
    case K::And:
    case K::Or:
    case K::Implies:
    {
        const bool lhs_sign = f.kind() == K::Implies ? !positive : positive;
        Dnf l = dnf_of( f.lhs(), lhs_sign );
        Dnf r = dnf_of( f.rhs(), positive );
        // under negation, && becomes || and vice versa; implication is !a || b
        const bool is_or = ( f.kind() == K::And ) ? !positive : positive;
        if ( is_or )
        {
            l.insert( l.end(), r.begin(), r.end() );
            return normalize( std::move( l ) );
        }
        return normalize( conjoin( l, r ) );
    }
    default: throw UsageError( "temporal operator inside an event formula" );
    }
}

} // namespace

std::vector< EventFormula > to_dnf( const Formula& formula )
{
    return dnf_of( formula, true );
}

std::vector< EventFormula > negate_event_formula( const Formula& formula )
{
    return dnf_of( formula, false );
}

std::vector< EventFormula > negate_event_formula( const EventFormula& formula )
{
    return negate_event_formula( to_formula( formula ) );
}

Formula to_formula( const EventFormula& formula )
{
    if ( formula.empty() )
        return Formula::truth();
    auto literal = []( const EventLiteral& l ) {
        Formula a = Formula::atom( l.atom );
        return l.positive ? a : Formula::negation( a );
    };
    Formula out = literal( formula.front() );
    for ( std::size_t i = 1; i < formula.size(); ++i )
        out = Formula::conjunction( out, literal( formula[ i ] ) );
    return out;
}

} // namespace dpm
