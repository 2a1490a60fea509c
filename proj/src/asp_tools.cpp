#include "dpm/asp.hpp"

#include "dpm/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <unistd.h>

namespace dpm {

// ---------------------------------------------------------------------------
// Syntax check

namespace {

enum class Tok
{
    Ident,    // lowercase constant or predicate
    Variable, // uppercase or _
    Number,
    String,
    Directive, // #show, #count, ...
    Punct,
    End
};

struct Token
{
    Tok kind;
    std::string text;
    std::size_t line;
};

std::vector< Token > tokenize( std::string_view s, std::vector< std::string >& errors )
{
    std::vector< Token > out;
    std::size_t line = 1;
    std::size_t i = 0;
    auto ident_char = [ & ]( std::size_t k ) {
        return k < s.size() && ( std::isalnum( static_cast< unsigned char >( s[ k ] ) ) || s[ k ] == '_' || s[ k ] == '\'' );
    };
    while ( i < s.size() )
    {
        const char c = s[ i ];
        if ( c == '\n' )
        {
            ++line;
            ++i;
        }
        else if ( std::isspace( static_cast< unsigned char >( c ) ) )
            ++i;
        else if ( c == '%' )
            while ( i < s.size() && s[ i ] != '\n' )
                ++i;
        else if ( std::islower( static_cast< unsigned char >( c ) ) )
        {
            const std::size_t start = i;
            while ( ident_char( i ) )
                ++i;
            out.push_back( { Tok::Ident, std::string{ s.substr( start, i - start ) }, line } );
        }
        else if ( std::isupper( static_cast< unsigned char >( c ) ) || c == '_' )
        {
            const std::size_t start = i;
            while ( ident_char( i ) )
                ++i;
            out.push_back( { Tok::Variable, std::string{ s.substr( start, i - start ) }, line } );
        }
        else if ( std::isdigit( static_cast< unsigned char >( c ) ) )
        {
            const std::size_t start = i;
            while ( i < s.size() && std::isdigit( static_cast< unsigned char >( s[ i ] ) ) )
                ++i;
            out.push_back( { Tok::Number, std::string{ s.substr( start, i - start ) }, line } );
        }
        else if ( c == '"' )
        {
            const std::size_t start = i++;
            while ( i < s.size() && s[ i ] != '"' && s[ i ] != '\n' )
                i += s[ i ] == '\\' ? 2 : 1;
            if ( i >= s.size() || s[ i ] != '"' )
            {
                errors.push_back( "line " + std::to_string( line ) + ": unterminated string" );
                return {};
            }
            ++i;
            out.push_back( { Tok::String, std::string{ s.substr( start, i - start ) }, line } );
        }
        else if ( c == '#' )
        {
            const std::size_t start = i++;
            while ( ident_char( i ) )
                ++i;
            out.push_back( { Tok::Directive, std::string{ s.substr( start, i - start ) }, line } );
        }
        else
        {
            static const std::array< std::string_view, 6 > two{ ":-", "!=", "<=", ">=", "..", "==" };
            std::string text( 1, c );
            for ( auto t : two )
                if ( s.substr( i, 2 ) == t )
                    text = std::string{ t };
            if ( text.size() == 1 && std::string_view{ "(),.;:{}<>=+-*/|" }.find( c ) == std::string_view::npos )
            {
                errors.push_back( "line " + std::to_string( line ) + ": unexpected character '" + std::string( 1, c ) + "'" );
                return {};
            }
            i += text.size();
            out.push_back( { Tok::Punct, text, line } );
        }
    }
    out.push_back( { Tok::End, "", line } );
    return out;
}

// Recursive descent over the subset of clingo's language the emitter uses.
class Checker
{
public:
    explicit Checker( std::vector< Token > tokens ) : _t{ std::move( tokens ) } {}

    std::vector< std::string > run()
    {
        while ( peek().kind != Tok::End )
        {
            const std::size_t start = _i;
            try
            {
                statement();
            }
            catch ( const std::string& message )
            {
                _errors.push_back( "line " + std::to_string( _t[ std::min( _i, _t.size() - 1 ) ].line ) + ": " + message );
                // resynchronise after the next '.'
                _i = start;
                while ( peek().kind != Tok::End && !( peek().kind == Tok::Punct && peek().text == "." ) )
                    ++_i;
                if ( peek().kind != Tok::End )
                    ++_i;
            }
        }
        return _errors;
    }

private:
    const Token& peek( std::size_t k = 0 ) const { return _t[ std::min( _i + k, _t.size() - 1 ) ]; }
    bool is( std::string_view p, std::size_t k = 0 ) const { return peek( k ).kind == Tok::Punct && peek( k ).text == p; }

    void expect( std::string_view p )
    {
        if ( !is( p ) )
            throw "expected '" + std::string{ p } + "' near '" + peek().text + "'";
        ++_i;
    }

    bool accept( std::string_view p )
    {
        if ( !is( p ) )
            return false;
        ++_i;
        return true;
    }

    void statement()
    {
        _head_vars.clear();
        _bound.clear();
        _needed.clear();
        if ( peek().kind == Tok::Directive )
        {
            directive();
            return;
        }
        if ( !is( ":-" ) )
            head();
        if ( accept( ":-" ) )
            body();
        expect( "." );
        for ( const auto& v : _head_vars )
            _needed.insert( v );
        for ( const auto& v : _needed )
            if ( v != "_" && !_bound.count( v ) )
                throw "unsafe variable " + v;
    }

    void directive()
    {
        const std::string d = peek().text;
        ++_i;
        if ( d == "#show" )
        {
            if ( accept( "." ) )
                return;
            if ( peek().kind != Tok::Ident )
                throw std::string{ "expected a predicate after #show" };
            ++_i;
            expect( "/" );
            if ( peek().kind != Tok::Number )
                throw std::string{ "expected an arity" };
            ++_i;
            expect( "." );
            return;
        }
        if ( d == "#const" )
        {
            if ( peek().kind != Tok::Ident )
                throw std::string{ "expected a constant name" };
            ++_i;
            expect( "=" );
            term( _needed );
            expect( "." );
            return;
        }
        throw "unsupported directive " + d;
    }

    void head()
    {
        if ( peek().kind == Tok::Number || is( "{" ) )
        {
            if ( peek().kind == Tok::Number )
                ++_i;
            expect( "{" );
            do
                choice_element();
            while ( accept( ";" ) );
            expect( "}" );
            if ( peek().kind == Tok::Number )
                ++_i;
            return;
        }
        atom( _head_vars );
    }

    void choice_element()
    {
        std::set< std::string > vars;
        atom( vars );
        std::set< std::string > local;
        if ( accept( ":" ) )
        {
            do
                literal( local, vars );
            while ( accept( "," ) );
        }
        // variables of the element are bound by its condition or the rule body
        for ( const auto& v : vars )
            if ( !local.count( v ) )
                _head_vars.insert( v );
    }

    void body()
    {
        do
            literal( _bound, _needed );
        while ( accept( "," ) );
    }

    // Positive atoms bind into `bound`; everything else needs `needed`.
    void literal( std::set< std::string >& bound, std::set< std::string >& needed )
    {
        if ( peek().kind == Tok::Ident && peek().text == "not" )
        {
            ++_i;
            atom( needed );
            return;
        }
        if ( peek().kind == Tok::Directive && peek().text == "#count" )
        {
            aggregate_body();
            if ( !comparison_op() )
                throw std::string{ "expected a comparison after the aggregate" };
            ++_i;
            term( needed );
            return;
        }
        std::set< std::string > vars;
        term( vars );
        if ( comparison_op() )
        {
            ++_i;
            if ( peek().kind == Tok::Directive && peek().text == "#count" )
            {
                needed.insert( vars.begin(), vars.end() );
                aggregate_body();
                return;
            }
            std::set< std::string > rhs;
            term( rhs );
            needed.insert( vars.begin(), vars.end() );
            needed.insert( rhs.begin(), rhs.end() );
            return;
        }
        // a bare term must have been an atom
        const auto& prev = _t[ _i - 1 ];
        if ( !( prev.kind == Tok::Ident || ( prev.kind == Tok::Punct && prev.text == ")" ) ) )
            throw std::string{ "expected a literal" };
        bound.insert( vars.begin(), vars.end() );
    }

    bool comparison_op() const
    {
        if ( peek().kind != Tok::Punct )
            return false;
        const auto& p = peek().text;
        return p == "<" || p == ">" || p == "<=" || p == ">=" || p == "=" || p == "!=" || p == "==";
    }

    void aggregate_body()
    {
        if ( !( peek().kind == Tok::Directive && peek().text == "#count" ) )
            throw std::string{ "expected #count" };
        ++_i;
        expect( "{" );
        do
        {
            std::set< std::string > tuple, local, needed;
            do
                term( tuple );
            while ( accept( "," ) );
            if ( accept( ":" ) )
            {
                do
                    literal( local, needed );
                while ( accept( "," ) );
            }
            for ( const auto& v : tuple )
                if ( !local.count( v ) && !_bound.count( v ) )
                    _needed.insert( v );
            for ( const auto& v : needed )
                if ( !local.count( v ) )
                    _needed.insert( v );
        } while ( accept( ";" ) );
        expect( "}" );
    }

    void atom( std::set< std::string >& vars )
    {
        if ( peek().kind != Tok::Ident )
            throw "expected an atom near '" + peek().text + "'";
        ++_i;
        if ( accept( "(" ) )
        {
            do
                term( vars );
            while ( accept( "," ) );
            expect( ")" );
        }
    }

    void term( std::set< std::string >& vars )
    {
        simple_term( vars );
        while ( is( "+" ) || is( "-" ) || is( "*" ) || is( "/" ) || is( ".." ) )
        {
            ++_i;
            simple_term( vars );
        }
    }

    void simple_term( std::set< std::string >& vars )
    {
        const auto& t = peek();
        switch ( t.kind )
        {
        case Tok::Variable:
            vars.insert( t.text );
            ++_i;
            return;
        case Tok::Number:
        case Tok::String: ++_i; return;
        case Tok::Ident:
            ++_i;
            if ( accept( "(" ) )
            {
                do
                    term( vars );
                while ( accept( "," ) );
                expect( ")" );
            }
            return;
        case Tok::Punct:
            if ( accept( "-" ) )
            {
                simple_term( vars );
                return;
            }
            if ( accept( "(" ) )
            {
                term( vars );
                expect( ")" );
                return;
            }
            break;
        default: break;
        }
        throw "expected a term near '" + t.text + "'";
    }

    std::vector< Token > _t;
    std::size_t _i = 0;
    std::vector< std::string > _errors;
    std::set< std::string > _head_vars, _bound, _needed;
};

} // namespace

std::vector< std::string > validate_asp( std::string_view program )
{
    std::vector< std::string > errors;
    auto tokens = tokenize( program, errors );
    if ( !errors.empty() )
        return errors;
    return Checker{ std::move( tokens ) }.run();
}

// ---------------------------------------------------------------------------
// Solver

namespace {

// Splits "p(a,\"x y\") q(1)" into atoms, respecting quotes and parentheses.
std::vector< std::string > split_atoms( const std::string& line )
{
    std::vector< std::string > out;
    std::string current;
    int depth = 0;
    bool quoted = false;
    for ( std::size_t i = 0; i < line.size(); ++i )
    {
        const char c = line[ i ];
        if ( quoted )
        {
            current += c;
            if ( c == '\\' && i + 1 < line.size() )
                current += line[ ++i ];
            else if ( c == '"' )
                quoted = false;
            continue;
        }
        if ( c == '"' )
            quoted = true;
        depth += c == '(';
        depth -= c == ')';
        if ( c == ' ' && depth == 0 )
        {
            if ( !current.empty() )
                out.push_back( std::move( current ) );
            current.clear();
            continue;
        }
        current += c;
    }
    if ( !current.empty() )
        out.push_back( std::move( current ) );
    return out;
}

// "p(a,1)" -> {"p", {"a", "1"}} with top-level argument splitting.
std::pair< std::string, std::vector< std::string > > parse_atom( const std::string& atom )
{
    const auto open = atom.find( '(' );
    if ( open == std::string::npos )
        return { atom, {} };
    std::vector< std::string > args;
    std::string current;
    int depth = 0;
    bool quoted = false;
    for ( std::size_t i = open + 1; i + 1 < atom.size(); ++i )
    {
        const char c = atom[ i ];
        if ( quoted )
        {
            current += c;
            if ( c == '\\' && i + 2 < atom.size() )
                current += atom[ ++i ];
            else if ( c == '"' )
                quoted = false;
            continue;
        }
        if ( c == '"' )
            quoted = true;
        if ( c == ',' && depth == 0 )
        {
            args.push_back( std::move( current ) );
            current.clear();
            continue;
        }
        depth += c == '(';
        depth -= c == ')';
        current += c;
    }
    args.push_back( std::move( current ) );
    return { atom.substr( 0, open ), args };
}

std::string unquote( const std::string& constant )
{
    if ( constant.size() < 2 || constant.front() != '"' )
        return constant;
    std::string out;
    for ( std::size_t i = 1; i + 1 < constant.size(); ++i )
    {
        if ( constant[ i ] == '\\' && i + 2 < constant.size() )
        {
            ++i;
            out += constant[ i ] == 'n' ? '\n' : constant[ i ];
            continue;
        }
        out += constant[ i ];
    }
    return out;
}

std::size_t to_index( const std::string& s )
{
    try
    {
        return static_cast< std::size_t >( std::stoull( s ) );
    }
    catch ( const std::exception& )
    {
        throw IoError( "solver output: expected a time point, got " + s );
    }
}

} // namespace

SolverOutcome run_solver( const std::string& command, const AspProgram& program )
{
    namespace fs = std::filesystem;
    std::string path = ( fs::temp_directory_path() / "dpm-XXXXXX.lp" ).string();
    const int fd = mkstemps( path.data(), 3 );
    if ( fd < 0 )
        throw IoError( "cannot create a temporary file for the solver" );
    close( fd );
    struct Cleanup
    {
        std::string path;
        ~Cleanup() { std::error_code ec; fs::remove( path, ec ); }
    } cleanup{ path };
    {
        std::ofstream out{ path };
        out << program.text();
        if ( !out )
            throw IoError( "cannot write " + path );
    }

    const std::string full = command + " -n 0 '" + path + "' 2>/dev/null";
    FILE* pipe = popen( full.c_str(), "r" );
    if ( !pipe )
        throw IoError( "cannot run solver: " + command );
    std::string output;
    std::array< char, 4096 > buffer{};
    while ( auto n = fread( buffer.data(), 1, buffer.size(), pipe ) )
        output.append( buffer.data(), n );
    pclose( pipe );

    SolverOutcome outcome;
    std::istringstream lines{ output };
    std::string line;
    bool verdict = false;
    while ( std::getline( lines, line ) )
    {
        if ( line.rfind( "Answer:", 0 ) == 0 )
        {
            std::string atoms;
            std::getline( lines, atoms );
            auto parsed = split_atoms( atoms );
            std::sort( parsed.begin(), parsed.end() );
            outcome.models.push_back( std::move( parsed ) );
        }
        else if ( line == "SATISFIABLE" || line == "OPTIMUM FOUND" )
        {
            outcome.satisfiable = true;
            verdict = true;
        }
        else if ( line == "UNSATISFIABLE" )
        {
            outcome.satisfiable = false;
            verdict = true;
        }
    }
    if ( !verdict )
        throw IoError( "solver produced no verdict: " + command +
                       ( output.empty() ? std::string{} : "\n" + output.substr( 0, 2000 ) ) );
    return outcome;
}

std::vector< Trace > decode_traces( const SolverOutcome& outcome, const ProcessVocabulary& vocabulary )
{
    std::vector< Trace > out;
    for ( const auto& model : outcome.models )
    {
        std::map< std::size_t, std::string > activities;
        std::map< std::size_t, std::map< std::string, Value > > values;
        for ( const auto& a : model )
        {
            auto [ name, args ] = parse_atom( a );
            if ( name == "trace" && args.size() == 2 )
                activities[ to_index( args[ 1 ] ) ] = unquote( args[ 0 ] );
            else if ( name == "has_val" && args.size() == 3 )
            {
                Value v;
                const auto& raw = args[ 1 ];
                if ( !raw.empty() && ( std::isdigit( static_cast< unsigned char >( raw[ 0 ] ) ) || raw[ 0 ] == '-' ) )
                    v = static_cast< std::int64_t >( std::stoll( raw ) );
                else
                    v = unquote( raw );
                values[ to_index( args[ 2 ] ) ][ unquote( args[ 0 ] ) ] = v;
            }
        }
        Trace trace;
        for ( const auto& [ t, activity ] : activities )
        {
            Event e{ activity, {} };
            if ( const auto* sig = vocabulary.find( activity ) )
                for ( const auto& attr : sig->attributes() )
                {
                    const auto it = values[ t ].find( attr.name );
                    if ( it == values[ t ].end() )
                        throw IoError( "solver output: no value for " + attr.name + " at time " + std::to_string( t ) );
                    e.values.push_back( it->second );
                }
            trace.events.push_back( std::move( e ) );
        }
        out.push_back( std::move( trace ) );
    }
    return out;
}

std::vector< Assignment > decode_assignments( const SolverOutcome& outcome )
{
    std::vector< Assignment > out;
    for ( const auto& model : outcome.models )
    {
        Assignment a;
        for ( const auto& atom : model )
        {
            auto [ name, args ] = parse_atom( atom );
            if ( name == "assgnmt" && args.size() == 2 )
            {
                std::string var = unquote( args[ 0 ] );
                if ( var.rfind( "var", 0 ) == 0 )
                    var = var.substr( 3 );
                a[ var ] = unquote( args[ 1 ] );
            }
        }
        out.push_back( std::move( a ) );
    }
    std::sort( out.begin(), out.end() );
    return out;
}

} // namespace dpm
