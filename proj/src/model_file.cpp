#include "dpm/io.hpp"

#include "dpm/error.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace dpm {

namespace {

bool ident_start( char c ) { return std::isalpha( static_cast< unsigned char >( c ) ) || c == '_'; }
bool ident_char( char c ) { return std::isalnum( static_cast< unsigned char >( c ) ) || c == '_'; }

bool is_reserved( std::string_view s )
{
    return s == "true" || s == "false" || s == "X" || s == "F" || s == "G" || s == "U";
}

bool plain_name( std::string_view s )
{
    if ( s.empty() || !ident_start( s[ 0 ] ) || is_reserved( s ) || s == "activity" || s == "constraint" )
        return false;
    for ( char c : s )
        if ( !ident_char( c ) )
            return false;
    return true;
}

std::string quote_name( std::string_view s )
{
    std::string out = "\"";
    for ( char c : s )
    {
        if ( c == '"' || c == '\\' )
            out += '\\';
        out += c;
    }
    return out + '"';
}

struct PendingConstraint
{
    std::string text;
    std::size_t offset;
};

class ModelParser
{
public:
    explicit ModelParser( std::string_view text ) : _text{ text } {}

    Model run()
    {
        std::vector< ActivitySignature > activities;
        std::vector< PendingConstraint > pending;
        for ( ;; )
        {
            skip_space();
            if ( at_end() )
                break;
            const std::size_t start = _pos;
            const std::string keyword = identifier();
            if ( keyword == "activity" )
                activities.push_back( activity() );
            else if ( keyword == "constraint" )
                pending.push_back( constraint() );
            else
                fail( "expected 'activity' or 'constraint'", start );
        }
        if ( activities.empty() )
            fail( "model declares no activities", _pos );

        std::optional< ProcessVocabulary > vocabulary;
        try
        {
            vocabulary.emplace( std::move( activities ) );
        }
        catch ( const ModelError& e )
        {
            fail( e.what(), 0 );
        }

        Model model{ std::move( *vocabulary ), {} };
        for ( const auto& c : pending )
        {
            try
            {
                model.constraints.push_back( parse_formula( c.text, model.vocabulary ) );
            }
            catch ( const SyntaxError& e )
            {
                fail( e.what(), c.offset + e.position() );
            }
            catch ( const TypeError& e )
            {
                fail( e.what(), c.offset );
            }
        }
        return model;
    }

private:
    [[noreturn]] void fail( const std::string& message, std::size_t offset ) const
    {
        std::size_t line = 1, column = 1;
        for ( std::size_t i = 0; i < offset && i < _text.size(); ++i )
        {
            if ( _text[ i ] == '\n' )
            {
                ++line;
                column = 1;
            }
            else
                ++column;
        }
        throw IoError( message, line, column );
    }

    bool at_end() const { return _pos >= _text.size(); }
    char peek() const { return at_end() ? '\0' : _text[ _pos ]; }

    void skip_space()
    {
        while ( !at_end() )
        {
            if ( std::isspace( static_cast< unsigned char >( peek() ) ) )
                ++_pos;
            else if ( peek() == '#' )
                while ( !at_end() && peek() != '\n' )
                    ++_pos;
            else
                break;
        }
    }

    void expect( char c )
    {
        skip_space();
        if ( peek() != c )
            fail( std::string{ "expected '" } + c + "'", _pos );
        ++_pos;
    }

    bool accept( char c )
    {
        skip_space();
        if ( peek() != c )
            return false;
        ++_pos;
        return true;
    }

    std::string identifier()
    {
        skip_space();
        const std::size_t start = _pos;
        if ( !ident_start( peek() ) )
            fail( "expected an identifier", _pos );
        while ( !at_end() && ident_char( peek() ) )
            ++_pos;
        return std::string{ _text.substr( start, _pos - start ) };
    }

    std::string string_literal()
    {
        const char q = _text[ _pos++ ];
        const std::size_t start = _pos - 1;
        std::string out;
        while ( !at_end() && peek() != q )
        {
            if ( peek() == '\n' )
                break;
            if ( peek() == '\\' && _pos + 1 < _text.size() )
                ++_pos;
            out += _text[ _pos++ ];
        }
        if ( peek() != q )
            fail( "unterminated string", start );
        ++_pos;
        return out;
    }

    std::string name()
    {
        skip_space();
        if ( peek() == '"' || peek() == '\'' )
            return string_literal();
        return identifier();
    }

    std::int64_t integer()
    {
        skip_space();
        const std::size_t start = _pos;
        if ( peek() == '-' || peek() == '+' )
            ++_pos;
        while ( !at_end() && std::isdigit( static_cast< unsigned char >( peek() ) ) )
            ++_pos;
        const std::string digits{ _text.substr( start, _pos - start ) };
        try
        {
            std::size_t used = 0;
            const auto v = std::stoll( digits, &used );
            if ( used != digits.size() )
                throw std::invalid_argument( digits );
            return v;
        }
        catch ( const std::exception& )
        {
            fail( "expected an integer", start );
        }
    }

    ActivitySignature activity()
    {
        skip_space();
        const std::size_t start = _pos;
        std::string activity_name = name();
        std::vector< Attribute > attributes;
        if ( accept( '{' ) )
        {
            if ( !accept( '}' ) )
            {
                do
                    attributes.push_back( attribute() );
                while ( accept( ',' ) );
                expect( '}' );
            }
        }
        try
        {
            return ActivitySignature{ std::move( activity_name ), std::move( attributes ) };
        }
        catch ( const ModelError& e )
        {
            fail( e.what(), start );
        }
    }

    Attribute attribute()
    {
        skip_space();
        const std::size_t start = _pos;
        std::string attr = identifier();
        if ( is_reserved( attr ) )
            fail( "'" + attr + "' cannot name an attribute", start );
        expect( ':' );
        skip_space();
        const std::size_t type_start = _pos;
        const std::string kind = identifier();
        try
        {
            if ( kind == "int" )
            {
                const auto lo = integer();
                skip_space();
                if ( _text.substr( _pos, 2 ) != ".." )
                    fail( "expected '..'", _pos );
                _pos += 2;
                const auto hi = integer();
                return Attribute{ std::move( attr ), AttributeType::int_range( lo, hi ) };
            }
            if ( kind == "enum" )
            {
                expect( '{' );
                std::vector< std::string > values;
                do
                    values.push_back( name() );
                while ( accept( ',' ) );
                expect( '}' );
                return Attribute{ std::move( attr ), AttributeType::enumeration( std::move( values ) ) };
            }
        }
        catch ( const ModelError& e )
        {
            fail( e.what(), type_start );
        }
        fail( "expected 'int' or 'enum'", type_start );
    }

    // Up to a newline or ';' outside parentheses and quotes; comments blanked.
    PendingConstraint constraint()
    {
        while ( !at_end() && ( peek() == ' ' || peek() == '\t' ) )
            ++_pos;
        const std::size_t start = _pos;
        std::string text;
        int depth = 0;
        while ( !at_end() )
        {
            const char c = peek();
            if ( c == '"' || c == '\'' )
            {
                const std::size_t s = _pos;
                string_literal();
                text.append( _text.substr( s, _pos - s ) );
                continue;
            }
            if ( c == '#' )
            {
                while ( !at_end() && peek() != '\n' )
                {
                    text += ' ';
                    ++_pos;
                }
                continue;
            }
            if ( depth <= 0 && ( c == '\n' || c == ';' ) )
            {
                ++_pos;
                break;
            }
            depth += c == '(';
            depth -= c == ')';
            text += c;
            ++_pos;
        }
        if ( text.find_first_not_of( " \t\r\n" ) == std::string::npos )
            fail( "empty constraint", start );
        return { std::move( text ), start };
    }

    std::string_view _text;
    std::size_t _pos = 0;
};

std::string read_file( const std::filesystem::path& path )
{
    std::ifstream in{ path, std::ios::binary };
    if ( !in )
        throw IoError( "cannot open " + path.string() );
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

Model parse_model( std::string_view text ) { return ModelParser{ text }.run(); }

Model load_model( const std::filesystem::path& path )
{
    const std::string text = read_file( path );
    try
    {
        return parse_model( text );
    }
    catch ( const IoError& e )
    {
        throw IoError( path.string() + ": " + e.what() );
    }
}

std::string format_model( const Model& model )
{
    std::ostringstream out;
    for ( const auto& a : model.vocabulary.activities() )
    {
        out << "activity " << ( plain_name( a.name() ) ? a.name() : quote_name( a.name() ) ) << " {";
        for ( std::size_t i = 0; i < a.attributes().size(); ++i )
        {
            const auto& attr = a.attributes()[ i ];
            out << ( i ? ", " : " " ) << attr.name << ": ";
            if ( attr.type.is_int() )
                out << "int " << attr.type.range().lo << ".." << attr.type.range().hi;
            else
            {
                out << "enum {";
                const auto& values = attr.type.enumeration().values;
                for ( std::size_t j = 0; j < values.size(); ++j )
                    out << ( j ? ", " : "" ) << ( plain_name( values[ j ] ) ? values[ j ] : quote_name( values[ j ] ) );
                out << "}";
            }
        }
        out << ( a.attributes().empty() ? "}" : " }" ) << "\n";
    }
    for ( const auto& c : model.constraints )
        out << "constraint " << to_string( c ) << "\n";
    return out.str();
}

void save_model( const Model& model, const std::filesystem::path& path )
{
    std::ofstream out{ path, std::ios::binary };
    if ( !out )
        throw IoError( "cannot write " + path.string() );
    out << format_model( model );
    if ( !out )
        throw IoError( "failed writing " + path.string() );
}

} // namespace dpm
