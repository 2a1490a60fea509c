#include "dpm/io.hpp"

#include "dpm/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

namespace dpm {

namespace {

using Payload = std::vector< std::pair< std::string, Value > >;

// Shared decoding of one event: activity name plus raw payload, checked
// against the signature. nullopt when a lenient reader skips the event.
class EventDecoder
{
public:
    EventDecoder( const ProcessVocabulary& vocabulary, const LogReadOptions& options )
        : _vocabulary{ vocabulary }, _options{ options } {}

    // `where` describes the event for messages; `raise` throws the format's error.
    template < typename Raise >
    std::optional< Event > decode( const std::string& activity, const Payload& payload, const std::string& where,
                                   Raise&& raise ) const
    {
        const auto* signature = _vocabulary.find( activity );
        if ( !signature )
            return problem( where + ": unknown activity " + activity, raise );

        Event event{ activity, std::vector< Value >( signature->arity() ) };
        std::vector< bool > seen( signature->arity(), false );
        for ( const auto& [ key, raw ] : payload )
        {
            const auto index = signature->attribute_index( key );
            if ( !index )
            {
                const std::string message = where + ": attribute " + key + " is not declared for " + activity;
                if ( !_options.lenient )
                    raise( message );
                warn( message + " (ignored)" );
                continue;
            }
            if ( seen[ *index ] )
                return problem( where + ": attribute " + key + " given twice", raise );
            seen[ *index ] = true;

            const auto& type = signature->attributes()[ *index ].type;
            Value value = raw;
            if ( type.is_int() != std::holds_alternative< std::int64_t >( raw ) )
                return problem( where + ": attribute " + key + " expects " + type.to_string() + ", got " +
                                    to_string( raw ),
                                raise );
            if ( !type.contains( value ) )
            {
                const std::string message = where + ": value " + to_string( raw ) + " of " + key + " outside " +
                                            type.to_string();
                if ( !_options.lenient || type.is_enum() )
                    return problem( message, raise );
                const auto v = std::get< std::int64_t >( raw );
                value = std::clamp( v, type.range().lo, type.range().hi );
                warn( message + " (clamped to " + to_string( value ) + ")" );
            }
            event.values[ *index ] = std::move( value );
        }
        for ( std::size_t i = 0; i < seen.size(); ++i )
            if ( !seen[ i ] )
                return problem( where + ": missing attribute " + signature->attributes()[ i ].name, raise );
        return event;
    }

    void warn( const std::string& message ) const
    {
        if ( _options.warn )
            _options.warn( message );
    }

    [[nodiscard]] bool lenient() const { return _options.lenient; }

private:
    template < typename Raise >
    std::optional< Event > problem( const std::string& message, Raise&& raise ) const
    {
        if ( !_options.lenient )
            raise( message );
        warn( message + " (event skipped)" );
        return std::nullopt;
    }

    const ProcessVocabulary& _vocabulary;
    const LogReadOptions& _options;
};

// Appends a decoded trace, handling empty traces and repeated ids.
class LogBuilder
{
public:
    explicit LogBuilder( const EventDecoder& decoder ) : _decoder{ decoder } {}

    template < typename Raise >
    void add( Trace trace, const std::string& where, Raise&& raise )
    {
        if ( trace.events.empty() )
        {
            if ( !_decoder.lenient() )
                raise( where + ": empty trace" );
            _decoder.warn( where + ": empty trace (skipped)" );
            return;
        }
        if ( trace.id && !_ids.insert( *trace.id ).second )
        {
            if ( !_decoder.lenient() )
                raise( where + ": duplicate trace id " + *trace.id );
            _decoder.warn( where + ": duplicate trace id " + *trace.id );
        }
        _log.traces.push_back( std::move( trace ) );
    }

    Log take() { return std::move( _log ); }

private:
    const EventDecoder& _decoder;
    Log _log;
    std::set< std::string > _ids;
};

// --- JSON lines

Log read_jsonl( std::istream& in, const EventDecoder& decoder )
{
    LogBuilder builder{ decoder };
    std::string line;
    std::size_t number = 0;
    while ( std::getline( in, line ) )
    {
        ++number;
        if ( line.find_first_not_of( " \t\r" ) == std::string::npos )
            continue;
        auto raise = [ number ]( const std::string& message ) -> void { throw IoError( message, number ); };
        nlohmann::json record;
        try
        {
            record = nlohmann::json::parse( line );
        }
        catch ( const nlohmann::json::parse_error& e )
        {
            throw IoError( std::string{ "malformed JSON: " } + e.what(), number );
        }
        if ( !record.is_object() || !record.contains( "events" ) || !record[ "events" ].is_array() )
            raise( "record needs an \"events\" array" );

        Trace trace;
        std::string where = "record " + std::to_string( number );
        if ( record.contains( "id" ) )
        {
            if ( !record[ "id" ].is_string() )
                raise( "trace id must be a string" );
            trace.id = record[ "id" ].get< std::string >();
            where = "trace " + *trace.id;
        }

        std::size_t position = 0;
        for ( const auto& e : record[ "events" ] )
        {
            ++position;
            const std::string at = where + ", event " + std::to_string( position );
            if ( !e.is_object() || !e.contains( "activity" ) || !e[ "activity" ].is_string() )
                raise( at + ": event needs an \"activity\" string" );
            Payload payload;
            if ( e.contains( "attributes" ) )
            {
                if ( !e[ "attributes" ].is_object() )
                    raise( at + ": \"attributes\" must be an object" );
                for ( const auto& [ key, v ] : e[ "attributes" ].items() )
                {
                    if ( v.is_number_integer() )
                        payload.emplace_back( key, v.get< std::int64_t >() );
                    else if ( v.is_string() )
                        payload.emplace_back( key, v.get< std::string >() );
                    else
                        raise( at + ": attribute " + key + " must be an integer or a string" );
                }
            }
            if ( auto event = decoder.decode( e[ "activity" ].get< std::string >(), payload, at, raise ) )
                trace.events.push_back( std::move( *event ) );
        }
        builder.add( std::move( trace ), where, raise );
    }
    return builder.take();
}

void write_jsonl( std::ostream& out, const Log& log, const ProcessVocabulary& vocabulary )
{
    for ( const auto& trace : log.traces )
    {
        nlohmann::ordered_json record;
        if ( trace.id )
            record[ "id" ] = *trace.id;
        record[ "events" ] = nlohmann::ordered_json::array();
        for ( const auto& e : trace.events )
        {
            nlohmann::ordered_json event;
            event[ "activity" ] = e.activity;
            nlohmann::ordered_json attributes = nlohmann::ordered_json::object();
            const auto& signature = *vocabulary.find( e.activity );
            for ( std::size_t i = 0; i < e.values.size(); ++i )
            {
                const auto& key = signature.attributes()[ i ].name;
                if ( const auto* n = std::get_if< std::int64_t >( &e.values[ i ] ) )
                    attributes[ key ] = *n;
                else
                    attributes[ key ] = std::get< std::string >( e.values[ i ] );
            }
            event[ "attributes" ] = std::move( attributes );
            record[ "events" ].push_back( std::move( event ) );
        }
        out << record.dump() << '\n';
    }
}

// --- XML pull reader, enough for XES

struct XmlToken
{
    enum Kind
    {
        Start,
        End,
        Eof
    } kind = Eof;
    std::string name;
    std::map< std::string, std::string > attributes;
    bool self_closing = false;
    std::size_t line = 0, column = 0;
};

class XmlReader
{
public:
    explicit XmlReader( std::istream& in ) : _in{ in } {}

    XmlToken next()
    {
        for ( ;; )
        {
            // character data is ignored
            int c = get();
            while ( c != EOF && c != '<' )
                c = get();
            if ( c == EOF )
                return XmlToken{};
            const std::size_t line = _line, column = _column;
            c = peek();
            if ( c == '?' )
            {
                skip_until( "?>" );
                continue;
            }
            if ( c == '!' )
            {
                get();
                if ( starts_with( "--" ) )
                    skip_until( "-->" );
                else if ( starts_with( "[CDATA[" ) )
                    skip_until( "]]>" );
                else
                    skip_declaration();
                continue;
            }
            XmlToken token;
            token.line = line;
            token.column = column;
            if ( c == '/' )
            {
                get();
                token.kind = XmlToken::End;
                token.name = read_name();
                skip_space();
                expect( '>' );
                return token;
            }
            token.kind = XmlToken::Start;
            token.name = read_name();
            for ( ;; )
            {
                skip_space();
                c = peek();
                if ( c == '/' )
                {
                    get();
                    expect( '>' );
                    token.self_closing = true;
                    return token;
                }
                if ( c == '>' )
                {
                    get();
                    return token;
                }
                std::string key = read_name();
                skip_space();
                expect( '=' );
                skip_space();
                const int q = get();
                if ( q != '"' && q != '\'' )
                    fail( "expected a quoted attribute value" );
                std::string value;
                for ( c = get(); c != q; c = get() )
                {
                    if ( c == EOF )
                        fail( "unterminated attribute value" );
                    if ( c == '&' )
                        value += entity();
                    else
                        value += static_cast< char >( c );
                }
                token.attributes[ key ] = std::move( value );
            }
        }
    }

    [[noreturn]] void fail( const std::string& message ) const { throw IoError( "XML: " + message, _line, _column ); }

private:
    int get()
    {
        const int c = _in.get();
        if ( c == '\n' )
        {
            ++_line;
            _column = 0;
        }
        else if ( c != EOF )
            ++_column;
        return c;
    }

    int peek() { return _in.peek(); }

    void expect( char want )
    {
        if ( get() != want )
            fail( std::string{ "expected '" } + want + "'" );
    }

    void skip_space()
    {
        while ( std::isspace( peek() ) )
            get();
    }

    bool starts_with( std::string_view s )
    {
        for ( std::size_t i = 0; i < s.size(); ++i )
            if ( get() != s[ i ] )
                return false;
        return true;
    }

    void skip_until( std::string_view end )
    {
        std::string window;
        for ( int c = get(); c != EOF; c = get() )
        {
            window += static_cast< char >( c );
            if ( window.size() > end.size() )
                window.erase( 0, 1 );
            if ( window == end )
                return;
        }
        fail( "unterminated markup" );
    }

    void skip_declaration()
    {
        int depth = 1;
        for ( int c = get(); c != EOF; c = get() )
        {
            depth += c == '<';
            depth -= c == '>';
            if ( depth == 0 )
                return;
        }
        fail( "unterminated declaration" );
    }

    std::string read_name()
    {
        std::string name;
        while ( peek() != EOF && !std::isspace( peek() ) && peek() != '>' && peek() != '/' && peek() != '=' )
            name += static_cast< char >( get() );
        if ( name.empty() )
            fail( "expected a name" );
        return name;
    }

    std::string entity()
    {
        std::string name;
        for ( int c = get(); c != ';'; c = get() )
        {
            if ( c == EOF || name.size() > 10 )
                fail( "bad entity" );
            name += static_cast< char >( c );
        }
        if ( name == "lt" )
            return "<";
        if ( name == "gt" )
            return ">";
        if ( name == "amp" )
            return "&";
        if ( name == "quot" )
            return "\"";
        if ( name == "apos" )
            return "'";
        if ( name.size() > 1 && name[ 0 ] == '#' )
        {
            unsigned long code = 0;
            const bool hex = name[ 1 ] == 'x' || name[ 1 ] == 'X';
            const char* first = name.data() + ( hex ? 2 : 1 );
            const auto [ ptr, ec ] = std::from_chars( first, name.data() + name.size(), code, hex ? 16 : 10 );
            if ( ec != std::errc{} || ptr != name.data() + name.size() || code > 0x10FFFF )
                fail( "bad character reference" );
            return utf8( static_cast< char32_t >( code ) );
        }
        fail( "unknown entity &" + name + ";" );
    }

    static std::string utf8( char32_t c )
    {
        std::string out;
        if ( c < 0x80 )
            out += static_cast< char >( c );
        else if ( c < 0x800 )
        {
            out += static_cast< char >( 0xC0 | ( c >> 6 ) );
            out += static_cast< char >( 0x80 | ( c & 0x3F ) );
        }
        else if ( c < 0x10000 )
        {
            out += static_cast< char >( 0xE0 | ( c >> 12 ) );
            out += static_cast< char >( 0x80 | ( ( c >> 6 ) & 0x3F ) );
            out += static_cast< char >( 0x80 | ( c & 0x3F ) );
        }
        else
        {
            out += static_cast< char >( 0xF0 | ( c >> 18 ) );
            out += static_cast< char >( 0x80 | ( ( c >> 12 ) & 0x3F ) );
            out += static_cast< char >( 0x80 | ( ( c >> 6 ) & 0x3F ) );
            out += static_cast< char >( 0x80 | ( c & 0x3F ) );
        }
        return out;
    }

    std::istream& _in;
    std::size_t _line = 1, _column = 0;
};

constexpr std::string_view concept_name = "concept:name";

Log read_xes( std::istream& in, const EventDecoder& decoder )
{
    XmlReader xml{ in };
    LogBuilder builder{ decoder };

    // element stack, so attribute elements nested in other attribute elements are skipped
    std::vector< std::string > stack;
    std::optional< Trace > trace;
    std::size_t trace_line = 0, trace_column = 0, trace_count = 0;
    std::optional< std::string > activity;
    Payload payload;
    bool in_event = false;
    std::size_t event_line = 0, event_column = 0;

    auto raise_at = []( std::size_t line, std::size_t column ) {
        return [ line, column ]( const std::string& message ) -> void { throw IoError( message, line, column ); };
    };
    auto trace_name = [ & ] { return trace && trace->id ? "trace " + *trace->id : "trace #" + std::to_string( trace_count ); };

    bool saw_log = false;
    for ( XmlToken token = xml.next(); token.kind != XmlToken::Eof; token = xml.next() )
    {
        if ( token.kind == XmlToken::Start )
        {
            const std::string parent = stack.empty() ? std::string{} : stack.back();
            if ( !token.self_closing )
                stack.push_back( token.name );
            if ( token.name == "log" && parent.empty() )
                saw_log = true;
            else if ( token.name == "trace" && parent == "log" )
            {
                trace.emplace();
                ++trace_count;
                trace_line = token.line;
                trace_column = token.column;
                if ( token.self_closing )
                {
                    builder.add( std::move( *trace ), trace_name(), raise_at( trace_line, trace_column ) );
                    trace.reset();
                }
            }
            else if ( token.name == "event" && parent == "trace" )
            {
                in_event = !token.self_closing;
                activity.reset();
                payload.clear();
                event_line = token.line;
                event_column = token.column;
                if ( token.self_closing )
                    raise_at( token.line, token.column )( trace_name() + ", event " +
                                                          std::to_string( trace->events.size() + 1 ) +
                                                          ": missing concept:name" );
            }
            else if ( ( parent == "event" && in_event ) || ( parent == "trace" && trace ) )
            {
                const auto key = token.attributes.find( "key" );
                const auto value = token.attributes.find( "value" );
                if ( key == token.attributes.end() || value == token.attributes.end() )
                    continue;
                const bool on_event = parent == "event";
                if ( key->second == concept_name )
                {
                    if ( on_event )
                        activity = value->second;
                    else
                        trace->id = value->second;
                    continue;
                }
                if ( !on_event || key->second.find( ':' ) != std::string::npos )
                    continue;
                if ( token.name == "string" )
                    payload.emplace_back( key->second, value->second );
                else if ( token.name == "int" )
                {
                    std::int64_t n = 0;
                    const auto& text = value->second;
                    const auto [ ptr, ec ] = std::from_chars( text.data(), text.data() + text.size(), n );
                    if ( ec != std::errc{} || ptr != text.data() + text.size() )
                        raise_at( token.line, token.column )( "attribute " + key->second + ": bad int value " + text );
                    payload.emplace_back( key->second, n );
                }
            }
        }
        else
        {
            if ( stack.empty() || stack.back() != token.name )
                xml.fail( "mismatched </" + token.name + ">" );
            stack.pop_back();
            const std::string parent = stack.empty() ? std::string{} : stack.back();
            if ( token.name == "event" && parent == "trace" && in_event )
            {
                in_event = false;
                const std::string where =
                    trace_name() + ", event " + std::to_string( trace->events.size() + 1 );
                auto raise = raise_at( event_line, event_column );
                if ( !activity )
                    raise( where + ": missing concept:name" );
                if ( auto event = decoder.decode( *activity, payload, where, raise ) )
                    trace->events.push_back( std::move( *event ) );
            }
            else if ( token.name == "trace" && parent == "log" && trace )
            {
                builder.add( std::move( *trace ), trace_name(), raise_at( trace_line, trace_column ) );
                trace.reset();
            }
        }
    }
    if ( !saw_log )
        throw IoError( "XES: no <log> element" );
    if ( !stack.empty() )
        throw IoError( "XES: unexpected end of document inside <" + stack.back() + ">" );
    return builder.take();
}

std::string xml_escape( std::string_view s )
{
    std::string out;
    for ( char c : s )
        switch ( c )
        {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        case '\n': out += "&#10;"; break;
        case '\r': out += "&#13;"; break;
        case '\t': out += "&#9;"; break;
        default: out += c;
        }
    return out;
}

void write_xes( std::ostream& out, const Log& log, const ProcessVocabulary& vocabulary )
{
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<log xes.version=\"1.0\" xmlns=\"http://www.xes-standard.org/\">\n"
           "  <extension name=\"Concept\" prefix=\"concept\" uri=\"http://www.xes-standard.org/concept.xesext\"/>\n";
    for ( const auto& trace : log.traces )
    {
        out << "  <trace>\n";
        if ( trace.id )
            out << "    <string key=\"concept:name\" value=\"" << xml_escape( *trace.id ) << "\"/>\n";
        for ( const auto& e : trace.events )
        {
            out << "    <event>\n      <string key=\"concept:name\" value=\"" << xml_escape( e.activity ) << "\"/>\n";
            const auto& signature = *vocabulary.find( e.activity );
            for ( std::size_t i = 0; i < e.values.size(); ++i )
            {
                const auto& key = signature.attributes()[ i ].name;
                if ( const auto* n = std::get_if< std::int64_t >( &e.values[ i ] ) )
                    out << "      <int key=\"" << xml_escape( key ) << "\" value=\"" << *n << "\"/>\n";
                else
                    out << "      <string key=\"" << xml_escape( key ) << "\" value=\""
                        << xml_escape( std::get< std::string >( e.values[ i ] ) ) << "\"/>\n";
            }
            out << "    </event>\n";
        }
        out << "  </trace>\n";
    }
    out << "</log>\n";
}

} // namespace

std::string_view to_string( LogFormat format ) { return format == LogFormat::Xes ? "xes" : "jsonl"; }

LogFormat parse_log_format( std::string_view name )
{
    if ( name == "jsonl" || name == "json" )
        return LogFormat::Jsonl;
    if ( name == "xes" )
        return LogFormat::Xes;
    throw UsageError( "unknown log format " + std::string{ name } + " (expected jsonl or xes)" );
}

LogFormat log_format_for( const std::filesystem::path& path )
{
    auto ext = path.extension().string();
    std::transform( ext.begin(), ext.end(), ext.begin(), []( unsigned char c ) { return std::tolower( c ); } );
    return ext == ".xes" ? LogFormat::Xes : LogFormat::Jsonl;
}

Log read_log( std::istream& in, const ProcessVocabulary& vocabulary, LogFormat format, const LogReadOptions& options )
{
    const EventDecoder decoder{ vocabulary, options };
    return format == LogFormat::Xes ? read_xes( in, decoder ) : read_jsonl( in, decoder );
}

Log load_log( const std::filesystem::path& path, const ProcessVocabulary& vocabulary, const LogReadOptions& options,
              std::optional< LogFormat > format )
{
    std::ifstream in{ path, std::ios::binary };
    if ( !in )
        throw IoError( "cannot open " + path.string() );
    try
    {
        return read_log( in, vocabulary, format.value_or( log_format_for( path ) ), options );
    }
    catch ( const IoError& e )
    {
        throw IoError( path.string() + ": " + e.what() );
    }
}

void write_log( std::ostream& out, const Log& log, const ProcessVocabulary& vocabulary, LogFormat format )
{
    if ( auto violations = validate_log( vocabulary, log ); !violations.empty() )
        throw ModelError( "cannot write an invalid log: " + violations.front().message );
    if ( format == LogFormat::Xes )
        write_xes( out, log, vocabulary );
    else
        write_jsonl( out, log, vocabulary );
}

void save_log( const Log& log, const std::filesystem::path& path, const ProcessVocabulary& vocabulary,
               std::optional< LogFormat > format )
{
    std::ofstream out{ path, std::ios::binary };
    if ( !out )
        throw IoError( "cannot write " + path.string() );
    write_log( out, log, vocabulary, format.value_or( log_format_for( path ) ) );
    if ( !out )
        throw IoError( "failed writing " + path.string() );
}

} // namespace dpm
