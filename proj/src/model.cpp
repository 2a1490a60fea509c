#include "dpm/model.hpp"

#include "dpm/error.hpp"

#include <limits>
#include <set>

namespace dpm {

std::string to_string( const Value& value )
{
    if ( const auto* i = std::get_if< std::int64_t >( &value ) )
        return std::to_string( *i );
    return std::get< std::string >( value );
}

AttributeType AttributeType::int_range( std::int64_t lo, std::int64_t hi )
{
    if ( lo > hi )
        throw ModelError( "empty integer range " + std::to_string( lo ) + ".." + std::to_string( hi ) );
    return AttributeType{ IntRange{ lo, hi } };
}

AttributeType AttributeType::enumeration( std::vector< std::string > values )
{
    if ( values.empty() )
        throw ModelError( "empty enumeration" );
    std::set< std::string > seen;
    for ( const auto& v : values )
        if ( !seen.insert( v ).second )
            throw ModelError( "duplicate enumeration value " + v );
    return AttributeType{ Enumeration{ std::move( values ) } };
}

bool AttributeType::contains( const Value& value ) const
{
    if ( is_int() )
    {
        const auto* i = std::get_if< std::int64_t >( &value );
        return i && range().lo <= *i && *i <= range().hi;
    }
    const auto* s = std::get_if< std::string >( &value );
    return s && position( *s ).has_value();
}

std::optional< std::size_t > AttributeType::position( const std::string& symbol ) const
{
    if ( is_int() )
        return std::nullopt;
    const auto& values = enumeration().values;
    for ( std::size_t i = 0; i < values.size(); ++i )
        if ( values[ i ] == symbol )
            return i;
    return std::nullopt;
}

std::uint64_t AttributeType::size() const
{
    if ( is_enum() )
        return enumeration().values.size();
    const auto& r = range();
    // hi - lo can overflow int64 for extreme ranges
    const auto span = static_cast< std::uint64_t >( r.hi ) - static_cast< std::uint64_t >( r.lo );
    return span == std::numeric_limits< std::uint64_t >::max() ? span : span + 1;
}

Value AttributeType::at( std::uint64_t i ) const
{
    if ( is_enum() )
        return enumeration().values.at( i );
    return static_cast< std::int64_t >( static_cast< std::uint64_t >( range().lo ) + i );
}

std::string AttributeType::to_string() const
{
    if ( is_int() )
        return "int " + std::to_string( range().lo ) + ".." + std::to_string( range().hi );
    std::string out = "enum {";
    const auto& values = enumeration().values;
    for ( std::size_t i = 0; i < values.size(); ++i )
        out += ( i ? ", " : "" ) + values[ i ];
    return out + "}";
}

ActivitySignature::ActivitySignature( std::string name, std::vector< Attribute > attributes )
    : _name{ std::move( name ) }, _attributes{ std::move( attributes ) }
{
    if ( _name.empty() )
        throw ModelError( "activity with empty name" );
    std::set< std::string > seen;
    for ( const auto& attribute : _attributes )
        if ( !seen.insert( attribute.name ).second )
            throw ModelError( "activity " + _name + " declares attribute " + attribute.name + " twice" );
}

std::optional< std::size_t > ActivitySignature::attribute_index( std::string_view attribute ) const
{
    for ( std::size_t i = 0; i < _attributes.size(); ++i )
        if ( _attributes[ i ].name == attribute )
            return i;
    return std::nullopt;
}

ProcessVocabulary::ProcessVocabulary( std::vector< ActivitySignature > activities )
    : _activities{ std::move( activities ) }
{
    if ( _activities.empty() )
        throw ModelError( "vocabulary declares no activities" );
    for ( std::size_t i = 0; i < _activities.size(); ++i )
        if ( !_index.emplace( _activities[ i ].name(), i ).second )
            throw ModelError( "activity " + _activities[ i ].name() + " declared twice" );
}

std::optional< std::size_t > ProcessVocabulary::index_of( std::string_view activity ) const
{
    auto it = _index.find( std::string{ activity } );
    if ( it == _index.end() )
        return std::nullopt;
    return it->second;
}

const ActivitySignature* ProcessVocabulary::find( std::string_view activity ) const
{
    auto i = index_of( activity );
    return i ? &_activities[ *i ] : nullptr;
}

bool ProcessVocabulary::declares_attribute( std::string_view attribute ) const
{
    for ( const auto& a : _activities )
        if ( a.attribute_index( attribute ) )
            return true;
    return false;
}

std::vector< const AttributeType* > ProcessVocabulary::attribute_types( std::string_view attribute ) const
{
    std::vector< const AttributeType* > types;
    for ( const auto& a : _activities )
        if ( auto i = a.attribute_index( attribute ) )
            types.push_back( &a.attributes()[ *i ].type );
    return types;
}

const AttributeType* ProcessVocabulary::uniform_attribute_type( std::string_view attribute ) const
{
    const auto types = attribute_types( attribute );
    if ( types.empty() )
        return nullptr;
    for ( const auto* t : types )
        if ( !( *t == *types.front() ) )
            return nullptr;
    return types.front();
}

std::optional< std::string > validate_event( const ProcessVocabulary& vocabulary, const Event& event )
{
    const auto* signature = vocabulary.find( event.activity );
    if ( !signature )
        return "unknown activity " + event.activity;
    if ( event.values.size() != signature->arity() )
        return "activity " + event.activity + " expects " + std::to_string( signature->arity() ) +
               " values, got " + std::to_string( event.values.size() );
    for ( std::size_t i = 0; i < event.values.size(); ++i )
    {
        const auto& attribute = signature->attributes()[ i ];
        if ( !attribute.type.contains( event.values[ i ] ) )
            return "value " + to_string( event.values[ i ] ) + " outside D_" + event.activity + "(" +
                   attribute.name + ")";
    }
    return std::nullopt;
}

std::vector< Violation > validate_trace( const ProcessVocabulary& vocabulary, const Trace& trace )
{
    std::vector< Violation > violations;
    if ( trace.events.empty() )
        violations.push_back( { 0, "empty trace" } );
    for ( std::size_t i = 0; i < trace.events.size(); ++i )
        if ( auto v = validate_event( vocabulary, trace.events[ i ] ) )
            violations.push_back( { i + 1, std::move( *v ) } );
    return violations;
}

std::vector< Violation > validate_log( const ProcessVocabulary& vocabulary, const Log& log )
{
    std::vector< Violation > violations;
    std::set< std::string > ids;
    for ( std::size_t t = 0; t < log.traces.size(); ++t )
    {
        const auto& trace = log.traces[ t ];
        const std::string name = trace.id ? *trace.id : "#" + std::to_string( t + 1 );
        if ( trace.id && !ids.insert( *trace.id ).second )
            violations.push_back( { 0, "duplicate trace id " + *trace.id } );
        for ( auto& v : validate_trace( vocabulary, trace ) )
            violations.push_back( { v.position, "trace " + name + ": " + v.message } );
    }
    return violations;
}

std::string to_string( const Event& event, const ProcessVocabulary& vocabulary )
{
    std::string out = event.activity + "(";
    const auto* signature = vocabulary.find( event.activity );
    for ( std::size_t i = 0; i < event.values.size(); ++i )
    {
        if ( i )
            out += ", ";
        if ( signature && i < signature->arity() )
            out += signature->attributes()[ i ].name + "=";
        out += to_string( event.values[ i ] );
    }
    return out + ")";
}

} // namespace dpm
