#pragma once

// Process vocabulary: activities, typed attributes, events, traces and logs.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace dpm {

/// An attribute value: an integer or a symbolic enumeration constant.
using Value = std::variant< std::int64_t, std::string >;

std::string to_string( const Value& value );

struct IntRange
{
    std::int64_t lo = 0;
    std::int64_t hi = 0;

    bool operator==( const IntRange& ) const = default;
};

struct Enumeration
{
    std::vector< std::string > values; // declaration order is the value order

    bool operator==( const Enumeration& ) const = default;
};

class AttributeType
{
public:
    /// Throws ModelError when lo > hi.
    static AttributeType int_range( std::int64_t lo, std::int64_t hi );
    /// Throws ModelError when empty or when values repeat.
    static AttributeType enumeration( std::vector< std::string > values );

    [[nodiscard]] bool is_int() const { return std::holds_alternative< IntRange >( _type ); }
    [[nodiscard]] bool is_enum() const { return !is_int(); }
    [[nodiscard]] const IntRange& range() const { return std::get< IntRange >( _type ); }
    [[nodiscard]] const Enumeration& enumeration() const { return std::get< Enumeration >( _type ); }

    [[nodiscard]] bool contains( const Value& value ) const;
    /// Position of a symbol in an enumeration; nullopt for ints or unknown symbols.
    [[nodiscard]] std::optional< std::size_t > position( const std::string& symbol ) const;
    /// Number of values in the domain (saturates at UINT64_MAX).
    [[nodiscard]] std::uint64_t size() const;
    /// The i-th domain value in order; i < size().
    [[nodiscard]] Value at( std::uint64_t i ) const;

    [[nodiscard]] std::string to_string() const;

    bool operator==( const AttributeType& ) const = default;

private:
    explicit AttributeType( std::variant< IntRange, Enumeration > type ) : _type{ std::move( type ) } {}

    std::variant< IntRange, Enumeration > _type;
};

struct Attribute
{
    std::string name;
    AttributeType type;

    bool operator==( const Attribute& ) const = default;
};

/// An activity name with its ordered, typed attribute slots.
class ActivitySignature
{
public:
    /// Throws ModelError on duplicate attribute names.
    ActivitySignature( std::string name, std::vector< Attribute > attributes = {} );

    [[nodiscard]] const std::string& name() const { return _name; }
    [[nodiscard]] const std::vector< Attribute >& attributes() const { return _attributes; }
    [[nodiscard]] std::size_t arity() const { return _attributes.size(); }
    [[nodiscard]] std::optional< std::size_t > attribute_index( std::string_view attribute ) const;

    bool operator==( const ActivitySignature& ) const = default;

private:
    std::string _name;
    std::vector< Attribute > _attributes;
};

class ProcessVocabulary
{
public:
    /// Throws ModelError when empty or when activity names repeat.
    explicit ProcessVocabulary( std::vector< ActivitySignature > activities );

    [[nodiscard]] const std::vector< ActivitySignature >& activities() const { return _activities; }
    [[nodiscard]] std::size_t size() const { return _activities.size(); }
    [[nodiscard]] const ActivitySignature& operator[]( std::size_t i ) const { return _activities[ i ]; }

    [[nodiscard]] std::optional< std::size_t > index_of( std::string_view activity ) const;
    [[nodiscard]] const ActivitySignature* find( std::string_view activity ) const;

    /// True when at least one activity declares the attribute.
    [[nodiscard]] bool declares_attribute( std::string_view attribute ) const;
    /// Types under which the attribute is declared, one per declaring activity.
    [[nodiscard]] std::vector< const AttributeType* > attribute_types( std::string_view attribute ) const;
    /// The attribute's type when every declaring activity agrees on it.
    [[nodiscard]] const AttributeType* uniform_attribute_type( std::string_view attribute ) const;

    bool operator==( const ProcessVocabulary& other ) const { return _activities == other._activities; }

private:
    std::vector< ActivitySignature > _activities;
    std::unordered_map< std::string, std::size_t > _index;
};

struct Event
{
    std::string activity;
    std::vector< Value > values; // one per attribute of the activity's signature

    auto operator<=>( const Event& ) const = default;
    bool operator==( const Event& ) const = default;
};

struct Trace
{
    std::vector< Event > events;
    std::optional< std::string > id;

    [[nodiscard]] std::size_t size() const { return events.size(); }
    bool operator==( const Trace& ) const = default;
};

struct Log
{
    std::vector< Trace > traces;

    [[nodiscard]] std::size_t size() const { return traces.size(); }
    bool operator==( const Log& ) const = default;
};

struct Violation
{
    std::size_t position = 0; // 1-based event position; 0 for trace- or log-level problems
    std::string message;

    bool operator==( const Violation& ) const = default;
};

/// nullopt when the event is well-typed against the vocabulary, otherwise a description.
std::optional< std::string > validate_event( const ProcessVocabulary& vocabulary, const Event& event );

/// Empty when the trace is nonempty and every event validates.
std::vector< Violation > validate_trace( const ProcessVocabulary& vocabulary, const Trace& trace );

/// Validates every trace and checks that trace ids are pairwise distinct.
/// Violation positions are trace-local; the message names the trace.
std::vector< Violation > validate_log( const ProcessVocabulary& vocabulary, const Log& log );

std::string to_string( const Event& event, const ProcessVocabulary& vocabulary );

} // namespace dpm
