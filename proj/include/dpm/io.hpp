#pragma once

// Model files and event logs on disk.
//
// Model file:
//
//   # comment
//   activity a { n: int 0..9, colour: enum {red, green} }
//   activity "check in" {}
//   constraint G((a && n < 5) -> F b)
//
// A constraint runs to the end of its line (or to `;`) and continues on the
// following lines while parentheses are open.
//
// Logs are either JSON lines, one trace per line,
//
//   {"id":"t1","events":[{"activity":"a","attributes":{"n":3}}]}
//
// or a subset of XES: trace and event elements whose concept:name gives the
// trace id and the activity, with <int> and <string> attributes as payload.

#include "dpm/formula.hpp"
#include "dpm/model.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dpm {

struct Model
{
    ProcessVocabulary vocabulary;
    std::vector< Formula > constraints;
};

/// IoError with line and column on syntax or typing problems.
Model parse_model( std::string_view text );
Model load_model( const std::filesystem::path& path );

/// Text that parse_model reads back into an equal model.
std::string format_model( const Model& model );
void save_model( const Model& model, const std::filesystem::path& path );

enum class LogFormat
{
    Jsonl,
    Xes
};

std::string_view to_string( LogFormat format );
/// "jsonl" / "xes"; UsageError otherwise.
LogFormat parse_log_format( std::string_view name );
/// By extension: .xes is XES, anything else JSON lines.
LogFormat log_format_for( const std::filesystem::path& path );

struct LogReadOptions
{
    /// Out-of-domain integers are clamped, undecodable events and empty traces
    /// skipped, unknown attributes ignored; each with a warning instead of an error.
    bool lenient = false;
    std::function< void( const std::string& ) > warn;
};

/// IoError naming the record (line for JSON lines, line/column for XES).
Log read_log( std::istream& in, const ProcessVocabulary& vocabulary, LogFormat format,
              const LogReadOptions& options = {} );
Log load_log( const std::filesystem::path& path, const ProcessVocabulary& vocabulary,
              const LogReadOptions& options = {}, std::optional< LogFormat > format = std::nullopt );

/// ModelError when the log does not validate against the vocabulary.
void write_log( std::ostream& out, const Log& log, const ProcessVocabulary& vocabulary, LogFormat format );
void save_log( const Log& log, const std::filesystem::path& path, const ProcessVocabulary& vocabulary,
               std::optional< LogFormat > format = std::nullopt );

} // namespace dpm
