#include "dpm/cli.hpp"

#include "dpm/asp.hpp"
#include "dpm/conformance.hpp"
#include "dpm/error.hpp"
#include "dpm/io.hpp"
#include "dpm/loggen.hpp"
#include "dpm/querycheck.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace dpm::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Common
{
    std::string model;
    std::string log;
    std::string log_format;
    std::string output;
    bool lenient = false;
    unsigned jobs = 1;
    bool exit_zero = false;
    bool cross_check = false;
    std::string solver;
};

struct CheckOptions : Common
{
    std::string report = "text";
};

struct GenerateOptions : Common
{
    std::size_t length = 0;
    std::size_t max_length = 0;
    std::size_t count = 1;
    std::uint64_t seed = 0;
    std::string mode = "random";
    bool unique = true;
    std::string format;
    bool progress = false;
    std::uint64_t domain_threshold = 64;
};

struct QueryOptionsCli : Common
{
    std::string query;
    std::string report = "text";
    bool diagnostics = false;
};

struct EmitOptions : Common
{
    std::string problem;
    std::size_t length = 0;
    std::string query;
};

class Output
{
public:
    Output( const std::string& path, std::ostream& fallback )
    {
        if ( path.empty() || path == "-" )
        {
            _stream = &fallback;
            return;
        }
        _file.open( path, std::ios::binary );
        if ( !_file )
            throw IoError( "cannot write " + path );
        _stream = &_file;
    }

    std::ostream& stream() { return *_stream; }

    void close()
    {
        if ( _file.is_open() )
        {
            _file.close();
            if ( !_file )
                throw IoError( "failed writing output" );
        }
        else
            _stream->flush();
    }

private:
    std::ofstream _file;
    std::ostream* _stream = nullptr;
};

Log read_input_log( const Common& o, const ProcessVocabulary& vocabulary, std::ostream& err )
{
    LogReadOptions options;
    options.lenient = o.lenient;
    options.warn = [ &err ]( const std::string& m ) { err << "warning: " << m << "\n"; };
    std::optional< LogFormat > format;
    if ( !o.log_format.empty() )
        format = parse_log_format( o.log_format );
    if ( o.log == "-" )
        return read_log( std::cin, vocabulary, format.value_or( LogFormat::Jsonl ), options );
    return load_log( o.log, vocabulary, options, format );
}

std::string solver_command( const Common& o )
{
    if ( !o.solver.empty() )
        return o.solver;
    if ( const char* env = std::getenv( "DPM_ASP_SOLVER" ); env && *env )
        return env;
    throw UsageError( "--cross-check needs a solver: pass --solver or set DPM_ASP_SOLVER" );
}

void cross_check_failed( const std::string& what ) { throw Error( "cross-check failed: " + what ); }

int verdict( bool positive, const Common& o ) { return positive || o.exit_zero ? Success : Negative; }

// ---------------------------------------------------------------------------

int run_check( const CheckOptions& o, std::ostream& out, std::ostream& err )
{
    const Model model = load_model( o.model );
    const Log log = read_input_log( o, model.vocabulary, err );
    const auto report = check_log( model.vocabulary, log, model.constraints, o.jobs );

    Output output{ o.output, out };
    auto& s = output.stream();
    if ( o.report == "json" )
    {
        ordered_json doc;
        doc[ "constraints" ] = ordered_json::array();
        for ( const auto& c : model.constraints )
            doc[ "constraints" ].push_back( to_string( c ) );
        doc[ "traces" ] = ordered_json::array();
        for ( std::size_t i = 0; i < log.size(); ++i )
        {
            ordered_json row;
            row[ "id" ] = report.trace_ids[ i ];
            row[ "verdicts" ] = report.verdicts[ i ];
            row[ "conforms" ] = report.trace_conforms( i );
            doc[ "traces" ].push_back( std::move( row ) );
        }
        doc[ "conforming_traces" ] = report.num_conforming();
        doc[ "total_traces" ] = log.size();
        doc[ "conforms" ] = report.conforms();
        s << doc.dump( 2 ) << "\n";
    }
    else
    {
        for ( std::size_t i = 0; i < log.size(); ++i )
            for ( std::size_t c = 0; c < model.constraints.size(); ++c )
                s << report.trace_ids[ i ] << " " << c + 1 << " " << ( report.verdicts[ i ][ c ] ? "true" : "false" )
                  << "\n";
        s << "# conforming traces: " << report.num_conforming() << " of " << log.size() << "\n";
        s << "# log conforms: " << ( report.conforms() ? "true" : "false" ) << "\n";
    }
    output.close();

    if ( o.cross_check )
    {
        const auto outcome = run_solver( solver_command( o ), emit_conformance( model.vocabulary, model.constraints, log ) );
        if ( outcome.satisfiable != report.conforms() )
            cross_check_failed( std::string{ "solver says the log " } + ( outcome.satisfiable ? "conforms" : "does not conform" ) );
        err << "cross-check: solver agrees\n";
    }
    return verdict( report.conforms(), o );
}

int run_generate( const GenerateOptions& o, std::ostream& out, std::ostream& err )
{
    Model model = load_model( o.model );
    if ( o.mode != "random" && o.mode != "exhaustive" )
        throw UsageError( "--mode must be random or exhaustive" );
    if ( o.max_length && o.max_length < o.length )
        throw UsageError( "--max-length is below --length" );

    GenerationRequest request{ model.vocabulary, model.constraints, 1, 1, true, 0, GenerationMode::Random, 1, 64, 100000, {} };
    request.trace_length = o.length;
    request.count = o.count;
    request.unique = o.unique;
    request.seed = o.seed;
    request.mode = o.mode == "exhaustive" ? GenerationMode::Exhaustive : GenerationMode::Random;
    request.jobs = o.jobs;
    request.domain_threshold = o.domain_threshold;
    if ( o.progress )
        request.progress = [ &err ]( std::size_t done ) { err << "generated " << done << " traces\n"; };

    const auto result =
        o.max_length ? generate_range( request, o.length, o.max_length ) : generate( request );

    if ( result.status == GenerationStatus::Infeasible )
        err << "no trace of the requested length satisfies the constraints\n";
    else
    {
        if ( result.status == GenerationStatus::Exhausted )
            err << "warning: only " << result.log.size() << " distinct traces found, " << o.count << " requested\n";
        LogFormat format = LogFormat::Jsonl;
        if ( !o.format.empty() )
            format = parse_log_format( o.format );
        else if ( !o.output.empty() && o.output != "-" )
            format = log_format_for( o.output );
        Output output{ o.output, out };
        write_log( output.stream(), result.log, model.vocabulary, format );
        output.close();
    }

    if ( o.cross_check )
    {
        const auto command = solver_command( o );
        for ( std::size_t t = o.length; t <= std::max( o.length, o.max_length ); ++t )
        {
            const auto outcome = run_solver( command, emit_generation( model.vocabulary, model.constraints, t ) );
            std::set< std::vector< Event > > native;
            bool feasible = false;
            for ( const auto& trace : result.log.traces )
                if ( trace.size() == t )
                {
                    native.insert( trace.events );
                    feasible = true;
                }
            if ( outcome.satisfiable != feasible && !( outcome.satisfiable && result.status == GenerationStatus::Infeasible ) )
                cross_check_failed( "solver and generator disagree on feasibility for length " + std::to_string( t ) );
            if ( outcome.satisfiable && result.status == GenerationStatus::Infeasible )
                cross_check_failed( "solver finds traces of length " + std::to_string( t ) );
            std::set< std::vector< Event > > solved;
            for ( const auto& trace : decode_traces( outcome, model.vocabulary ) )
                solved.insert( trace.events );
            for ( const auto& events : native )
                if ( !solved.count( events ) )
                    cross_check_failed( "a generated trace is not an answer set" );
            if ( request.mode == GenerationMode::Exhaustive && result.status == GenerationStatus::Exhausted &&
                 solved != native )
                cross_check_failed( "solver finds traces the exhaustive generator missed" );
        }
        err << "cross-check: solver agrees\n";
    }
    return verdict( result.status != GenerationStatus::Infeasible, o );
}

int run_query( const QueryOptionsCli& o, std::ostream& out, std::ostream& err )
{
    const Model model = load_model( o.model );
    Formula query;
    if ( !o.query.empty() )
        query = parse_formula( o.query, model.vocabulary );
    else if ( model.constraints.size() == 1 )
        query = model.constraints.front();
    else
        throw UsageError( "pass the query with -q, or give the model exactly one constraint" );

    const Log log = read_input_log( o, model.vocabulary, err );
    QueryOptions options;
    options.jobs = o.jobs;
    options.diagnostics = o.diagnostics;
    const auto result = query_check( log, query, model.vocabulary, options );

    Output output{ o.output, out };
    auto& s = output.stream();
    if ( o.report == "json" )
    {
        ordered_json doc;
        doc[ "query" ] = to_string( query );
        doc[ "variables" ] = result.variables;
        doc[ "assignments" ] = ordered_json::array();
        for ( const auto& a : result.assignments )
            doc[ "assignments" ].push_back( a );
        if ( o.diagnostics )
        {
            doc[ "support" ] = ordered_json::array();
            for ( const auto& [ a, n ] : result.support )
                doc[ "support" ].push_back( ordered_json{ { "assignment", a }, { "traces", n } } );
            doc[ "total_traces" ] = log.size();
        }
        s << doc.dump( 2 ) << "\n";
    }
    else
    {
        for ( const auto& a : result.assignments )
            s << ( a.empty() ? std::string{ "(empty assignment)" } : to_string( a ) ) << "\n";
        if ( o.diagnostics )
            for ( const auto& [ a, n ] : result.support )
                s << "# " << ( a.empty() ? std::string{ "(empty assignment)" } : to_string( a ) ) << " holds on " << n
                  << " of " << log.size() << " traces\n";
    }
    output.close();

    if ( o.cross_check )
    {
        const auto outcome = run_solver( solver_command( o ), emit_query( model.vocabulary, query, log ) );
        auto native = result.assignments;
        std::sort( native.begin(), native.end() );
        if ( decode_assignments( outcome ) != native )
            cross_check_failed( "solver finds a different set of assignments" );
        err << "cross-check: solver agrees\n";
    }
    return verdict( !result.assignments.empty(), o );
}

int run_emit( const EmitOptions& o, std::ostream& out, std::ostream& err )
{
    const Model model = load_model( o.model );
    AspProgram program;
    if ( o.problem == "generation" || o.problem == "generate" )
    {
        if ( o.length < 1 )
            throw UsageError( "generation needs --length" );
        program = emit_generation( model.vocabulary, model.constraints, o.length );
    }
    else if ( o.problem == "conformance" || o.problem == "check" )
    {
        if ( o.log.empty() )
            throw UsageError( "conformance needs --log" );
        program = emit_conformance( model.vocabulary, model.constraints, read_input_log( o, model.vocabulary, err ) );
    }
    else if ( o.problem == "query" )
    {
        if ( o.log.empty() )
            throw UsageError( "query needs --log" );
        Formula query;
        if ( !o.query.empty() )
            query = parse_formula( o.query, model.vocabulary );
        else if ( model.constraints.size() == 1 )
            query = model.constraints.front();
        else
            throw UsageError( "pass the query with -q, or give the model exactly one constraint" );
        program = emit_query( model.vocabulary, query, read_input_log( o, model.vocabulary, err ) );
    }
    else
        throw UsageError( "unknown problem " + o.problem + " (expected generation, conformance or query)" );

    const std::string text = program.text();
    if ( auto problems = validate_asp( text ); !problems.empty() )
        throw Error( "emitted program failed the syntax check: " + problems.front() );

    std::string path = o.output;
    if ( !path.empty() && fs::is_directory( path ) )
        path = ( fs::path{ path } / ( fs::path{ o.model }.stem().string() + "." + std::string{ to_string( program.problem ) } + ".lp" ) )
                   .string();
    Output output{ path, out };
    output.stream() << text;
    output.close();
    if ( path != o.output )
        err << "wrote " << path << "\n";
    return Success;
}

void add_common( CLI::App& cmd, Common& o, bool needs_log )
{
    cmd.add_option( "-m,--model", o.model, "Model file" )->required()->check( CLI::ExistingFile );
    if ( needs_log )
        cmd.add_option( "-l,--log", o.log, "Log file (JSON lines or XES; - for standard input)" )->required();
    cmd.add_option( "--log-format", o.log_format, "Input log format: jsonl or xes (default: by extension)" );
    cmd.add_flag( "--lenient", o.lenient, "Clamp or skip undecodable log records with a warning" );
    cmd.add_option( "-o,--output", o.output, "Output file (default: standard output)" );
    cmd.add_option( "-j,--jobs", o.jobs, "Worker threads" )->check( CLI::Range( 1u, 1024u ) );
    cmd.add_flag( "--exit-zero", o.exit_zero, "Exit 0 on negative answers too" );
    cmd.add_flag( "--cross-check", o.cross_check, "Confirm the answer with an external ASP solver" );
    cmd.add_option( "--solver", o.solver, "Solver command for --cross-check (default: $DPM_ASP_SOLVER)" );
}

} // namespace

int run( const std::vector< std::string >& args, std::ostream& out, std::ostream& err )
{
    CLI::App app{ "Declarative process mining over temporal constraints with data", "dpm" };
    app.require_subcommand( 1 );
    app.set_help_all_flag( "--help-all", "Help for every subcommand" );

    CheckOptions check;
    auto* check_cmd = app.add_subcommand( "check", "Check a log against the model's constraints" );
    add_common( *check_cmd, check, true );
    check_cmd->add_option( "--report", check.report, "Report format: text or json" )
        ->check( CLI::IsMember( { "text", "json" } ) );

    GenerateOptions gen;
    auto* gen_cmd = app.add_subcommand( "generate", "Generate traces that satisfy the model's constraints" );
    add_common( *gen_cmd, gen, false );
    gen_cmd->add_option( "-t,--length", gen.length, "Trace length" )->required()->check( CLI::PositiveNumber );
    gen_cmd->add_option( "--max-length", gen.max_length, "Generate every length from --length up to this" );
    gen_cmd->add_option( "-n,--count", gen.count, "Traces to generate (per length)" )->check( CLI::PositiveNumber );
    gen_cmd->add_option( "--seed", gen.seed, "Random seed" );
    gen_cmd->add_option( "--mode", gen.mode, "random or exhaustive" )->check( CLI::IsMember( { "random", "exhaustive" } ) );
    gen_cmd->add_flag( "--unique,!--no-unique", gen.unique, "Require pairwise distinct traces (default on)" );
    gen_cmd->add_option( "--format", gen.format, "Output log format: jsonl or xes" );
    gen_cmd->add_flag( "--progress", gen.progress, "Report progress on standard error" );
    gen_cmd->add_option( "--domain-threshold", gen.domain_threshold,
                         "Domains above this size are sampled at boundary values" );

    QueryOptionsCli query;
    auto* query_cmd = app.add_subcommand( "query", "Find the activity assignments under which a query holds on the log" );
    add_common( *query_cmd, query, true );
    query_cmd->add_option( "-q,--query", query.query, "Query formula (default: the model's only constraint)" );
    query_cmd->add_option( "--report", query.report, "Report format: text or json" )
        ->check( CLI::IsMember( { "text", "json" } ) );
    query_cmd->add_flag( "--diagnostics", query.diagnostics, "Count satisfied traces for every candidate" );

    EmitOptions emit;
    auto* emit_cmd = app.add_subcommand( "emit-asp", "Write the answer set program for a problem" );
    emit_cmd->add_option( "problem", emit.problem, "generation, conformance or query" )->required();
    emit_cmd->add_option( "-m,--model", emit.model, "Model file" )->required()->check( CLI::ExistingFile );
    emit_cmd->add_option( "-l,--log", emit.log, "Log file (conformance, query)" );
    emit_cmd->add_option( "--log-format", emit.log_format, "Input log format: jsonl or xes" );
    emit_cmd->add_flag( "--lenient", emit.lenient, "Clamp or skip undecodable log records with a warning" );
    emit_cmd->add_option( "-t,--length", emit.length, "Trace length (generation)" );
    emit_cmd->add_option( "-q,--query", emit.query, "Query formula" );
    emit_cmd->add_option( "-o,--output", emit.output, "Output file or directory" );

    std::vector< std::string > reversed( args.rbegin(), args.rend() );
    try
    {
        app.parse( reversed );
    }
    catch ( const CLI::CallForHelp& e )
    {
        out << app.help();
        return Success;
    }
    catch ( const CLI::CallForAllHelp& e )
    {
        out << app.help( "", CLI::AppFormatMode::All );
        return Success;
    }
    catch ( const CLI::ParseError& e )
    {
        // subcommand help requests come through here too
        if ( e.get_exit_code() == 0 )
        {
            for ( auto* sub : app.get_subcommands() )
                out << sub->help();
            if ( app.get_subcommands().empty() )
                out << app.help();
            return Success;
        }
        err << "error: " << e.what() << "\n";
        return Failure;
    }

    try
    {
        if ( *check_cmd )
            return run_check( check, out, err );
        if ( *gen_cmd )
            return run_generate( gen, out, err );
        if ( *query_cmd )
            return run_query( query, out, err );
        if ( *emit_cmd )
            return run_emit( emit, out, err );
    }
    catch ( const std::exception& e )
    {
        err << "error: " << e.what() << "\n";
        return Failure;
    }
    return Failure;
}

int run( int argc, const char* const* argv )
{
    std::vector< std::string > args( argv + 1, argv + argc );
    return run( args, std::cout, std::cerr );
}

} // namespace dpm::cli
