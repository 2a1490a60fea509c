#include "dpm/conformance.hpp"

#include "dpm/error.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace dpm {

bool ConformanceReport::trace_conforms( std::size_t trace ) const
{
    const auto& row = verdicts.at( trace );
    return std::all_of( row.begin(), row.end(), []( bool v ) { return v; } );
}

bool ConformanceReport::conforms() const { return num_conforming() == verdicts.size(); }

std::size_t ConformanceReport::num_conforming() const
{
    std::size_t n = 0;
    for ( std::size_t i = 0; i < verdicts.size(); ++i )
        n += trace_conforms( i );
    return n;
}

std::string trace_label( const Trace& trace, std::size_t index )
{
    return trace.id ? *trace.id : std::to_string( index + 1 );
}

void parallel_for( std::size_t count, unsigned jobs, const std::function< void( std::size_t ) >& body )
{
    jobs = std::max( 1u, std::min< unsigned >( jobs, static_cast< unsigned >( std::min< std::size_t >( count, 1024 ) ) ) );
    if ( jobs <= 1 )
    {
        for ( std::size_t i = 0; i < count; ++i )
            body( i );
        return;
    }
    std::atomic< std::size_t > next{ 0 };
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector< std::thread > workers;
    for ( unsigned w = 0; w < jobs; ++w )
        workers.emplace_back( [ & ] {
            for ( std::size_t i = next++; i < count; i = next++ )
            {
                try
                {
                    body( i );
                }
                catch ( ... )
                {
                    std::lock_guard lock{ failure_mutex };
                    if ( !failure )
                        failure = std::current_exception();
                    next = count;
                }
            }
        } );
    for ( auto& w : workers )
        w.join();
    if ( failure )
        std::rethrow_exception( failure );
}

ConformanceChecker::ConformanceChecker( const ProcessVocabulary& vocabulary, std::vector< Formula > constraints )
    : _vocabulary{ vocabulary }, _constraints{ std::move( constraints ) }
{
    Progression progression{ vocabulary };
    for ( std::size_t i = 0; i < _constraints.size(); ++i )
    {
        if ( !variables_of( _constraints[ i ] ).empty() )
            throw UsageError( "constraint " + std::to_string( i + 1 ) + " contains activity variables" );
        _automata.push_back( compile( progression, _constraints[ i ], static_cast< int >( i + 1 ) ) );
    }
}

std::vector< bool > ConformanceChecker::check( const Trace& trace ) const
{
    if ( auto violations = validate_trace( _vocabulary, trace ); !violations.empty() )
    {
        const auto& v = violations.front();
        throw ModelError( "invalid trace" + ( v.position ? " at event " + std::to_string( v.position ) : std::string{} ) +
                          ": " + v.message );
    }
    std::vector< bool > out;
    out.reserve( _automata.size() );
    for ( const auto& a : _automata )
        out.push_back( accepts( a, _vocabulary, trace ) );
    return out;
}

ConformanceReport ConformanceChecker::check( const Log& log, unsigned jobs ) const
{
    ConformanceReport report;
    report.verdicts.resize( log.size() );
    for ( std::size_t i = 0; i < log.size(); ++i )
        report.trace_ids.push_back( trace_label( log.traces[ i ], i ) );
    parallel_for( log.size(), jobs, [ & ]( std::size_t i ) {
        try
        {
            report.verdicts[ i ] = check( log.traces[ i ] );
        }
        catch ( const ModelError& e )
        {
            throw ModelError( "trace " + report.trace_ids[ i ] + ": " + e.what() );
        }
    } );
    return report;
}

std::vector< bool > check_trace( const ProcessVocabulary& vocabulary, const Trace& trace,
                                 const std::vector< Formula >& constraints )
{
    return ConformanceChecker{ vocabulary, constraints }.check( trace );
}

ConformanceReport check_log( const ProcessVocabulary& vocabulary, const Log& log,
                             const std::vector< Formula >& constraints, unsigned jobs )
{
    return ConformanceChecker{ vocabulary, constraints }.check( log, jobs );
}

} // namespace dpm
