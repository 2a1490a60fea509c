#pragma once

// Event log generation: traces of a fixed length that satisfy every constraint.

#include "dpm/formula.hpp"
#include "dpm/model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace dpm {

enum class GenerationMode
{
    Random,
    Exhaustive
};

struct GenerationRequest
{
    ProcessVocabulary vocabulary;
    std::vector< Formula > constraints;
    std::size_t trace_length = 1;
    std::size_t count = 1;
    bool unique = true;
    std::uint64_t seed = 0;
    GenerationMode mode = GenerationMode::Random;

    unsigned jobs = 1;
    /// Integer or enumeration domains larger than this are sampled at boundary values only.
    std::uint64_t domain_threshold = 64;
    /// Largest number of distinct events per step enumerated exactly.
    std::uint64_t branching_cap = 100000;
    /// Called with the number of traces accepted so far.
    std::function< void( std::size_t ) > progress;
};

enum class GenerationStatus
{
    Complete,
    Infeasible, // no trace of the requested length satisfies the constraints
    Exhausted   // fewer distinct traces exist (or were found) than requested
};

struct GenerationResult
{
    GenerationStatus status = GenerationStatus::Complete;
    Log log;
};

/// UsageError on t < 1, n < 1, constraints with variables, or an exhaustive
/// request over domains that would have to be approximated.
/// Same request and seed give the same log, whatever `jobs` is.
GenerationResult generate( const GenerationRequest& request );

/// Generates `request.count` traces for every length in [min_length, max_length].
GenerationResult generate_range( GenerationRequest request, std::size_t min_length, std::size_t max_length );

/// Number of distinct valid traces of length t satisfying every constraint.
/// UsageError when the per-step event space exceeds the cap or the count overflows.
std::uint64_t count_models( const ProcessVocabulary& vocabulary, const std::vector< Formula >& constraints,
                            std::size_t trace_length, std::uint64_t branching_cap = 100000 );

/// Candidate values for one attribute: the whole domain when it has at most
/// `threshold` values, otherwise its endpoints and every constant the
/// constraints compare it with, together with their neighbours.
std::vector< Value > candidate_values( const Attribute& attribute, const std::vector< Formula >& constraints,
                                       std::uint64_t threshold );

} // namespace dpm
