#pragma once

// Two-level minimization of boolean functions given as truth tables over a
// handful of atoms.

#include <cstdint>
#include <vector>

namespace dpm::detail {

/// A cube: bit i of `care` set means atom i is constrained to bit i of `value`.
struct Cube
{
    std::uint32_t value = 0;
    std::uint32_t care = 0;

    [[nodiscard]] bool covers( std::uint32_t minterm ) const { return ( minterm & care ) == value; }
    bool operator==( const Cube& ) const = default;
};

/// Covers every minterm in `on` using cubes that avoid every minterm outside
/// `on` and `dont_care`. Exact prime generation for small widths, a decision
/// tree split otherwise. The result is deterministic.
std::vector< Cube > minimize( unsigned width, const std::vector< std::uint32_t >& on,
                              const std::vector< std::uint32_t >& dont_care );

} // namespace dpm::detail
