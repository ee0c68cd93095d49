#pragma once

#include <cstddef>
#include <string_view>

namespace cex {

enum class Backend { dense, gram };
enum class Direction { forward, backward };

std::string_view to_string(Backend backend);
std::string_view to_string(Direction direction);

/// BackendUnsupported for anything but "dense" or "gram".
Backend parse_backend(std::string_view name);
Direction parse_direction(std::string_view name);

/// Largest state vector (in amplitudes) the dense paths will materialize.
inline constexpr std::size_t kDenseBudget = 20'000'000;

}  // namespace cex
