#pragma once

#include <string_view>

#include "crosspuzzle/core.hpp"

namespace crosspuzzle {

/// Contents of a file under resources/, compiled into the library verbatim.
/// Throws Error for unknown names.
std::string_view resource(std::string_view name);

}  // namespace crosspuzzle
