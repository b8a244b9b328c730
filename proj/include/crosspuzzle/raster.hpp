#pragma once

#include <cstdint>
#include <vector>

#include "crosspuzzle/render.hpp"

namespace crosspuzzle {

/// Rasterizes the same layout render_svg describes into an RGB PNG. Glyphs
/// come from a built-in 5x7 bitmap font, so pixels are deterministic and
/// independent of installed fonts.
std::vector<std::uint8_t> render_png(const Grid& grid, const StyleSpec& style, const RenderView& view,
                                     std::uint64_t seed);

}  // namespace crosspuzzle
