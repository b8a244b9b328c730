#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crosspuzzle/core.hpp"

namespace crosspuzzle {

// ---------------------------------------------------------------------------
// Markdown
// ---------------------------------------------------------------------------

/// One "| a | b |" line per row with a trailing newline. Empty cells are a
/// single space; operators use "+", "-", "×", "÷".
std::string to_markdown(const Grid& grid);

/// Inverse of to_markdown up to whitespace. Accepts "x", "X", "*" for ×, "/"
/// for ÷, the minus sign for "-", and reads "l", "I" and bar-like characters
/// as the digit 1 inside otherwise numeric cells. Markdown header separator
/// rows are skipped; short rows are padded with Empty cells.
Grid parse_markdown(std::string_view text);

// ---------------------------------------------------------------------------
// Vector images
// ---------------------------------------------------------------------------

enum class StyleId : std::uint8_t { Original, Borderless, Background, AltFontColor };

inline constexpr StyleId kAllStyles[] = {StyleId::Original, StyleId::Borderless, StyleId::Background,
                                         StyleId::AltFontColor};

std::string_view to_string(StyleId s);
StyleId parse_style(std::string_view s);

struct RoleColors {
  std::string fill;
  std::string text;
};

struct Palette {
  std::string canvas;
  std::string border;
  RoleColors constant, target, oper, equals, empty;
};

enum class Background : std::uint8_t { Plain, Textured };

struct StyleSpec {
  StyleId id = StyleId::Original;
  int cell_px = 64;
  Palette palette;
  bool border = true;
  Background background = Background::Plain;
  std::string font_family;

  /// Built from resources/palettes.json.
  static StyleSpec make(StyleId id);
};

enum class ViewMode : std::uint8_t { Query, Solution };

/// What to draw. Solution mode needs the answer values for the Target cells,
/// either as a full answer grid or as answers in target order.
struct RenderView {
  ViewMode mode = ViewMode::Query;
  std::optional<Grid> answer_grid;

  static RenderView query() { return {}; }
  static RenderView solution(Grid answer_grid) { return {ViewMode::Solution, std::move(answer_grid)}; }
  static RenderView solution(const Grid& query, const std::vector<Value>& answers);
};

/// Standalone SVG document. Cell (r, c) occupies the square at
/// (c * cell_px, r * cell_px). Output is a pure function of the arguments.
std::string render_svg(const Grid& grid, const StyleSpec& style, const RenderView& view, std::uint64_t seed);

struct PlacedGlyph {
  Coord cell;
  std::string glyph;
  bool operator==(const PlacedGlyph&) const = default;
  auto operator<=>(const PlacedGlyph&) const = default;
};

/// Reads the text elements back out of a document produced by render_svg and
/// maps them to cells by position. Result is in reading order.
std::vector<PlacedGlyph> read_svg_glyphs(std::string_view svg);

/// The glyph a cell shows in an image or markdown table ("" for Empty).
std::string cell_glyph(const Cell& cell);

/// Derives a texture seed from an example id.
std::uint64_t style_seed(std::string_view example_id);

}  // namespace crosspuzzle
