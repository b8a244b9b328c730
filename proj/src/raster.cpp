#include "crosspuzzle/raster.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <map>
#include <string>

#include "json.hpp"
#include "crosspuzzle/resources.hpp"
#include "crosspuzzle/rng.hpp"

namespace crosspuzzle {

namespace {

struct Rgb {
  std::uint8_t r = 255, g = 255, b = 255;
};

Rgb parse_hex(const std::string& hex) {
  if (hex.size() != 7 || hex[0] != '#') throw Error("bad color '" + hex + "'");
  auto byte = [&](int i) { return static_cast<std::uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)); };
  return {byte(1), byte(3), byte(5)};
}

class Canvas {
 public:
  Canvas(int w, int h, Rgb fill) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h, fill) {}

  void fill_rect(int x, int y, int w, int h, Rgb c, double alpha = 1.0) {
    const int x0 = std::max(0, x), y0 = std::max(0, y);
    const int x1 = std::min(w_, x + w), y1 = std::min(h_, y + h);
    for (int yy = y0; yy < y1; ++yy)
      for (int xx = x0; xx < x1; ++xx) {
        Rgb& d = px_[static_cast<std::size_t>(yy) * w_ + xx];
        auto mix = [alpha](std::uint8_t dst, std::uint8_t src) {
          return static_cast<std::uint8_t>(dst + (src - dst) * alpha + 0.5);
        };
        d = alpha >= 1.0 ? c : Rgb{mix(d.r, c.r), mix(d.g, c.g), mix(d.b, c.b)};
      }
  }

  void stroke_rect(int x, int y, int w, int h, int t, Rgb c) {
    fill_rect(x, y, w, t, c);
    fill_rect(x, y + h - t, w, t, c);
    fill_rect(x, y, t, h, c);
    fill_rect(x + w - t, y, t, h, c);
  }

  std::vector<std::uint8_t> png() const;

 private:
  int w_, h_;
  std::vector<Rgb> px_;
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

std::vector<std::uint8_t> Canvas::png() const {
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(h_) * (1 + 3 * w_));
  for (int y = 0; y < h_; ++y) {
    raw.push_back(0);  // filter: none
    for (int x = 0; x < w_; ++x) {
      const Rgb& p = px_[static_cast<std::size_t>(y) * w_ + x];
      raw.insert(raw.end(), {p.r, p.g, p.b});
    }
  }
  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> z(zlen);
  if (compress2(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw Error("png compression failed");
  z.resize(zlen);

  std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(w_));
  put_u32(ihdr, static_cast<std::uint32_t>(h_));
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});  // 8-bit RGB
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", z);
  put_chunk(out, "IEND", {});
  return out;
}

// 5x7 bitmap font, one string per row, '#' = ink.
using Glyph = std::array<const char*, 7>;

const std::map<std::string, Glyph>& font() {
  static const std::map<std::string, Glyph> kFont{
      {"0", {" ### ", "#   #", "#  ##", "# # #", "##  #", "#   #", " ### "}},
      {"1", {"  #  ", " ##  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "}},
      {"2", {" ### ", "#   #", "    #", "   # ", "  #  ", " #   ", "#####"}},
      {"3", {"#####", "   # ", "  #  ", "   # ", "    #", "#   #", " ### "}},
      {"4", {"   # ", "  ## ", " # # ", "#  # ", "#####", "   # ", "   # "}},
      {"5", {"#####", "#    ", "#### ", "    #", "    #", "#   #", " ### "}},
      {"6", {"  ## ", " #   ", "#    ", "#### ", "#   #", "#   #", " ### "}},
      {"7", {"#####", "    #", "   # ", "  #  ", " #   ", " #   ", " #   "}},
      {"8", {" ### ", "#   #", "#   #", " ### ", "#   #", "#   #", " ### "}},
      {"9", {" ### ", "#   #", "#   #", " ####", "    #", "   # ", " ##  "}},
      {"?", {" ### ", "#   #", "    #", "   # ", "  #  ", "     ", "  #  "}},
      {"+", {"     ", "  #  ", "  #  ", "#####", "  #  ", "  #  ", "     "}},
      {"-", {"     ", "     ", "     ", "#####", "     ", "     ", "     "}},
      {"=", {"     ", "     ", "#####", "     ", "#####", "     ", "     "}},
      {"×", {"     ", "#   #", " # # ", "  #  ", " # # ", "#   #", "     "}},
      {"÷", {"     ", "  #  ", "     ", "#####", "     ", "  #  ", "     "}},
  };
  return kFont;
}

// Splits a glyph string into font keys (handles the multi-byte × and ÷).
std::vector<std::string> font_keys(const std::string& s) {
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < s.size();) {
    const std::size_t len = (static_cast<unsigned char>(s[i]) < 0x80) ? 1 : 2;
    keys.push_back(s.substr(i, len));
    i += len;
  }
  return keys;
}

void draw_text(Canvas& canvas, const std::string& text, int cx, int cy, int cell_px, Rgb color, bool bold) {
  const auto keys = font_keys(text);
  const int n = static_cast<int>(keys.size());
  const int scale = std::max(1, std::min(cell_px / 16, (cell_px - 8) / (6 * n - 1)));
  const int w = (6 * n - 1) * scale;
  const int h = 7 * scale;
  const int x0 = cx - w / 2;
  const int y0 = cy - h / 2;
  for (int k = 0; k < n; ++k) {
    auto it = font().find(keys[k]);
    if (it == font().end()) throw Error("no bitmap glyph for '" + keys[k] + "'");
    for (int row = 0; row < 7; ++row)
      for (int col = 0; col < 5; ++col)
        if (it->second[row][col] == '#') {
          const int x = x0 + (6 * k + col) * scale;
          const int y = y0 + row * scale;
          canvas.fill_rect(x, y, scale + (bold ? 1 : 0), scale, color);
        }
  }
}

}  // namespace

std::vector<std::uint8_t> render_png(const Grid& grid, const StyleSpec& style, const RenderView& view,
                                     std::uint64_t seed) {
  if (view.mode == ViewMode::Solution && !view.answer_grid) throw Error("solution view requires answers");
  const int px = style.cell_px;
  const int width = grid.cols() * px;
  const int height = grid.rows() * px;
  const Palette& pal = style.palette;

  auto role = [&](CellKind k) -> const RoleColors& {
    switch (k) {
      case CellKind::Number: return pal.constant;
      case CellKind::Target: return pal.target;
      case CellKind::Operator: return pal.oper;
      case CellKind::Equals: return pal.equals;
      case CellKind::Empty: break;
    }
    return pal.empty;
  };

  Canvas canvas(width, height, parse_hex(pal.canvas));
  if (style.background == Background::Textured) {
    // Mirrors the texture render_svg emits for the same seed.
    const auto cfg = nlohmann::json::parse(resource("palettes.json")).at("texture");
    const auto tones = cfg.at("tones").get<std::vector<std::string>>();
    const double opacity = std::stod(cfg.at("opacity").get<std::string>());
    canvas.fill_rect(0, 0, width, height, parse_hex(cfg.at("base").get<std::string>()));
    Rng rng(seed);
    const int patches = cfg.at("patches").get<int>();
    for (int i = 0; i < patches; ++i) {
      const auto w = rng.uniform(px / 4, px * 2);
      const auto h = rng.uniform(px / 4, px * 2);
      const auto x = rng.uniform(-px / 2, width);
      const auto y = rng.uniform(-px / 2, height);
      const auto tone = parse_hex(tones[rng.index(tones.size())]);
      canvas.fill_rect(static_cast<int>(x), static_cast<int>(y), static_cast<int>(w), static_cast<int>(h), tone,
                       opacity);
    }
  }

  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c) {
      const Cell& cell = grid.at(r, c);
      if (cell.is_empty()) continue;
      canvas.fill_rect(c * px, r * px, px, px, parse_hex(role(cell.kind).fill));
      if (style.border) canvas.stroke_rect(c * px + 1, r * px + 1, px - 2, px - 2, 2, parse_hex(pal.border));
    }

  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c) {
      const Cell& cell = grid.at(r, c);
      if (cell.is_empty()) continue;
      std::string glyph = cell_glyph(cell);
      bool bold = style.id == StyleId::AltFontColor;
      if (cell.kind == CellKind::Target && view.mode == ViewMode::Solution) {
        glyph = cell_glyph(view.answer_grid->at(r, c));
        bold = true;
      }
      draw_text(canvas, glyph, c * px + px / 2, r * px + px / 2, px, parse_hex(role(cell.kind).text), bold);
    }
  return canvas.png();
}

}  // namespace crosspuzzle
