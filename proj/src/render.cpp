#include "crosspuzzle/render.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <regex>
#include <sstream>

#include "crosspuzzle/resources.hpp"
#include "crosspuzzle/rng.hpp"

namespace crosspuzzle {

namespace {

constexpr std::string_view kWhitespace = " \t\r\f\v";
constexpr std::string_view kNbsp = "\xC2\xA0";

std::string_view trim(std::string_view s) {
  for (;;) {
    const auto before = s.size();
    while (!s.empty() && kWhitespace.find(s.front()) != std::string_view::npos) s.remove_prefix(1);
    while (!s.empty() && kWhitespace.find(s.back()) != std::string_view::npos) s.remove_suffix(1);
    if (s.starts_with(kNbsp)) s.remove_prefix(kNbsp.size());
    if (s.ends_with(kNbsp)) s.remove_suffix(kNbsp.size());
    if (s.size() == before) return s;
  }
}

bool is_separator_row(const std::vector<std::string_view>& cells) {
  static const std::regex kSep(R"(^:?-{3,}:?$)");
  if (cells.empty()) return false;
  return std::all_of(cells.begin(), cells.end(), [](std::string_view c) {
    return std::regex_match(c.begin(), c.end(), kSep);
  });
}

// Characters an OCR pass commonly produces in place of the digit 1.
constexpr std::string_view kOneAliases[] = {"l", "I", "\xC2\xA6" /* ¦ */, "\xE2\x94\x82" /* │ */,
                                            "\xC7\x80" /* ǀ */};

std::optional<std::string> as_digits(std::string_view s) {
  std::string out;
  while (!s.empty()) {
    if (s.front() >= '0' && s.front() <= '9') {
      out += s.front();
      s.remove_prefix(1);
      continue;
    }
    bool matched = false;
    for (std::string_view alias : kOneAliases)
      if (s.starts_with(alias)) {
        out += '1';
        s.remove_prefix(alias.size());
        matched = true;
        break;
      }
    if (!matched) return std::nullopt;
  }
  if (out.empty()) return std::nullopt;
  return out;
}

Cell parse_cell(std::string_view raw, int line, int column) {
  const std::string_view s = trim(raw);
  if (s.empty()) return Cell::empty();
  if (s == "?" || s == "\xEF\xBC\x9F" /* ？ */) return Cell::target();
  if (s == "=") return Cell::equals();
  if (s == "+") return Cell::oper(Op::Add);
  if (s == "-" || s == "\xE2\x88\x92" /* − */ || s == "\xE2\x80\x93" /* – */) return Cell::oper(Op::Sub);
  if (s == "×" || s == "x" || s == "X" || s == "*") return Cell::oper(Op::Mul);
  if (s == "÷" || s == "/") return Cell::oper(Op::Div);
  if (auto digits = as_digits(s)) {
    Value v = 0;
    const auto [ptr, ec] = std::from_chars(digits->data(), digits->data() + digits->size(), v);
    if (ec != std::errc{} || ptr != digits->data() + digits->size())
      throw ParseError(line, column, "number '" + std::string(s) + "' is out of range");
    if (v < 1) throw ParseError(line, column, "number '" + std::string(s) + "' is not positive");
    return Cell::number(v);
  }
  throw ParseError(line, column, "unrecognized cell '" + std::string(s) + "'");
}

// --- svg helpers ----------------------------------------------------------

const nlohmann::json& palette_config() {
  static const nlohmann::json cfg = nlohmann::json::parse(resource("palettes.json"));
  return cfg;
}

Palette palette_from(const nlohmann::json& j) {
  auto role = [&](const char* name) {
    return RoleColors{j.at(name).at("fill").get<std::string>(), j.at(name).at("text").get<std::string>()};
  };
  return Palette{j.at("canvas").get<std::string>(), j.at("border").get<std::string>(), role("constant"),
                 role("target"), role("operator"), role("equals"), role("empty")};
}

const RoleColors& role_colors(const Palette& p, CellKind kind) {
  switch (kind) {
    case CellKind::Number: return p.constant;
    case CellKind::Target: return p.target;
    case CellKind::Operator: return p.oper;
    case CellKind::Equals: return p.equals;
    case CellKind::Empty: break;
  }
  return p.empty;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string cell_glyph(const Cell& cell) {
  switch (cell.kind) {
    case CellKind::Empty: return "";
    case CellKind::Number: return std::to_string(cell.value);
    case CellKind::Operator: return std::string(op_glyph(cell.op));
    case CellKind::Equals: return "=";
    case CellKind::Target: return "?";
  }
  return "";
}

std::string to_markdown(const Grid& grid) {
  std::string out;
  for (int r = 0; r < grid.rows(); ++r) {
    out += '|';
    for (int c = 0; c < grid.cols(); ++c) {
      const std::string g = cell_glyph(grid.at(r, c));
      out += ' ';
      out += g.empty() ? " " : g;
      out += " |";
    }
    out += '\n';
  }
  return out;
}

Grid parse_markdown(std::string_view text) {
  std::vector<std::vector<Cell>> rows;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) continue;

    const auto first = line.find('|');
    const auto last = line.rfind('|');
    if (first == std::string_view::npos || first == last)
      throw ParseError(line_no, 0, "row needs at least two '|' delimiters");

    std::vector<std::string_view> raw;
    std::string_view body = line.substr(first + 1, last - first - 1);
    for (;;) {
      const auto bar = body.find('|');
      raw.push_back(body.substr(0, bar));
      if (bar == std::string_view::npos) break;
      body.remove_prefix(bar + 1);
    }
    std::vector<std::string_view> trimmed;
    for (auto c : raw) trimmed.push_back(trim(c));
    if (is_separator_row(trimmed)) continue;

    std::vector<Cell> row;
    for (std::size_t i = 0; i < raw.size(); ++i) row.push_back(parse_cell(raw[i], line_no, static_cast<int>(i) + 1));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(line_no, 0, "no grid rows found");

  std::size_t cols = 0;
  for (const auto& r : rows) cols = std::max(cols, r.size());
  Grid grid(static_cast<int>(rows.size()), static_cast<int>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      grid.set({static_cast<int>(r), static_cast<int>(c)}, rows[r][c]);
  return grid;
}

std::string_view to_string(StyleId s) {
  switch (s) {
    case StyleId::Original: return "original";
    case StyleId::Borderless: return "borderless";
    case StyleId::Background: return "background";
    case StyleId::AltFontColor: return "altfontcolor";
  }
  return "original";
}

StyleId parse_style(std::string_view s) {
  for (StyleId id : kAllStyles)
    if (to_string(id) == s) return id;
  throw ConfigError("unknown style '" + std::string(s) + "'");
}

StyleSpec StyleSpec::make(StyleId id) {
  const auto& cfg = palette_config();
  StyleSpec spec;
  spec.id = id;
  spec.palette = palette_from(cfg.at("palettes").at(id == StyleId::AltFontColor ? "alt" : "default"));
  spec.font_family = cfg.at("fonts").at(id == StyleId::AltFontColor ? "alt" : "default").get<std::string>();
  spec.border = id != StyleId::Borderless;
  spec.background = id == StyleId::Background ? Background::Textured : Background::Plain;
  return spec;
}

RenderView RenderView::solution(const Grid& query, const std::vector<Value>& answers) {
  return solution(fill_targets(query, answers));
}

std::string render_svg(const Grid& grid, const StyleSpec& style, const RenderView& view, std::uint64_t seed) {
  if (view.mode == ViewMode::Solution) {
    if (!view.answer_grid) throw Error("solution view requires answers");
    if (view.answer_grid->rows() != grid.rows() || view.answer_grid->cols() != grid.cols())
      throw Error("answer grid shape does not match the query grid");
  }
  const int px = style.cell_px;
  const int width = grid.cols() * px;
  const int height = grid.rows() * px;
  const int font_px = px * 7 / 16;
  const Palette& pal = style.palette;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" data-cell-px=\"" << px << "\" data-rows=\""
      << grid.rows() << "\" data-cols=\"" << grid.cols() << "\" data-view=\""
      << (view.mode == ViewMode::Query ? "query" : "solution") << "\">\n";

  if (style.background == Background::Textured) {
    const auto& tex = palette_config().at("texture");
    const auto tones = tex.at("tones").get<std::vector<std::string>>();
    const std::string opacity = tex.at("opacity").get<std::string>();
    out << "<rect class=\"canvas\" x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\""
        << tex.at("base").get<std::string>() << "\"/>\n";
    Rng rng(seed);
    const int patches = tex.at("patches").get<int>();
    for (int i = 0; i < patches; ++i) {
      const auto w = rng.uniform(px / 4, px * 2);
      const auto h = rng.uniform(px / 4, px * 2);
      const auto x = rng.uniform(-px / 2, width);
      const auto y = rng.uniform(-px / 2, height);
      out << "<rect class=\"texture\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
          << "\" fill=\"" << tones[rng.index(tones.size())] << "\" fill-opacity=\"" << opacity << "\"/>\n";
    }
  } else {
    out << "<rect class=\"canvas\" x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\""
        << pal.canvas << "\"/>\n";
  }

  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c) {
      const Cell& cell = grid.at(r, c);
      if (cell.is_empty()) continue;
      out << "<rect class=\"cell\" x=\"" << c * px << "\" y=\"" << r * px << "\" width=\"" << px << "\" height=\""
          << px << "\" fill=\"" << role_colors(pal, cell.kind).fill << "\"/>\n";
    }

  if (style.border)
    for (int r = 0; r < grid.rows(); ++r)
      for (int c = 0; c < grid.cols(); ++c) {
        if (grid.at(r, c).is_empty()) continue;
        out << "<rect class=\"border\" x=\"" << c * px + 1 << "\" y=\"" << r * px + 1 << "\" width=\"" << px - 2
            << "\" height=\"" << px - 2 << "\" fill=\"none\" stroke=\"" << pal.border << "\" stroke-width=\"2\"/>\n";
      }

  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c) {
      const Cell& cell = grid.at(r, c);
      if (cell.is_empty()) continue;
      std::string glyph = cell_glyph(cell);
      std::string weight = "normal";
      if (cell.kind == CellKind::Target && view.mode == ViewMode::Solution) {
        const Cell& solved = view.answer_grid->at(r, c);
        if (solved.kind != CellKind::Number) throw Error("answer grid has no value at " + to_string(Coord{r, c}));
        glyph = cell_glyph(solved);
        weight = "bold";
      }
      out << "<text class=\"glyph\" x=\"" << c * px + px / 2 << "\" y=\"" << r * px + px / 2 << "\" font-family=\""
          << xml_escape(style.font_family) << "\" font-size=\"" << font_px << "\" font-weight=\"" << weight
          << "\" fill=\"" << role_colors(pal, cell.kind).text
          << "\" text-anchor=\"middle\" dominant-baseline=\"central\">" << xml_escape(glyph) << "</text>\n";
    }
  out << "</svg>\n";
  return out.str();
}

std::vector<PlacedGlyph> read_svg_glyphs(std::string_view svg) {
  static const std::regex kPx(R"re(data-cell-px="(\d+)")re");
  static const std::regex kText(R"re(<text\b[^>]*?\bx="(-?\d+)"[^>]*?\by="(-?\d+)"[^>]*>([^<]*)</text>)re");
  const std::string doc(svg);
  std::smatch m;
  if (!std::regex_search(doc, m, kPx)) throw Error("document carries no cell size");
  const int px = std::stoi(m[1]);
  std::vector<PlacedGlyph> out;
  for (auto it = std::sregex_iterator(doc.begin(), doc.end(), kText); it != std::sregex_iterator(); ++it) {
    const int x = std::stoi((*it)[1]);
    const int y = std::stoi((*it)[2]);
    std::string text = (*it)[3];
    for (auto [ent, ch] : {std::pair{"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&amp;", "&"}})
      for (auto pos = text.find(ent); pos != std::string::npos; pos = text.find(ent, pos + 1))
        text.replace(pos, std::string_view(ent).size(), ch);
    out.push_back({Coord{y / px, x / px}, text});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t style_seed(std::string_view example_id) {
  // FNV-1a folded through splitmix for a well-mixed texture seed.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : example_id) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return splitmix64(h);
}

}  // namespace crosspuzzle
