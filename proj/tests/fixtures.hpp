#pragma once

#include <string>

#include "crosspuzzle/core.hpp"
#include "crosspuzzle/render.hpp"

namespace fixtures {

// The 9x7 worked example used throughout the prompt templates.
inline const std::string kWorkedMarkdown =
    "|   |   |   |   | ? |   |   |\n"
    "|   |   |   |   | + |   |   |\n"
    "| 28 |   | ? | ÷ | 3 | = | 31 |\n"
    "| + |   |   |   | = |   |   |\n"
    "| ? | ÷ | 5 | = | 9 |   |   |\n"
    "| = |   | × |   |   |   |   |\n"
    "| 73 |   | ? | + | 57 | = | 65 |\n"
    "|   |   | = |   |   |   |   |\n"
    "|   |   | 40 |   |   |   |   |\n";

inline crosspuzzle::Grid worked_grid() { return crosspuzzle::parse_markdown(kWorkedMarkdown); }

// Builds a grid from rows of cell tokens in markdown cell syntax.
inline crosspuzzle::Grid grid_of(const std::string& markdown) { return crosspuzzle::parse_markdown(markdown); }

}  // namespace fixtures
