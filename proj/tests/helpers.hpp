#pragma once

#include "pcalc/syntax.hpp"

#include <string_view>

inline pcalc::Term ccs(std::string_view text) { return pcalc::parse(text, pcalc::Dialect::Ccsm).term; }
inline pcalc::Term ho(std::string_view text) { return pcalc::parse(text, pcalc::Dialect::Hoccsm).term; }
