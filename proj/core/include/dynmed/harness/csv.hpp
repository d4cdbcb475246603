#pragma once

#include <iosfwd>
#include <string>

#include "dynmed/panel.hpp"

namespace dynmed {

// Panel files have the header id,t,A,M1,...,Md,R with 1-based stages. Rows
// may come in any order; every id must have each stage 1..T exactly once.
// Subjects are ordered by increasing id. Throws ParseError, RaggedPanel,
// DuplicateRow or NonFiniteValue.
Panel read_panel_csv(std::istream& in);
Panel read_panel_csv(const std::string& path);

// Writes ids 1..n at 17 significant digits, so reading back is lossless.
void write_panel_csv(std::ostream& out, const Panel& panel);
void write_panel_csv(const std::string& path, const Panel& panel);

// "%.17g"
std::string format_double(double v);

}  // namespace dynmed
