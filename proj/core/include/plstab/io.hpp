#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "plstab/density.hpp"
#include "plstab/experiments.hpp"
#include "plstab/midpoint.hpp"
#include "plstab/stability.hpp"

namespace plstab::io {

// Canonical text: sorted keys, no whitespace, doubles as %.17g, one trailing
// newline. Parsing then emitting canonical text reproduces it byte for byte.
std::string emit_density(const LogConcaveDensity& d);
std::string emit_function(const PiecewiseLogLinear& h, bool normalized = false);
std::string emit_triple(const PLTriple& t);
std::string emit_hull_points(const std::vector<HullPoint>& pts);

// A density document with "normalized": false is normalized on load.
// Errors are ParseError naming the line (syntax) or the field (schema).
LogConcaveDensity parse_density(std::string_view text);
LogConcaveFunction parse_function(std::string_view text);
// "alpha" defaults to 0.5.
PLTriple parse_triple(std::string_view text);
// {"points": [[x, logvalue], ...], "left_tail_slope": .., "right_tail_slope": ..}
struct HullInput {
  std::vector<HullPoint> points;
  std::optional<double> left_tail_slope;
  std::optional<double> right_tail_slope;
};
HullInput parse_hull_input(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

std::string margin_json(const InequalityMargin& m);
std::string margins_json(const std::vector<InequalityMargin>& ms);
std::string margins_csv(const std::vector<InequalityMargin>& ms);
std::string certificate_json(const StabilityCertificate& c);
std::string l1_report_json(const L1BoundReport& r);
std::string alignment_json(const Alignment& a);
std::string localized_json(const LocalizedCostReport& r);
std::string suite_json(const SuiteReport& r);
// Rows, fits and the divergence flags; the CSV carries only the rows.
std::string sweep_json(const SweepResult& r);

// %.17g
std::string format_double(double v);

}  // namespace plstab::io
