#include "plstab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "plstab/error.hpp"

namespace plstab::io {

using nlohmann::json;

namespace {

void emit(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        emit(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        emit(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float:
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      out += format_double(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

std::string canonical(const json& j) {
  std::string out;
  emit(j, out);
  out += '\n';
  return out;
}

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json optional_number(std::optional<double> v) {
  if (!v) return nullptr;
  return *v;
}

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::ParseError, "field '" + field + "': " + what);
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < stop; ++i)
      if (text[i] == '\n') ++line;
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + e.what());
  }
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.is_object()) field_error(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::vector<double> number_array(const json& j, const std::string& field) {
  if (!j.is_array()) field_error(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) field_error(field + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

std::optional<double> tail(const json& obj, const std::string& path, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) field_error(path.empty() ? key : path + "." + key, "expected a number or null");
  return it->get<double>();
}

struct Shape {
  std::vector<double> knots;
  std::vector<double> logvals;
  std::optional<double> left;
  std::optional<double> right;
  bool normalized;
};

Shape read_shape(const json& obj, const std::string& path) {
  auto name = [&](const char* key) { return path.empty() ? std::string(key) : path + "." + key; };
  Shape s;
  s.knots = number_array(require(obj, path, "knots"), name("knots"));
  s.logvals = number_array(require(obj, path, "logvals"), name("logvals"));
  s.left = tail(obj, path, "left_tail_slope");
  s.right = tail(obj, path, "right_tail_slope");
  s.normalized = false;
  const auto it = obj.find("normalized");
  if (it != obj.end()) {
    if (!it->is_boolean()) field_error(name("normalized"), "expected a boolean");
    s.normalized = it->get<bool>();
  }
  return s;
}

LogConcaveFunction function_from(const json& obj, const std::string& path) {
  auto s = read_shape(obj, path);
  try {
    return LogConcaveFunction(std::move(s.knots), std::move(s.logvals), s.left, s.right);
  } catch (const Error& e) {
    field_error(path.empty() ? "knots" : path, e.what());
  }
}

LogConcaveDensity density_from(const json& obj, const std::string& path) {
  auto s = read_shape(obj, path);
  try {
    return build_density(std::move(s.knots), std::move(s.logvals), s.left, s.right,
                         !s.normalized);
  } catch (const Error& e) {
    field_error(path.empty() ? "knots" : path, e.what());
  }
}

json shape_json(const PiecewiseLogLinear& h, bool normalized) {
  json j = json::object();
  j["knots"] = json::array();
  for (double x : h.knots()) j["knots"].push_back(x);
  j["logvals"] = json::array();
  for (double l : h.logvals()) j["logvals"].push_back(l);
  j["left_tail_slope"] = optional_number(h.left_tail_slope());
  j["right_tail_slope"] = optional_number(h.right_tail_slope());
  j["normalized"] = normalized;
  return j;
}

json margin_object(const InequalityMargin& m) {
  return {{"label", m.label},
          {"lhs", number(m.lhs)},
          {"rhs", number(m.rhs)},
          {"margin", number(m.margin)},
          {"pass", m.pass}};
}

json alignment_object(const Alignment& a) {
  return {{"a", number(a.a)}, {"b", number(a.b)}, {"residual", number(a.residual)}};
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string emit_density(const LogConcaveDensity& d) { return canonical(shape_json(d, true)); }

std::string emit_function(const PiecewiseLogLinear& h, bool normalized) {
  return canonical(shape_json(h, normalized));
}

std::string emit_triple(const PLTriple& t) {
  json j = {{"alpha", t.alpha},
            {"f", shape_json(t.f, true)},
            {"g", shape_json(t.g, true)},
            {"m", shape_json(t.m, false)}};
  return canonical(j);
}

std::string emit_hull_points(const std::vector<HullPoint>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.log_value});
  return canonical(json{{"points", arr}});
}

LogConcaveDensity parse_density(std::string_view text) { return density_from(parse_text(text), ""); }

LogConcaveFunction parse_function(std::string_view text) {
  return function_from(parse_text(text), "");
}

PLTriple parse_triple(std::string_view text) {
  const json j = parse_text(text);
  auto m = function_from(require(j, "", "m"), "m");
  auto f = density_from(require(j, "", "f"), "f");
  auto g = density_from(require(j, "", "g"), "g");
  double alpha = 0.5;
  const auto it = j.find("alpha");
  if (it != j.end()) {
    if (!it->is_number()) field_error("alpha", "expected a number");
    alpha = it->get<double>();
    if (!(alpha > 0.0 && alpha < 1.0)) field_error("alpha", "must lie in (0,1)");
  }
  return {std::move(m), std::move(f), std::move(g), alpha};
}

HullInput parse_hull_input(std::string_view text) {
  const json j = parse_text(text);
  const json& pts = require(j, "", "points");
  if (!pts.is_array()) field_error("points", "expected an array of [x, logvalue] pairs");
  HullInput in;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto field = "points[" + std::to_string(i) + "]";
    const auto pair = number_array(pts[i], field);
    if (pair.size() != 2) field_error(field, "expected [x, logvalue]");
    in.points.push_back({pair[0], pair[1]});
  }
  in.left_tail_slope = tail(j, "", "left_tail_slope");
  in.right_tail_slope = tail(j, "", "right_tail_slope");
  return in;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  out << content;
}

std::string margin_json(const InequalityMargin& m) { return canonical(margin_object(m)); }

std::string margins_json(const std::vector<InequalityMargin>& ms) {
  json arr = json::array();
  for (const auto& m : ms) arr.push_back(margin_object(m));
  return canonical(arr);
}

std::string margins_csv(const std::vector<InequalityMargin>& ms) {
  std::string out = "label,lhs,rhs,margin,pass\n";
  for (const auto& m : ms) {
    out += m.label + ',' + format_double(m.lhs) + ',' + format_double(m.rhs) + ',' +
           format_double(m.margin) + ',' + (m.pass ? "true" : "false") + '\n';
  }
  return out;
}

std::string certificate_json(const StabilityCertificate& c) {
  json j = {{"kind", c.kind},
            {"epsilon", number(c.epsilon)},
            {"alignment_f", alignment_object(c.alignment_f)},
            {"alignment_g", alignment_object(c.alignment_g)},
            {"bound_shape", number(c.bound_shape)},
            {"ratio_f", number(c.ratio_f)},
            {"ratio_g", number(c.ratio_g)},
            {"constant_used", number(c.constant_used)},
            {"pass", c.pass}};
  return canonical(j);
}

std::string l1_report_json(const L1BoundReport& r) {
  json j = margin_object(r.margin);
  j["eps_cost"] = number(r.eps_cost);
  j["shape"] = number(r.shape);
  j["ratio"] = number(r.ratio);
  j["constant"] = number(r.constant);
  j["exact_match"] = r.exact_match;
  return canonical(j);
}

std::string alignment_json(const Alignment& a) { return canonical(alignment_object(a)); }

std::string localized_json(const LocalizedCostReport& r) {
  json j = {{"branch", r.branch == LocalizedBranch::OneSidedTail ? "one_sided_tail" : "both_tails"},
            {"z", number(r.z)},
            {"nu", number(r.nu)},
            {"delta", number(r.delta)},
            {"localized_cost", number(r.localized_cost)},
            {"scale", number(r.scale)},
            {"ratio", number(r.ratio)}};
  return canonical(j);
}

std::string suite_json(const SuiteReport& r) {
  json j = {{"name", r.name},
            {"trials", r.trials},
            {"checks", r.checks},
            {"failures", r.failures},
            {"worst_margin", number(r.worst_margin)},
            {"worst_label", r.worst_label},
            {"worst_trial", r.worst_trial},
            {"pass", r.passed()}};
  return canonical(j);
}

std::string sweep_json(const SweepResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"eps", number(row.eps)},
                    {"pl_epsilon", number(row.pl_epsilon)},
                    {"deficit_integral", number(row.deficit_integral)},
                    {"quadratic_cost", number(row.quadratic_cost)},
                    {"l1", number(row.l1)},
                    {"bound_ratio", number(row.bound_ratio)}});
  json fits = json::array();
  for (const auto& f : r.fits)
    fits.push_back({{"column", f.column},
                    {"slope", number(f.slope)},
                    {"intercept", number(f.intercept)},
                    {"r_squared", number(f.r_squared)}});
  json div = json::array();
  for (const auto& p : r.divergence) {
    json est = json::array();
    for (double e : p.estimates) est.push_back(number(e));
    json del = json::array();
    for (double d : p.deltas) del.push_back(number(d));
    div.push_back({{"deltas", del}, {"estimates", est}, {"divergent", p.divergent}});
  }
  json j = {{"kind", std::string(to_string(r.kind))},
            {"rows", rows},
            {"fits", fits},
            {"derivative_energy", div}};
  return canonical(j);
}

}  // namespace plstab::io
