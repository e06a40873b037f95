// plstab: command-line front end for densities, triples, sweeps and suites.
//
// Exit status: 0 all checks pass, 1 an assertion failed, 2 usage or parse error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plstab/error.hpp"
#include "plstab/experiments.hpp"
#include "plstab/io.hpp"
#include "plstab/midpoint.hpp"
#include "plstab/stability.hpp"
#include "plstab/transport.hpp"

namespace {

using namespace plstab;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Options {
  double tol = kDefaultTol;
  std::uint64_t seed = 7;
  std::optional<double> constant;
  double alpha = 0.5;
  std::string out;
  std::string json_out;
  std::string grid = "0.02,0.01,0.005,0.0025";
  double eps = 0.01;
  std::string base;
  int trials = 200;
  std::vector<std::string> inputs;
  std::string name;
};

void write_output(const Options& o, const std::string& text) {
  if (o.out.empty())
    std::cout << text;
  else
    io::write_file(o.out, text);
}

LogConcaveDensity load_density(const std::string& path) {
  return io::parse_density(io::read_file(path));
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad grid value '" + item + "'");
    }
  }
  return out;
}

std::optional<LogConcaveDensity> load_base(const Options& o) {
  if (o.base.empty()) return std::nullopt;
  return load_density(o.base);
}

int cmd_stats(const Options& o) {
  const auto d = load_density(o.inputs.at(0));
  const auto st = stats(d);
  std::vector<double> xs;
  for (double p : {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) xs.push_back(d.quantile(p));
  const auto margins = check_hw(d, xs);
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "{\"mean\":%s,\"median\":%s,\"median_height\":%s,\"second_moment\":%s,"
                "\"total_mass\":%s}\n",
                io::format_double(st.mean).c_str(), io::format_double(st.median).c_str(),
                io::format_double(st.median_height).c_str(),
                io::format_double(st.second_moment).c_str(),
                io::format_double(st.total_mass).c_str());
  write_output(o, std::string(buf) + io::margins_json(margins));
  for (const auto& m : margins)
    if (!m.pass) return kFail;
  return kPass;
}

int cmd_deficit(const Options& o) {
  const auto t = io::parse_triple(io::read_file(o.inputs.at(0)));
  const bool dominated = dominates_midpoint(t.m, t.f, t.g, t.alpha);
  if (!dominated) {
    std::cerr << "m does not dominate the sup-convolution of f and g\n";
    return kFail;
  }
  const double eps = pl_epsilon(t);
  const double deficit = pl_deficit_integral(t.f, t.g, o.tol);
  const double cost = quadratic_cost(t.f, t.g, o.tol);
  // the integral bound needs the symmetric midpoint
  const bool pass = t.alpha != 0.5 || deficit <= eps + o.tol;
  std::string text = "{\"alpha\":" + io::format_double(t.alpha) +
                     ",\"deficit_integral\":" + io::format_double(deficit) +
                     ",\"pass\":" + (pass ? "true" : "false") +
                     ",\"pl_epsilon\":" + io::format_double(eps) +
                     ",\"quadratic_cost\":" + io::format_double(cost) + "}\n";
  write_output(o, text);
  return pass ? kPass : kFail;
}

int cmd_cost(const Options& o) {
  const auto f = load_density(o.inputs.at(0));
  const auto g = load_density(o.inputs.at(1));
  const auto r = integrate_cost(TransportMap(f, g), -kInf, kInf, o.tol);
  write_output(o, "{\"error\":" + io::format_double(r.error) +
                      ",\"quadratic_cost\":" + io::format_double(r.value) + "}\n");
  return kPass;
}

int cmd_l1(const Options& o) {
  const auto f = load_density(o.inputs.at(0));
  const auto g = load_density(o.inputs.at(1));
  const auto r = l1_bound_check(f, g, o.constant.value_or(kDefaultL1Constant), o.tol);
  write_output(o, io::l1_report_json(r));
  return r.margin.pass ? kPass : kFail;
}

int cmd_align(const Options& o) {
  const auto f = load_density(o.inputs.at(0));
  const auto m = io::parse_function(io::read_file(o.inputs.at(1)));
  write_output(o, io::alignment_json(align(f, m)));
  return kPass;
}

int cmd_certify(const Options& o) {
  const auto t = io::parse_triple(io::read_file(o.inputs.at(0)));
  const auto c = certify(t, o.constant.value_or(kDefaultCertifyConstant));
  write_output(o, io::certificate_json(c));
  return c.pass ? kPass : kFail;
}

int cmd_supconv(const Options& o) {
  const auto f = io::parse_function(io::read_file(o.inputs.at(0)));
  const auto g = io::parse_function(io::read_file(o.inputs.at(1)));
  write_output(o, io::emit_function(sup_convolution(f, g, o.alpha)));
  return kPass;
}

int cmd_hull(const Options& o) {
  const auto in = io::parse_hull_input(io::read_file(o.inputs.at(0)));
  write_output(o, io::emit_function(
                      log_concave_hull(in.points, in.left_tail_slope, in.right_tail_slope)));
  return kPass;
}

int cmd_example(const Options& o) {
  const auto t = make_example(parse_example_kind(o.name), o.eps, load_base(o));
  write_output(o, io::emit_triple(t));
  return kPass;
}

int cmd_sweep(const Options& o) {
  const auto r = sweep(parse_example_kind(o.name), parse_grid(o.grid), o.tol, load_base(o));
  write_output(o, sweep_csv(r));
  const auto js = io::sweep_json(r);
  if (o.json_out.empty())
    std::cerr << js;
  else
    io::write_file(o.json_out, js);
  return kPass;
}

int cmd_suite(const Options& o) {
  std::vector<std::string> names;
  if (o.name == "all")
    names = suite_names();
  else
    names.push_back(o.name);
  std::string text;
  bool pass = true;
  for (const auto& n : names) {
    const auto r = run_suite(n, o.trials, o.seed);
    text += io::suite_json(r);
    pass = pass && r.passed();
  }
  write_output(o, text);
  return pass ? kPass : kFail;
}

bool usage_kind(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::EpsOutOfRange:
    case ErrorKind::BaseNotEven:
    case ErrorKind::UnknownSuite:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prekopa-Leindler stability toolkit for log-concave densities"};
  app.require_subcommand(1);
  Options o;

  auto add_out = [&o](CLI::App* sub) {
    sub->add_option("--out", o.out, "Write the result here instead of stdout");
  };
  auto add_tol = [&o](CLI::App* sub) {
    sub->add_option("--tol", o.tol, "Absolute quadrature tolerance")->check(CLI::PositiveNumber);
  };

  struct Command {
    const char* name;
    const char* help;
    int nargs;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"stats", "Moments, median and median-height margins of a density", 1, cmd_stats},
      {"deficit", "Deficit eps, deficit integral and cost of a triple", 1, cmd_deficit},
      {"cost", "Quadratic transport cost between two densities", 2, cmd_cost},
      {"l1", "L1 distance against the cost-based bound", 2, cmd_l1},
      {"align", "Best (a, b) with f(t) ~ a m(t + b)", 2, cmd_align},
      {"certify", "Stability certificate for a triple", 1, cmd_certify},
      {"supconv", "Weighted sup-convolution of two log-concave functions", 2, cmd_supconv},
      {"hull", "Log-concave hull of a point set", 1, cmd_hull},
  };
  int (*selected)(const Options&) = nullptr;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("inputs", o.inputs, "Input JSON files")->required()->expected(c.nargs);
    add_out(sub);
    add_tol(sub);
    if (std::string(c.name) == "l1" || std::string(c.name) == "certify")
      sub->add_option("--constant", o.constant, "Constant the ratio is accepted against");
    if (std::string(c.name) == "supconv")
      sub->add_option("--alpha", o.alpha, "Weight of the first argument")
          ->check(CLI::Range(0.0, 1.0));
    sub->callback([&selected, run = c.run] { selected = run; });
  }

  auto* example = app.add_subcommand("example", "Emit the exa2 or exa3 triple as JSON");
  example->add_option("kind", o.name, "exa2 | exa3")->required();
  example->add_option("--eps", o.eps, "Deficit parameter in (0, 1/2)");
  example->add_option("--base", o.base, "Even base density for exa2 (default Laplace)");
  add_out(example);
  example->callback([&selected] { selected = cmd_example; });

  auto* sw = app.add_subcommand("sweep", "Tabulate an example family over an eps grid");
  sw->add_option("kind", o.name, "exa2 | exa3")->required();
  sw->add_option("--grid", o.grid, "Comma-separated eps values");
  sw->add_option("--base", o.base, "Even base density for exa2 (default Laplace)");
  sw->add_option("--json", o.json_out, "Fits and divergence flags (default: stderr)");
  add_out(sw);
  add_tol(sw);
  sw->callback([&selected] { selected = cmd_sweep; });

  auto* suite = app.add_subcommand("suite", "Run a seeded property suite");
  suite->add_option("name", o.name, "prop21 | prop22 | cor23 | bobkov | pl | hull | transport | "
                                    "transdist | all")
      ->required();
  suite->add_option("--trials", o.trials, "Number of seeded trials")->check(CLI::PositiveNumber);
  suite->add_option("--seed", o.seed, "Seed of the trial stream");
  add_out(suite);
  suite->callback([&selected] { selected = cmd_suite; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    return selected(o);
  } catch (const Error& e) {
    std::cerr << "plstab: " << e.what() << '\n';
    return usage_kind(e.kind()) ? kUsage : kFail;
  } catch (const std::exception& e) {
    std::cerr << "plstab: " << e.what() << '\n';
    return kUsage;
  }
}
