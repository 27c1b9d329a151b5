#include "qrg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qrg/coherent.hpp"
#include "qrg/csv.hpp"
#include "qrg/game.hpp"
#include "qrg/matchings.hpp"
#include "qrg/montecarlo.hpp"
#include "qrg/sdp.hpp"

namespace qrg::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string family = "canonical";
  int k = 2;
  std::string file;
  std::optional<double> alpha;
  double alpha_min = 0.0;
  double alpha_max = 3.0;
  int steps = 61;
  double eta = 1.0;
  double nu = 1.0;
  std::string variant = "paper_exact";
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  int matching = 1;
  std::string out;
  std::string plot;
  std::string preset;
  std::string config;
  double tol = 1e-6;
  int max_iter = 500;
  std::size_t samples = 10000;
  bool no_cheating = false;
};

std::string g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void add_family_options(CLI::App* app, RunConfig& c) {
  app->add_option("--family", c.family, "canonical or sextet")
      ->check(CLI::IsMember({"canonical", "sextet"}));
  app->add_option("--k", c.k, "number of matchings")->check(CLI::Range(1, 12));
  app->add_option("--file", c.file, "family file (overrides --family)");
}

void add_config_option(CLI::App* app, RunConfig& c) {
  app->add_option("--config", c.config, "key=value defaults; command-line flags win");
}

void add_solver_options(CLI::App* app, RunConfig& c) {
  app->add_option("--tol", c.tol, "duality-gap tolerance")->check(CLI::PositiveNumber);
  app->add_option("--max-iter", c.max_iter, "Newton iteration cap")->check(CLI::PositiveNumber);
}

void add_coherent_options(CLI::App* app, RunConfig& c) {
  app->add_option("--eta", c.eta, "transmission x detector efficiency")->check(CLI::Range(0.0, 1.0));
  app->add_option("--nu", c.nu, "interference quality")->check(CLI::Range(0.0, 1.0));
}

Family load_family(const RunConfig& c) {
  if (!c.file.empty()) {
    std::ifstream in(c.file);
    if (!in) throw UsageError("cannot open family file '" + c.file + "'");
    return read_family(in);
  }
  if (c.family == "sextet") {
    if (c.k < 3) throw UsageError("the sextet family needs --k >= 3");
    return sextet_family(c.k);
  }
  return canonical_family(c.k);
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << content;
}

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.tolerance = c.tol;
  o.max_iterations = c.max_iter;
  return o;
}

// --- matchings ----------------------------------------------------------------

int cmd_matchings_gen(const RunConfig& c, std::ostream& out) {
  write_output(c.out, format_family(load_family(c)), out);
  return kSuccess;
}

int cmd_matchings_check(const RunConfig& c, std::ostream& out) {
  const Family family = load_family(c);
  const IndependenceReport r = is_independent(family);
  out << (r.independent ? "independent" : "dependent") << "\n";
  out << "n=" << (family.empty() ? 0 : family.front().n()) << "\n";
  out << "k=" << family.size() << "\n";
  out << "rank_checked=" << (r.rank_checked ? "true" : "false") << "\n";
  if (r.witness) out << "witness=" << format_witness(*r.witness) << "\n";
  return r.independent ? kSuccess : kNegative;
}

// --- value --------------------------------------------------------------------

int cmd_value(const std::string& which, const RunConfig& c, std::ostream& out) {
  const Family family = load_family(c);
  const int k = static_cast<int>(family.size());
  out << "command=value " << which << "\n";
  out << "n=" << family.front().n() << "\n";
  out << "k=" << k << "\n";
  out << "bound=" << g12(theorem_bound(k)) << "\n";

  if (c.alpha) {
    const CoherentGameParams params = make_coherent_params(family, *c.alpha);
    out << "alpha=" << g12(*c.alpha) << "\n";
    if (which == "sv") {
      const HiddenMatchingGame game = make_game(family);
      const auto r = selective_value_numeric(coherent_ensemble(params), consistency_table(game));
      out << "value=" << g12(r.value) << "\n";
      out << "argmax=" << format_answer(answer_at(game, r.argmax)) << "\n";
      return kSuccess;
    }
    const DiscriminationProblem problem = cheating_problem(params);
    const SDPSolution s = physical_value(problem, solver_options(c));
    out << "value=" << g12(s.primal_value) << "\n" << format_report(s, problem);
    return s.converged ? kSuccess : kNonConvergence;
  }

  const HiddenMatchingGame game = make_game(family);
  if (which == "sv") {
    GameValues v;
    std::string mode = "exhaustive";
    if (answer_count(game)) {
      v = selective_value(game);
    } else {
      v = selective_value_sampled(game, c.samples, c.seed);
      mode = "sampled";
    }
    out << "value=" << g12(v.sv) << "\n";
    out << "mode=" << mode << "\n";
    out << "answers_examined=" << v.answers_examined << "\n";
    out << "argmax=" << format_answer(v.argmax) << "\n";
    out << "independent=" << (game.independent ? "true" : "false") << "\n";
    return kSuccess;
  }
  const DiscriminationProblem problem = hm_problem(game);
  const SDPSolution s = physical_value(problem, solver_options(c));
  out << "value=" << g12(s.primal_value) << "\n" << format_report(s, problem);
  return s.converged ? kSuccess : kNonConvergence;
}

// --- curves -------------------------------------------------------------------

struct Series {
  double eta;
  double nu;
};

struct CurvePlan {
  Family family;
  std::vector<Series> series;
  std::vector<double> alphas;
};

CurvePlan plan_curves(const RunConfig& c, const CLI::App& app) {
  CurvePlan plan;
  const auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
  RunConfig eff = c;
  if (!c.preset.empty()) {
    const std::string& p = c.preset;
    if (p == "fig6") {
      if (!given("--family")) eff.family = "sextet";
      if (!given("--k")) eff.k = 3;
    } else {
      if (!given("--family")) eff.family = "canonical";
      if (!given("--k")) eff.k = 2;
    }
    if (p == "fig5" || p == "fig6") {
      plan.series = {{1.0, 1.0}};
    } else if (p == "fig7") {
      plan.series = {{1.0, 1.0}, {0.8, 1.0}, {0.6, 1.0}, {0.4, 1.0}, {0.2, 1.0}};
    } else if (p == "fig8") {
      plan.series = {{1.0, 1.0}, {1.0, 0.95}, {1.0, 0.9}, {1.0, 0.85}, {1.0, 0.8}};
    } else if (p == "fig9") {
      plan.series = {{1.0, 1.0}, {0.8, 0.95}, {0.6, 0.9}, {0.4, 0.85}, {0.2, 0.8}};
    }
  } else {
    plan.series = {{c.eta, c.nu}};
  }
  plan.family = load_family(eff);
  plan.alphas = alpha_grid(c.alpha_min, c.alpha_max, c.steps);
  return plan;
}

std::string series_path(const std::string& out, const Series& s) {
  const auto dot = out.rfind('.');
  const bool has_ext = dot != std::string::npos && out.find('/', dot) == std::string::npos;
  const std::string stem = has_ext ? out.substr(0, dot) : out;
  const std::string ext = has_ext ? out.substr(dot) : ".csv";
  char buf[64];
  std::snprintf(buf, sizeof buf, "_eta%g_nu%g", s.eta, s.nu);
  return stem + buf + ext;
}

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

std::string render_svg(const std::vector<PlotSeries>& series, double x_max) {
  const double w = 640, h = 420, left = 60, right = 180, top = 20, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const double xm = x_max > 0 ? x_max : 1.0;
  auto px = [&](double x) { return left + pw * x / xm; };
  auto py = [&](double y) { return top + ph * (1.0 - y); };
  std::ostringstream s;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\">\n", w, h);
  s << buf;
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                left, top, pw, ph);
  s << buf;
  for (int t = 0; t <= 4; ++t) {
    const double y = t / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" font-size=\"11\" text-anchor=\"end\">%.2f</text>\n",
                  left - 6, py(y) + 4, y);
    s << buf;
    const double x = xm * t / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" font-size=\"11\" text-anchor=\"middle\">%.2f</text>\n",
                  px(x), top + ph + 16, x);
    s << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" font-size=\"12\" text-anchor=\"middle\">alpha</text>\n",
                left + pw / 2, h - 12);
  s << buf;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = palette[i % 10];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[i].points) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x), py(y));
      s << buf;
    }
    s << "\"/>\n";
    const double ly = top + 14 + 16.0 * static_cast<double>(i);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                  w - right + 10, ly, w - right + 30, ly, color);
    s << buf;
    s << "<text x=\"" << (w - right + 36) << "\" y=\"" << (ly + 4) << "\" font-size=\"11\">"
      << series[i].label << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

int cmd_curves(const RunConfig& c, const CLI::App& app, std::ostream& out) {
  const CurvePlan plan = plan_curves(c, app);
  if (plan.series.size() > 1 && c.out.empty()) {
    throw UsageError("preset '" + c.preset + "' writes one CSV per series; pass --out");
  }
  const CoherentGameParams base = make_coherent_params(plan.family, 0.0);
  std::vector<std::optional<double>> cheating;
  if (!c.no_cheating) cheating = cheating_curve(base, plan.alphas, solver_options(c));

  std::vector<PlotSeries> plot;
  std::size_t failed = 0;
  for (const auto& v : cheating) failed += v ? 0 : 1;
  if (!cheating.empty()) {
    PlotSeries ch{"cheating", {}};
    PlotSeries th{"threshold (1+e)/2", {}};
    for (std::size_t i = 0; i < plan.alphas.size(); ++i) {
      if (!cheating[i]) continue;
      ch.points.emplace_back(plan.alphas[i], *cheating[i]);
      th.points.emplace_back(plan.alphas[i], (1.0 + *cheating[i]) / 2.0);
    }
    plot.push_back(std::move(ch));
    plot.push_back(std::move(th));
  }

  for (const Series& s : plan.series) {
    const CoherentGameParams p = with_values(base, 0.0, s.eta, s.nu);
    const auto rows = curve_with_cheating(p, plan.alphas, cheating);
    const std::string path = plan.series.size() > 1 ? series_path(c.out, s) : c.out;
    write_output(path, format_curve_csv(rows), out);
    char label[64];
    std::snprintf(label, sizeof label, "winning eta=%g nu=%g", s.eta, s.nu);
    PlotSeries ps{label, {}};
    for (const CurveRow& r : rows) {
      ps.points.emplace_back(r.alpha, c.variant == "conditional" ? r.winning_conditional : r.winning_paper);
    }
    plot.push_back(std::move(ps));
  }
  if (!c.plot.empty()) {
    std::ofstream f(c.plot, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + c.plot + "'");
    f << render_svg(plot, plan.alphas.back());
  }
  if (failed) std::cerr << "warning: " << failed << " cheating point(s) did not converge (NA)\n";
  return kSuccess;
}

// --- simulate -----------------------------------------------------------------

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const Family family = load_family(c);
  const CoherentGameParams params = make_coherent_params(family, c.alpha.value_or(1.0), c.eta, c.nu);
  if (c.matching < 1 || c.matching > params.k()) throw UsageError("--matching out of range");
  const P1Adjudication a = adjudicate_p1(params, c.trials, c.seed, c.matching - 1);
  write_output(c.out, format_estimate_csv(a.mc), out);
  out << "winning_paper=" << format_g9(a.paper_formula) << "\n";
  out << "winning_conditional=" << format_g9(a.conditional_formula) << "\n";
  out << "sigmas_paper=" << format_g9(a.sigmas_paper) << "\n";
  out << "sigmas_conditional=" << format_g9(a.sigmas_conditional) << "\n";
  out << "no_click_fraction=" << format_g9(static_cast<double>(a.mc.no_click_trials) / static_cast<double>(a.mc.trials)) << "\n";
  out << "verdict=" << to_string(a.verdict) << "\n";
  return kSuccess;
}

// Appends `--key value` for config entries the user did not pass explicitly.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::vector<std::string> merged = args;
  for (const auto& [key, value] : read_config_file(path)) {
    const std::string flag = "--" + key;
    const bool present = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (present) continue;
    if (value == "true" && (key == "no-cheating")) {
      merged.push_back(flag);
    } else {
      merged.push_back(flag);
      merged.push_back(value);
    }
  }
  return merged;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") continue;
    out.emplace_back(key, value);
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Hidden-matching quantum retrieval games: construction, values, curves, simulation"};
  app.name("qrg");
  app.require_subcommand(1);

  auto* matchings = app.add_subcommand("matchings", "generate or certify matching families");
  matchings->require_subcommand(1);
  auto* gen = matchings->add_subcommand("gen", "write a family file");
  add_family_options(gen, c);
  gen->add_option("--out", c.out, "output path (default stdout)");
  add_config_option(gen, c);
  auto* check = matchings->add_subcommand("check", "certify independence");
  add_family_options(check, c);
  add_config_option(check, c);

  auto* value = app.add_subcommand("value", "selective (sv) or physical (pv) value");
  value->require_subcommand(1);
  std::vector<CLI::App*> value_leaves;
  for (const char* which : {"sv", "pv"}) {
    auto* leaf = value->add_subcommand(which, std::string(which) == "sv" ? "selective value" : "physical value (SDP)");
    add_family_options(leaf, c);
    add_solver_options(leaf, c);
    add_config_option(leaf, c);
    leaf->add_option("--alpha", c.alpha, "coherent-state game at this alpha")->check(CLI::NonNegativeNumber);
    leaf->add_option("--samples", c.samples, "sampled answers when the space is too large");
    leaf->add_option("--seed", c.seed, "sampling seed");
    value_leaves.push_back(leaf);
  }

  auto* curves = app.add_subcommand("curves", "winning / cheating curves over an alpha grid");
  add_family_options(curves, c);
  add_coherent_options(curves, c);
  add_solver_options(curves, c);
  add_config_option(curves, c);
  curves->add_option("--preset", c.preset, "fig5|fig6|fig7|fig8|fig9")
      ->check(CLI::IsMember({"fig5", "fig6", "fig7", "fig8", "fig9"}));
  curves->add_option("--alpha-min", c.alpha_min)->check(CLI::NonNegativeNumber);
  curves->add_option("--alpha-max", c.alpha_max)->check(CLI::NonNegativeNumber);
  curves->add_option("--steps", c.steps)->check(CLI::Range(1, static_cast<int>(kMaxCurvePoints)));
  curves->add_option("--variant", c.variant, "series drawn in the plot")
      ->check(CLI::IsMember({"paper_exact", "conditional"}));
  curves->add_flag("--no-cheating", c.no_cheating, "skip the cheating SDP column");
  curves->add_option("--out", c.out, "CSV path (default stdout)");
  curves->add_option("--plot", c.plot, "SVG line plot path");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the honest winning probability");
  add_family_options(simulate, c);
  add_coherent_options(simulate, c);
  add_config_option(simulate, c);
  simulate->add_option("--alpha", c.alpha)->check(CLI::NonNegativeNumber);
  simulate->add_option("--trials", c.trials)->check(CLI::PositiveNumber);
  simulate->add_option("--seed", c.seed);
  simulate->add_option("--matching", c.matching, "1-based matching index");
  simulate->add_option("--out", c.out, "CSV path (default stdout)");

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (gen->parsed()) return cmd_matchings_gen(c, out);
    if (check->parsed()) return cmd_matchings_check(c, out);
    for (auto* leaf : value_leaves) {
      if (leaf->parsed()) return cmd_value(leaf->get_name(), c, out);
    }
    if (curves->parsed()) {
      if (c.alpha_max < c.alpha_min) throw UsageError("--alpha-max must be >= --alpha-min");
      return cmd_curves(c, *curves, out);
    }
    if (simulate->parsed()) return cmd_simulate(c, out);
  } catch (const SdpError& e) {
    err << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  err << app.help();
  return kUsage;
}

}  // namespace qrg::cli
