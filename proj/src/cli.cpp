#include "psoconv/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "psoconv/boundary.hpp"
#include "psoconv/error.hpp"
#include "psoconv/montecarlo.hpp"
#include "psoconv/omega.hpp"
#include "psoconv/reference.hpp"

namespace psoconv {

namespace {

using Json = nlohmann::ordered_json;

// Header plus rows of scalar cells; rendered as CSV or as a JSON array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return format_number(v.get<double>());
  const std::string s = v.get<std::string>();
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << "\n";
  }
}

Json table_json(const Table& t) {
  Json arr = Json::array();
  for (const auto& row : t.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = row[i];
    arr.push_back(std::move(obj));
  }
  return arr;
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

// NaN or a finite number; CSV shows "nan", JSON shows null.
Json number_cell(double x) { return std::isnan(x) ? Json(nullptr) : Json(x); }

struct NumericFlags {
  std::size_t knots = 64;
  std::size_t max_knots = 2048;
  std::size_t final_knots = 8192;
  double tol = 1e-7;
  double blend = 0.1;
  std::size_t max_iter = 20000;
  double clip = 1e-15;

  OmegaConfig config() const {
    OmegaConfig cfg;
    cfg.fixed_point.initial_knots = knots;
    cfg.fixed_point.max_knots = max_knots;
    cfg.fixed_point.l2_tolerance = tol;
    cfg.fixed_point.blend_factor = blend;
    cfg.fixed_point.max_iterations = max_iter;
    cfg.integration_knots = final_knots;
    cfg.boundary_clip = clip;
    cfg.fixed_point.validate();
    if (cfg.integration_knots < 4) throw std::invalid_argument("--final-knots must be >= 4");
    if (!(cfg.boundary_clip > 0.0 && cfg.boundary_clip < 0.1))
      throw std::invalid_argument("--clip must lie in (0, 0.1)");
    return cfg;
  }
};

void add_numeric_flags(CLI::App* app, NumericFlags& f) {
  app->add_option("--knots", f.knots, "initial angle knots")->capture_default_str();
  app->add_option("--max-knots", f.max_knots, "final angle knots")->capture_default_str();
  app->add_option("--final-knots", f.final_knots, "knots of the drift integral")->capture_default_str();
  app->add_option("--tol", f.tol, "L2 stopping tolerance of the fixed point")->capture_default_str();
  app->add_option("--blend", f.blend, "share of the old CDF kept per step")->capture_default_str();
  app->add_option("--max-iter", f.max_iter, "fixed point iteration budget")->capture_default_str();
  app->add_option("--clip", f.clip, "distance kept from +-pi/2 when chi = 0")->capture_default_str();
}

// Single point of the omega surface, with the fields shared by `omega` and `grid`.
struct Evaluation {
  Verdict verdict;
  std::optional<AngleCdf> cdf;
  std::string failure;
};

Evaluation evaluate(const SwarmParams& p, const OmegaConfig& cfg) {
  Evaluation e;
  try {
    e.verdict = classify(p, cfg, e.cdf);
  } catch (const std::exception& ex) {
    e.failure = ex.what();
  }
  return e;
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = points == 1 ? lo
                         : (lo * static_cast<double>(points - 1 - i) + hi * static_cast<double>(i)) /
                               static_cast<double>(points - 1);
  if (points > 1) out.back() = hi;
  return out;
}

class Output {
public:
  Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

private:
  std::ofstream file_;
  std::ostream* os_;
};

void emit(const Table& t, const std::string& format, std::ostream& os) {
  if (format == "json") {
    os << table_json(t).dump(2) << "\n";
  } else {
    write_csv(os, t);
  }
}

void emit_record(const Json& record, const std::string& format, std::ostream& os) {
  if (format == "json") {
    os << record.dump(2) << "\n";
    return;
  }
  Table t;
  t.rows.emplace_back();
  for (const auto& [key, value] : record.items()) {
    t.columns.push_back(key);
    t.rows.back().push_back(value);
  }
  write_csv(os, t);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Drift of the logarithmic PSO convergence indicator", "psoconv"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  std::string output;
  std::string format;  // empty: the subcommand's default
  int jobs = 1;

  auto add_io = [&](CLI::App* sub, const std::string& default_format) {
    sub->add_option("--output,-o", output, "write here instead of stdout");
    sub->add_option("--format", format, "csv or json (default " + default_format + ")")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  // omega
  SwarmParams op;
  NumericFlags onum;
  std::string dump_cdf;
  auto* omega_cmd = app.add_subcommand("omega", "drift and verdict for one parameter set");
  omega_cmd->add_option("--chi", op.chi, "inertia weight")->required();
  omega_cmd->add_option("--cl", op.c_l, "local acceleration coefficient")->required();
  omega_cmd->add_option("--cg", op.c_g, "global acceleration coefficient")->required();
  omega_cmd->add_option("--dump-cdf", dump_cdf, "write the stationary angle CDF as JSON");
  add_numeric_flags(omega_cmd, onum);
  add_io(omega_cmd, "json");

  // table1
  NumericFlags tnum;
  auto* table_cmd = app.add_subcommand("table1", "recompute the reference parameter sets");
  add_numeric_flags(table_cmd, tnum);
  table_cmd->add_option("--jobs", jobs, "parallel rows")->check(CLI::PositiveNumber);
  add_io(table_cmd, "csv");

  // boundary
  double chi_min = -0.9;
  double chi_max = 0.9;
  std::size_t steps = 18;
  double btol = 1e-4;
  double c_hi = kDefaultBracketHigh;
  NumericFlags bnum;
  auto* boundary_cmd = app.add_subcommand("boundary", "trace c*(chi) on the diagonal c_l = c_g");
  boundary_cmd->add_option("--chi-min", chi_min)->capture_default_str();
  boundary_cmd->add_option("--chi-max", chi_max)->capture_default_str();
  boundary_cmd->add_option("--steps", steps, "intervals between chi-min and chi-max (0: one point)")
      ->capture_default_str();
  boundary_cmd->add_option("--bisect-tol", btol, "bracket width to stop at")->capture_default_str();
  boundary_cmd->add_option("--c-hi", c_hi, "upper bracket end")->capture_default_str();
  boundary_cmd->add_option("--jobs", jobs, "parallel points")->check(CLI::PositiveNumber);
  add_numeric_flags(boundary_cmd, bnum);
  add_io(boundary_cmd, "csv");

  // grid
  double g_chi_min = -1.0;
  double g_chi_max = 1.0;
  std::size_t g_chi_points = 21;
  double g_c_min = -0.5;
  double g_c_max = 4.5;
  std::size_t g_c_points = 26;
  NumericFlags gnum;
  auto* grid_cmd = app.add_subcommand("grid", "omega over a chi x c grid with c_l = c_g = c");
  grid_cmd->add_option("--chi-min", g_chi_min)->capture_default_str();
  grid_cmd->add_option("--chi-max", g_chi_max)->capture_default_str();
  grid_cmd->add_option("--chi-points", g_chi_points)->check(CLI::PositiveNumber)->capture_default_str();
  grid_cmd->add_option("--c-min", g_c_min)->capture_default_str();
  grid_cmd->add_option("--c-max", g_c_max)->capture_default_str();
  grid_cmd->add_option("--c-points", g_c_points)->check(CLI::PositiveNumber)->capture_default_str();
  grid_cmd->add_option("--jobs", jobs, "parallel cells")->check(CLI::PositiveNumber);
  add_numeric_flags(grid_cmd, gnum);
  add_io(grid_cmd, "csv");

  // simulate
  SwarmParams sp;
  SimConfig sim;
  std::string histogram_path;
  bool compare = false;
  NumericFlags snum;
  auto* sim_cmd = app.add_subcommand("simulate", "long single-particle run of the angle recurrence");
  sim_cmd->add_option("--chi", sp.chi)->required();
  sim_cmd->add_option("--cl", sp.c_l)->required();
  sim_cmd->add_option("--cg", sp.c_g)->required();
  sim_cmd->add_option("--iterations", sim.iterations)->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
  sim_cmd->add_option("--bins", sim.histogram_bins)->capture_default_str();
  sim_cmd->add_option("--batches", sim.batch_count)->capture_default_str();
  sim_cmd->add_option("--burn-in", sim.burn_in_fraction, "share of the run discarded first")
      ->capture_default_str();
  sim_cmd->add_option("--histogram", histogram_path, "write bin_midpoint,density CSV here");
  sim_cmd->add_flag("--compare", compare, "add the numeric omega and the z-score");
  add_numeric_flags(sim_cmd, snum);
  add_io(sim_cmd, "json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  if (format.empty()) format = (*table_cmd || *boundary_cmd || *grid_cmd) ? "csv" : "json";

  try {
    if (*omega_cmd) {
      const OmegaConfig cfg = onum.config();
      if (!op.finite()) throw Error(ErrorKind::NonFiniteInput, "parameters must be finite");
      Evaluation e = evaluate(op, cfg);
      if (!e.failure.empty()) {
        err << "error: " << e.failure << "\n";
        return kExitUsage;
      }
      const Verdict& v = e.verdict;
      Json rec;
      rec["chi"] = op.chi;
      rec["c_l"] = op.c_l;
      rec["c_g"] = op.c_g;
      rec["omega"] = v.omega ? finite_or_null(v.omega->omega) : Json(nullptr);
      rec["error"] = v.omega ? Json(v.omega->abs_error_estimate) : Json(nullptr);
      rec["iterations"] = v.omega ? v.omega->fixed_point_iterations : std::size_t{0};
      rec["method"] = v.omega ? Json(to_string(v.omega->method)) : Json(nullptr);
      rec["verdict"] = to_string(v.kind);
      if (v.no_convergence_residual) rec["last_residual"] = *v.no_convergence_residual;
      if (!v.diagnostic.empty()) rec["diagnostic"] = v.diagnostic;
      Output o(output, out);
      emit_record(rec, format, o.stream());
      if (!dump_cdf.empty() && e.cdf) {
        std::ofstream f(dump_cdf);
        if (!f) throw std::runtime_error("cannot open " + dump_cdf + " for writing");
        f << to_json(e.cdf->spline()).dump() << "\n";
      }
      if (v.no_convergence_residual) {
        err << "fixed point did not converge: " << v.diagnostic << "\n";
        return kExitNoConvergence;
      }
      return v.kind == VerdictKind::Indeterminate ? kExitIndeterminate : kExitOk;
    }

    if (*table_cmd) {
      const OmegaConfig cfg = tnum.config();
      Table t{{"source_chi", "source_cl", "source_cg", "paper_omega", "computed_omega", "abs_dev", "error"}, {}};
      t.rows.resize(kReferenceRows.size());
      const auto count = static_cast<std::ptrdiff_t>(kReferenceRows.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
      for (std::ptrdiff_t i = 0; i < count; ++i) {
        const ReferenceRow& row = kReferenceRows[static_cast<std::size_t>(i)];
        double computed = std::nan("");
        std::string failure;
        try {
          computed = omega_general(SwarmParams{row.chi, row.c_l, row.c_g}, cfg).omega;
        } catch (const std::exception& ex) {
          failure = ex.what();
        }
        t.rows[static_cast<std::size_t>(i)] = {row.chi, row.c_l, row.c_g, row.omega, number_cell(computed),
                                               number_cell(std::abs(computed - row.omega)), failure};
      }
      Output o(output, out);
      emit(t, format, o.stream());
      return kExitOk;
    }

    if (*boundary_cmd) {
      const OmegaConfig cfg = bnum.config();
      if (!(-1.0 < chi_min && chi_min <= chi_max && chi_max < 1.0))
        throw std::invalid_argument("need -1 < chi-min <= chi-max < 1");
      if (!(btol > 0.0)) throw std::invalid_argument("--bisect-tol must be positive");
      const std::vector<double> chis = linspace(chi_min, chi_max, steps + 1);
      const auto points = boundary_curve(chis, btol, cfg, c_hi, jobs);
      Table t{{"chi", "c_star", "bracket_width", "trelea", "variance_bound", "error"}, {}};
      for (const BoundaryPoint& p : points) {
        t.rows.push_back({p.chi, number_cell(p.c_star), p.error ? Json(nullptr) : Json(p.bracket_width),
                          trelea_bound(p.chi), variance_bound(p.chi), p.error ? *p.error : std::string()});
      }
      Output o(output, out);
      emit(t, format, o.stream());
      return kExitOk;
    }

    if (*grid_cmd) {
      const OmegaConfig cfg = gnum.config();
      const std::vector<double> chis = linspace(g_chi_min, g_chi_max, g_chi_points);
      const std::vector<double> cs = linspace(g_c_min, g_c_max, g_c_points);
      Table t{{"chi", "c", "omega", "error", "verdict"}, {}};
      t.rows.resize(chis.size() * cs.size());
      const auto count = static_cast<std::ptrdiff_t>(t.rows.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
      for (std::ptrdiff_t k = 0; k < count; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        const double chi = chis[idx / cs.size()];
        const double c = cs[idx % cs.size()];
        Evaluation e = evaluate(SwarmParams{chi, c, c}, cfg);
        const bool has = e.failure.empty() && e.verdict.omega.has_value();
        t.rows[idx] = {chi, c, has ? Json(e.verdict.omega->omega) : Json(nullptr),
                       has ? Json(e.verdict.omega->abs_error_estimate) : Json(nullptr),
                       e.failure.empty() ? std::string(to_string(e.verdict.kind)) : "Failed: " + e.failure};
      }
      Output o(output, out);
      emit(t, format, o.stream());
      return kExitOk;
    }

    if (*sim_cmd) {
      const SimStats s = simulate_drift(sp, sim);
      Json rec;
      rec["chi"] = sp.chi;
      rec["c_l"] = sp.c_l;
      rec["c_g"] = sp.c_g;
      rec["iterations"] = sim.iterations;
      rec["iterations_used"] = s.iterations_used;
      rec["seed"] = sim.seed;
      rec["mean_drift"] = s.mean_drift;
      rec["stderr"] = s.standard_error;
      rec["singular_redraws"] = s.singular_redraws;
      if (compare) {
        const OmegaConfig cfg = snum.config();
        const double omega = sp.chi == 0.0 ? omega_chi_zero(sp.c_l, sp.c_g) : omega_general(sp, cfg).omega;
        rec["omega"] = omega;
        rec["z_score"] = finite_or_null((s.mean_drift - omega) / s.standard_error);
      }
      Output o(output, out);
      emit_record(rec, format, o.stream());
      if (!histogram_path.empty()) {
        Table h{{"bin_midpoint", "density"}, {}};
        const double width = std::numbers::pi / static_cast<double>(s.histogram.size());
        for (std::size_t i = 0; i < s.histogram.size(); ++i)
          h.rows.push_back({-kHalfPi + width * (static_cast<double>(i) + 0.5), s.histogram[i]});
        Output ho(histogram_path, out);
        write_csv(ho.stream(), h);
      }
      return kExitOk;
    }
  } catch (const NoConvergence& e) {
    err << "fixed point did not converge: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}

}  // namespace psoconv
