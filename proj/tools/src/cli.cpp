#include "otranks_cli/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "otranks/gof_tests.hpp"
#include "otranks/io.hpp"
#include "otranks/solver.hpp"
#include "otranks/synthetic_data.hpp"
#include "otranks/transport_maps.hpp"

namespace otranks::cli {

namespace {

struct FitOptions {
  std::string reference = "cube";
  std::string backend = "auto";
  double tol = 0.0;
  std::size_t mc_size = 0;
  std::size_t max_iterations = 10000;
  std::uint64_t seed = 0;
};

void add_fit_options(CLI::App& cmd, FitOptions& o) {
  cmd.add_option("--reference", o.reference, "Reference measure: cube, ball or spherical")
      ->check(CLI::IsMember({"cube", "ball", "spherical"}))
      ->capture_default_str();
  cmd.add_option("--backend", o.backend, "Solver backend: auto, exact1d, exact2d or montecarlo")
      ->check(CLI::IsMember({"auto", "exact1d", "exact2d", "montecarlo"}))
      ->capture_default_str();
  cmd.add_option("--tol", o.tol, "Sup-norm tolerance on cell masses (0: backend default)");
  cmd.add_option("--mc-size", o.mc_size, "Monte Carlo quadrature size (0: max(10^4, 100 n))");
  cmd.add_option("--max-iter", o.max_iterations, "Solver iteration cap")->capture_default_str();
}

SolverConfig solver_config(const FitOptions& o) {
  SolverConfig c;
  c.backend = parse_backend(o.backend);
  c.tolerance = o.tol;
  c.quadrature_size = o.mc_size;
  c.max_iterations = o.max_iterations;
  c.seed = o.seed;
  return c;
}

ReferenceMeasure reference_for(const FitOptions& o, std::size_t d) {
  return ReferenceMeasure(ReferenceMeasure::parse_kind(o.reference), d);
}

// Writes to `path`, or to `fallback` when the path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw InputError("cannot write '" + path + "'");
  fn(file);
  if (!file) throw InputError("write to '" + path + "' failed");
}

void write_rows(std::ostream& os, const std::vector<Vector>& rows) {
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j > 0) os << ',';
      os << format_double(r[j]);
    }
    os << '\n';
  }
}

PointSet read_queries(const std::string& path, bool header, std::size_t d) {
  PointSet q = read_csv_file(path, header);
  if (q.dim() != d) throw DimensionMismatch(d, q.dim());
  return q;
}

std::vector<std::size_t> parse_split(const std::string& text) {
  std::vector<std::size_t> split;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(part, &pos);
    } catch (const std::exception&) {
      throw InputError("bad --split entry '" + part + "'");
    }
    if (pos != part.size() || v == 0) throw InputError("bad --split entry '" + part + "'");
    split.push_back(v);
  }
  if (split.size() < 2) throw InputError("--split needs at least two blocks");
  return split;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input: return kInputError;
    case ErrorKind::numerical: return kNumericalError;
    case ErrorKind::data: return kDataError;
  }
  return kNumericalError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multivariate ranks, quantiles and tests via semi-discrete optimal transport", "otranks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  bool header = false;
  std::string input, model_path, query, out_path;

  // fit
  FitOptions fit_opt;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a transport model to a CSV sample");
  fit_cmd->add_option("--input", input, "Sample CSV (rows = observations)")->required();
  fit_cmd->add_flag("--header", header, "First CSV line is a header");
  add_fit_options(*fit_cmd, fit_opt);
  fit_cmd->add_option("--seed", fit_opt.seed, "Quadrature seed");
  fit_cmd->add_option("--out", out_path, "Model JSON path")->required();

  // rank / quantile / depth
  std::string mode = "optimize";
  auto* rank_cmd = app.add_subcommand("rank", "Evaluate the rank map at query points");
  rank_cmd->add_option("--mode", mode, "optimize or vertex")->check(CLI::IsMember({"optimize", "vertex"}));

  auto* quantile_cmd = app.add_subcommand("quantile", "Evaluate the quantile map at reference points");

  std::size_t grid = 0;
  std::vector<double> bounds{0.0, 1.0, 0.0, 1.0};
  auto* depth_cmd = app.add_subcommand("depth", "Depth at query points or on a G x G lattice");
  auto* grid_opt = depth_cmd->add_option("--grid", grid, "Lattice size G (d = 2)")->check(CLI::Range(2, 100000));
  depth_cmd->add_option("--bounds", bounds, "Lattice box xmin,xmax,ymin,ymax")
      ->delimiter(',')
      ->expected(4)
      ->needs(grid_opt);

  for (auto* cmd : {rank_cmd, quantile_cmd, depth_cmd}) {
    cmd->add_option("--model", model_path, "Model JSON")->required();
    auto* q = cmd->add_option("--query", query, "Query CSV");
    if (cmd == depth_cmd) {
      q->excludes(grid_opt);
    } else {
      q->required();
    }
    cmd->add_flag("--header", header, "First CSV line is a header");
    cmd->add_option("--out", out_path, "Output CSV (default: stdout)");
  }

  // test2s
  std::string x_path, y_path;
  TwoSampleConfig ts;
  FitOptions ts_fit;
  auto* ts_cmd = app.add_subcommand("test2s", "Two-sample rank test");
  ts_cmd->add_option("--x", x_path, "First sample CSV")->required();
  ts_cmd->add_option("--y", y_path, "Second sample CSV")->required();
  ts_cmd->add_flag("--header", header, "First CSV line is a header");
  ts_cmd->add_option("--mc", ts.mc_count, "Monte Carlo points for the statistic")->capture_default_str();
  ts_cmd->add_option("--perms", ts.permutations, "Permutation replicates (0: statistic only)")
      ->capture_default_str();
  ts_cmd->add_option("--seed", ts.seed, "Master seed");
  ts_cmd->add_flag("--exact2d", ts.exact2d, "Exact cell-intersection statistic (d = 2, cube)");
  add_fit_options(*ts_cmd, ts_fit);
  ts_cmd->add_option("--out", out_path, "Report JSON");

  // testindep
  std::string split_text;
  IndependenceConfig ind;
  FitOptions ind_fit;
  auto* ind_cmd = app.add_subcommand("testindep", "Rank test of mutual independence between column blocks");
  ind_cmd->add_option("--input", input, "Sample CSV")->required();
  ind_cmd->add_flag("--header", header, "First CSV line is a header");
  ind_cmd->add_option("--split", split_text, "Block widths, e.g. 1,1")->required();
  ind_cmd->add_option("--perms", ind.permutations, "Permutation replicates (0: statistic only)")
      ->capture_default_str();
  ind_cmd->add_option("--seed", ind.seed, "Master seed");
  add_fit_options(*ind_cmd, ind_fit);
  ind_cmd->add_option("--out", out_path, "Report JSON");

  // synth
  std::string family;
  std::size_t synth_n = 0;
  std::uint64_t synth_seed = 0;
  auto* synth_cmd = app.add_subcommand("synth", "Draw a synthetic sample");
  synth_cmd->add_option("family", family, "banana, standard-normal, correlated-normal, ...")->required();
  synth_cmd->add_option("--n", synth_n, "Sample size")->required()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth_seed, "Seed");
  synth_cmd->add_option("--out", out_path, "Output CSV (default: stdout)");

  // cells
  auto* cells_cmd = app.add_subcommand("cells", "Cell polygons of an exact model");
  cells_cmd->add_option("--model", model_path, "Model JSON")->required();
  cells_cmd->add_option("--out", out_path, "Output JSON (default: stdout)");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("otranks");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "otranks: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (*fit_cmd) {
      const PointSet data = read_csv_file(input, header);
      const auto fitted = fit(data, reference_for(fit_opt, data.dim()), solver_config(fit_opt));
      save_model(out_path, fitted);
      out << "residual " << format_double(fitted.residual()) << " iterations " << fitted.iterations() << '\n';
    } else if (*rank_cmd || *quantile_cmd || *depth_cmd) {
      const auto fitted = load_model(model_path);
      std::vector<Vector> rows;
      if (*depth_cmd && grid > 0) {
        if (fitted.dim() != 2) throw InputError("--grid needs a two-dimensional model");
        if (!(bounds[0] < bounds[1] && bounds[2] < bounds[3])) throw InputError("--bounds must be increasing");
        for (std::size_t a = 0; a < grid; ++a) {
          for (std::size_t b = 0; b < grid; ++b) {
            const double t = static_cast<double>(a) / static_cast<double>(grid - 1);
            const double s = static_cast<double>(b) / static_cast<double>(grid - 1);
            const Vector x{bounds[0] + t * (bounds[1] - bounds[0]), bounds[2] + s * (bounds[3] - bounds[2])};
            rows.push_back({x[0], x[1], depth(fitted, x)});
          }
        }
      } else {
        if (query.empty()) throw InputError("--query or --grid is required");
        const PointSet q = read_queries(query, header, fitted.dim());
        rows.resize(q.size());
        const RankMode rank_mode = mode == "vertex" ? RankMode::exact_vertex : RankMode::optimize;
        for (std::size_t i = 0; i < q.size(); ++i) {
          if (*rank_cmd) {
            rows[i] = rank(fitted, q[i], rank_mode);
          } else if (*quantile_cmd) {
            if (!fitted.reference().contains(q[i])) {
              throw InputError("query row " + std::to_string(i + 1) + " lies outside the reference support");
            }
            rows[i] = quantile(fitted, q[i]);
          } else {
            rows[i] = {depth(fitted, q[i])};
          }
        }
      }
      emit(out_path, out, [&](std::ostream& os) { write_rows(os, rows); });
    } else if (*ts_cmd) {
      const PointSet x = read_csv_file(x_path, header);
      const PointSet y = read_csv_file(y_path, header);
      ts.reference = ReferenceMeasure::parse_kind(ts_fit.reference);
      ts.solver = solver_config(ts_fit);
      const auto report = two_sample_test(x, y, ts);
      if (!out_path.empty()) write_json_file(out_path, report_to_json(report));
      out << "T " << format_double(report.statistic) << " p " << format_double(report.p_value) << '\n';
    } else if (*ind_cmd) {
      const PointSet z = read_csv_file(input, header);
      ind.split = parse_split(split_text);
      ind.solver = solver_config(ind_fit);
      if (ind_fit.reference != "cube") throw InputError("the independence test uses the cube reference");
      const auto report = independence_test(z, ind);
      if (!out_path.empty()) write_json_file(out_path, report_to_json(report));
      out << "T " << format_double(report.statistic) << " p " << format_double(report.p_value) << '\n';
    } else if (*synth_cmd) {
      const PointSet sample = generate(parse_family(family), synth_n, synth_seed);
      emit(out_path, out, [&](std::ostream& os) { write_csv(os, sample); });
    } else if (*cells_cmd) {
      const auto fitted = load_model(model_path);
      if (!fitted.has_cells()) throw InputError("cells need an exact1d or exact2d model");
      const auto doc = cells_to_json(fitted);
      if (out_path.empty()) {
        out << doc.dump(2) << '\n';
      } else {
        write_json_file(out_path, doc);
      }
    }
  } catch (const Error& e) {
    err << "otranks: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "otranks: " << e.what() << '\n';
    return kNumericalError;
  }
  return kOk;
}

}  // namespace otranks::cli
