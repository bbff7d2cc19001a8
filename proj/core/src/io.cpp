#include "otranks/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace otranks {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw InputError("line " + std::to_string(line) + ": cannot parse '" + std::string(field) + "' as a number");
  }
  if (!std::isfinite(value)) throw InputError("line " + std::to_string(line) + ": non-finite value");
  return value;
}

}  // namespace

PointSet read_csv(std::istream& in, bool header) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  std::vector<double> coords;
  std::vector<double> row;
  bool skipped_header = !header;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    row.clear();
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = view.find(',', start);
      row.push_back(parse_field(view.substr(start, comma == std::string_view::npos ? view.npos : comma - start), lineno));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (dim == 0) {
      dim = row.size();
    } else if (row.size() != dim) {
      throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(dim) + " fields, found " +
                       std::to_string(row.size()));
    }
    coords.insert(coords.end(), row.begin(), row.end());
  }
  if (in.bad()) throw InputError("read error");
  if (dim == 0) throw InputError("no data rows");
  return PointSet(dim, std::move(coords));
}

PointSet read_csv_file(const std::string& path, bool header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return read_csv(in, header);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(std::ostream& out, const PointSet& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j > 0) out << ',';
      out << format_double(p[j]);
    }
    out << '\n';
  }
}

nlohmann::json model_to_json(const FittedTransport& fitted) {
  using nlohmann::json;
  const auto& sites = fitted.potential().sites();
  json points = json::array();
  for (std::size_t i = 0; i < sites.size(); ++i) points.push_back(to_vector(sites[i]));
  const auto& cfg = fitted.config();
  json doc = {
      {"version", kModelVersion},
      {"d", fitted.dim()},
      {"reference", {{"kind", fitted.reference().name()}, {"d", fitted.reference().dim()}}},
      {"points", std::move(points)},
      {"h", fitted.potential().weights()},
      {"residual", fitted.residual()},
      {"iterations", fitted.iterations()},
      {"config",
       {{"backend", backend_name(cfg.backend)},
        {"tol", cfg.tolerance},
        {"max_iterations", cfg.max_iterations},
        {"M", cfg.quadrature_size},
        {"seed", cfg.seed}}},
  };
  const auto& t = fitted.targets();
  const bool uniform = std::all_of(t.begin(), t.end(), [&](double v) { return v == 1.0 / static_cast<double>(t.size()); });
  if (!uniform) doc["targets"] = t;
  return doc;
}

FittedTransport model_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw InputError("model must be a JSON object");
    if (doc.at("version").get<int>() != kModelVersion) {
      throw InputError("unsupported model version " + doc.at("version").dump());
    }
    const auto d = doc.at("d").get<std::size_t>();
    const auto& ref = doc.at("reference");
    const ReferenceMeasure reference(ReferenceMeasure::parse_kind(ref.at("kind").get<std::string>()),
                                     ref.at("d").get<std::size_t>());
    if (reference.dim() != d) throw InputError("model reference dimension does not match d");
    PointSet points(d);
    for (const auto& row : doc.at("points")) {
      const auto p = row.get<std::vector<double>>();
      if (p.size() != d) throw DimensionMismatch(d, p.size());
      points.push_back(p);
    }
    auto h = doc.at("h").get<std::vector<double>>();
    const auto& c = doc.at("config");
    SolverConfig config;
    config.backend = parse_backend(c.at("backend").get<std::string>());
    config.tolerance = c.at("tol").get<double>();
    config.max_iterations = c.value("max_iterations", std::size_t{10000});
    config.quadrature_size = c.at("M").get<std::size_t>();
    config.seed = c.at("seed").get<std::uint64_t>();
    std::vector<double> targets;
    if (doc.contains("targets")) targets = doc.at("targets").get<std::vector<double>>();
    return restore(points, std::move(h), reference, config, doc.at("residual").get<double>(),
                   doc.value("iterations", std::size_t{0}), targets);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model: ") + e.what());
  }
}

void save_model(const std::string& path, const FittedTransport& fitted) { write_json_file(path, model_to_json(fitted)); }

FittedTransport load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return model_from_json(doc);
}

nlohmann::json report_to_json(const TwoSampleReport& r) {
  return {
      {"version", kReportVersion},
      {"test", "two-sample"},
      {"statistic", r.statistic},
      {"standard_error", r.standard_error},
      {"m", r.m},
      {"n", r.n},
      {"d", r.d},
      {"exact2d", r.exact},
      {"mc_samples", r.mc_count},
      {"permutations", r.replicates.size()},
      {"replicates", r.replicates},
      {"p_value", r.p_value},
      {"seeds",
       {{"master", r.master_seed},
        {"fit", r.seeds.fit},
        {"mc", r.seeds.mc},
        {"permutation", r.seeds.permutation},
        {"rank", r.seeds.rank}}},
  };
}

nlohmann::json report_to_json(const IndependenceReport& r) {
  return {
      {"version", kReportVersion},
      {"test", "independence"},
      {"statistic", r.statistic},
      {"n", r.n},
      {"d", r.d},
      {"split", r.split},
      {"contributions", r.contributions},
      {"permutations", r.replicates.size()},
      {"replicates", r.replicates},
      {"p_value", r.p_value},
      {"seeds",
       {{"master", r.master_seed}, {"fit", r.seeds.fit}, {"permutation", r.seeds.permutation}, {"rank", r.seeds.rank}}},
  };
}

nlohmann::json cells_to_json(const FittedTransport& fitted) {
  using nlohmann::json;
  json cells = json::array();
  const auto& potential = fitted.potential();
  for (const auto& c : fitted.cells()) {
    json cell = {{"site", c.site}, {"point", to_vector(potential.site(c.site))}, {"area", c.measure}};
    if (fitted.dim() == 1) {
      cell["interval"] = {c.lower, c.upper};
    } else {
      json verts = json::array();
      for (const auto& v : c.polygon) verts.push_back({v.x, v.y});
      cell["vertices"] = std::move(verts);
    }
    cells.push_back(std::move(cell));
  }
  return {{"version", kReportVersion}, {"d", fitted.dim()}, {"cells", std::move(cells)}};
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw InputError("write to '" + path + "' failed");
}

}  // namespace otranks
