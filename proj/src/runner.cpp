#include "spectral/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spectral/conditioning.hpp"
#include "spectral/ensembles.hpp"
#include "spectral/parallel.hpp"
#include "spectral/pseudospectrum.hpp"
#include "spectral/regularize.hpp"
#include "spectral/sde.hpp"
#include "spectral/svg.hpp"
#include "spectral/version.hpp"

namespace spectral {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_json_file(const fs::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

// Artifact writer bound to one output directory; records relative names in
// write order.
struct Sink {
  fs::path dir;
  std::vector<std::string> names;

  void text(const std::string& name, const std::string& content) {
    write_text_file(dir / name, content);
    names.push_back(name);
  }
  void jsonf(const std::string& name, const json& j) {
    write_json_file(dir / name, j);
    names.push_back(name);
  }
  void matrix(const std::string& name, const CMatrix& m) {
    write_matrix_json(m, (dir / name).string());
    names.push_back(name);
  }
  void svg(const std::string& name, const SvgPlot& plot) {
    plot.write((dir / name).string());
    names.push_back(name);
  }
};

std::string csv_row(const std::vector<double>& values) {
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) row += ",";
    row += format_double(values[i]);
  }
  row += "\n";
  return row;
}

json contour_set_to_json(const ContourSet& cs) {
  json lines = json::array();
  for (const auto& level_lines : cs.polylines) {
    json per_level = json::array();
    for (const auto& line : level_lines) {
      json pts = json::array();
      for (const auto& p : line) pts.push_back({p[0], p[1]});
      per_level.push_back(pts);
    }
    lines.push_back(per_level);
  }
  return json{{"levels", cs.levels}, {"polylines", lines}};
}

std::string field_to_csv(const SminField& f) {
  std::string csv = "z_re,z_im,smin\n";
  for (int iy = 0; iy < f.ny; ++iy)
    for (int ix = 0; ix < f.nx; ++ix)
      csv += csv_row({f.x_at(ix), f.y_at(iy), f.at(ix, iy)});
  return csv;
}

SvgPlot contour_plot(const SminField& f, const ContourSet& cs,
                     const std::string& title) {
  SvgPlot plot(f.z0.real(), f.z1.real(), f.z0.imag(), f.z1.imag(), title);
  for (std::size_t k = 0; k < cs.polylines.size(); ++k) {
    for (const auto& line : cs.polylines[k])
      plot.add_polyline(line, static_cast<int>(k));
    plot.add_series_label("level " + format_double(cs.levels[k]),
                          static_cast<int>(k));
  }
  return plot;
}

SdeVariant variant_from_string(const std::string& s) {
  return s == "complex" ? SdeVariant::complex_singular
                        : SdeVariant::real_wishart;
}

void run_pseudospectrum(const ExperimentConfig& c, int workers, Sink& sink,
                        bool& pass) {
  CMatrix m = matrix_from_source(*c.matrix);
  const FieldSpec& f = *c.field;
  SminField field = smin_field(m, f.z0, f.z1, static_cast<int>(f.nx),
                               static_cast<int>(f.ny), workers);
  sink.text("field.csv", field_to_csv(field));
  ContourSet cs = contours(field, f.levels);
  sink.jsonf("contours.json", contour_set_to_json(cs));
  sink.svg("contours.svg", contour_plot(field, cs, "smin level curves"));

  if (c.area) {
    double area = pseudospectrum_area(m, c.area->epsilon, c.area->region,
                                      c.area->resolution, workers);
    double eps2 = c.area->epsilon * c.area->epsilon;
    sink.jsonf("area.json",
               json{{"epsilon", c.area->epsilon},
                    {"region", region_to_json(c.area->region)},
                    {"resolution", c.area->resolution},
                    {"area", area},
                    {"area_over_pi_eps2", area / (3.14159265358979323846 * eps2)}});
  }
  if (c.limit) {
    LimitEstimate est = limiting_overlap_estimate(m, c.limit->region,
                                                  c.limit->eps_schedule, workers);
    sink.jsonf("limit.json", json{{"value", est.value},
                                  {"converged", est.converged},
                                  {"eps_schedule", est.eps_schedule},
                                  {"ratios", est.ratios},
                                  {"extrapolants", est.extrapolants}});
    pass = pass && est.converged;
  }
  if (c.perturb_delta) {
    RegularizationResult reg =
        regularize(m, *c.perturb_delta, static_cast<int>(c.attempts), c.rng);
    sink.jsonf("perturbation.json", regularization_to_json(reg));
    sink.matrix("perturbation_matrix.json", reg.E);
    CMatrix mp = m + reg.E;
    SminField fp = smin_field(mp, f.z0, f.z1, static_cast<int>(f.nx),
                              static_cast<int>(f.ny), workers);
    sink.text("field_perturbed.csv", field_to_csv(fp));
    ContourSet csp = contours(fp, f.levels);
    sink.jsonf("contours_perturbed.json", contour_set_to_json(csp));
    sink.svg("contours_perturbed.svg",
             contour_plot(fp, csp, "smin level curves (regularized)"));
    pass = pass && reg.certificate;
  }
}

void run_regularize(const ExperimentConfig& c, Sink& sink, bool& pass) {
  CMatrix m = matrix_from_source(*c.matrix);
  RegularizationResult reg =
      regularize(m, *c.delta, static_cast<int>(c.attempts), c.rng);
  sink.jsonf("regularize.json", regularization_to_json(reg));
  sink.matrix("perturbation.json", reg.E);
  pass = reg.certificate;
  if (c.davies_epsilon) {
    DaviesResult d = davies_tradeoff(m, *c.davies_epsilon,
                                     static_cast<int>(c.attempts), c.rng);
    sink.jsonf("davies.json", json{{"epsilon", d.epsilon},
                                   {"delta_used", d.delta_used},
                                   {"objective", d.objective},
                                   {"bound", d.bound},
                                   {"pass", d.pass},
                                   {"regularization",
                                    regularization_to_json(d.reg)}});
    pass = pass && d.pass;
  }
}

void run_theorem_b(const ExperimentConfig& c, int workers, Sink& sink,
                   bool& pass) {
  CMatrix m = matrix_from_source(*c.matrix);
  TheoremBReport rep =
      verify_theorem_b(m, *c.delta, *c.region, c.trials, c.rng, workers);
  sink.jsonf("theorem_b.json", theorem_b_to_json(rep));
  pass = rep.pass;
}

void run_tails(const ExperimentConfig& c, int workers, Sink& sink,
               bool& pass) {
  TailReport rep;
  const std::string& law = *c.law;
  if (law == "smin-exact") {
    rep = verify_smin_law(static_cast<int>(*c.n), *c.eps_grid, c.trials,
                          c.rng, workers);
  } else if (law == "s1-tail") {
    rep = verify_s1_tail(static_cast<int>(*c.n), *c.t_grid, c.trials, c.rng,
                         workers);
  } else if (law == "small-ball") {
    CMatrix m = matrix_from_source(*c.matrix);
    rep = verify_small_ball(m, *c.delta, *c.eps_grid, c.trials, c.rng,
                            workers);
  } else {
    CMatrix m = matrix_from_source(*c.matrix);
    rep = verify_sst_real(m, *c.eps_grid, c.trials, c.rng, workers);
  }
  sink.jsonf("tail_report.json", tail_report_to_json(rep));

  if (rep.points.size() >= 2) {
    double x_lo = rep.points.front().param, x_hi = rep.points.back().param;
    double y_hi = 0.0;
    for (const TailPoint& p : rep.points)
      y_hi = std::max({y_hi, p.reference, p.ci.hi});
    if (x_hi > x_lo && y_hi > 0.0) {
      SvgPlot plot(x_lo, x_hi, 0.0, 1.05 * y_hi,
                   "tail probabilities: " + rep.law);
      std::vector<std::array<double, 2>> ref;
      for (const TailPoint& p : rep.points) {
        ref.push_back({p.param, p.reference});
        plot.add_marker(p.param, p.ci.p_hat, 1);
      }
      plot.add_polyline(ref, 0);
      plot.add_series_label(rep.exact_law ? "exact law" : "bound", 0);
      plot.add_series_label("empirical", 1);
      sink.svg("tail_report.svg", plot);
    }
  }
  pass = rep.pass;
}

void run_jordan_scan(const ExperimentConfig& c, int workers, Sink& sink,
                     bool& pass) {
  JordanScanReport rep = jordan_scan(static_cast<int>(*c.n), *c.delta_list,
                                     c.trials, c.rng, workers);
  sink.jsonf("jordan_scan.json", jordan_scan_to_json(rep));
  std::string csv = "delta,min_kappa,davies_upper\n";
  for (std::size_t k = 0; k < rep.deltas.size(); ++k)
    csv += csv_row({rep.deltas[k], rep.min_kappa[k], rep.davies_upper[k]});
  sink.text("jordan_scan.csv", csv);

  std::vector<std::array<double, 2>> kappa_pts, upper_pts;
  for (std::size_t k = 0; k < rep.deltas.size(); ++k) {
    double x = std::log10(1.0 / rep.deltas[k]);
    kappa_pts.push_back({x, std::log10(rep.min_kappa[k])});
    upper_pts.push_back({x, std::log10(rep.davies_upper[k])});
  }
  double x_lo = kappa_pts.front()[0], x_hi = kappa_pts.back()[0];
  double y_lo = kappa_pts.front()[1], y_hi = kappa_pts.front()[1];
  for (const auto& p : kappa_pts) {
    y_lo = std::min(y_lo, p[1]);
    y_hi = std::max(y_hi, p[1]);
  }
  for (const auto& p : upper_pts) {
    y_lo = std::min(y_lo, p[1]);
    y_hi = std::max(y_hi, p[1]);
  }
  if (x_hi > x_lo && y_hi > y_lo) {
    SvgPlot plot(x_lo, x_hi, y_lo - 0.1, y_hi + 0.1,
                 "attainable conditioning vs perturbation size (log10)");
    plot.add_polyline(kappa_pts, 0);
    plot.add_polyline(upper_pts, 1);
    plot.add_series_label("min kappa_V", 0);
    plot.add_series_label("2/delta^(1-1/n)", 1);
    sink.svg("jordan_scan.svg", plot);
  }
  pass = true;
  for (std::size_t k = 0; k < rep.deltas.size(); ++k)
    if (!(rep.min_kappa[k] <= 1.5 * rep.davies_upper[k])) pass = false;
}

void run_bulk_profile(const ExperimentConfig& c, int workers, Sink& sink,
                      bool& pass) {
  BulkProfileReport rep = bulk_overlap_profile(
      static_cast<int>(*c.n), c.trials, static_cast<int>(c.r_bins), c.rng,
      workers);
  sink.jsonf("bulk_profile.json", bulk_profile_to_json(rep));
  std::string csv = "center,mean_overlap_over_n,count\n";
  for (std::size_t k = 0; k < rep.centers.size(); ++k)
    csv += csv_row({rep.centers[k], rep.mean_overlap_over_n[k],
                    static_cast<double>(rep.counts[k])});
  sink.text("bulk_profile.csv", csv);

  std::vector<std::array<double, 2>> mean_pts, ref_pts;
  double y_hi = 1.0;
  for (std::size_t k = 0; k < rep.centers.size(); ++k) {
    if (rep.counts[k] > 0) {
      mean_pts.push_back({rep.centers[k], rep.mean_overlap_over_n[k]});
      y_hi = std::max(y_hi, rep.mean_overlap_over_n[k]);
    }
    double r = rep.centers[k];
    ref_pts.push_back({r, std::max(0.0, 1.0 - r * r)});
  }
  SvgPlot plot(0.0, rep.centers.back(), 0.0, 1.05 * y_hi,
               "radial overlap profile");
  if (mean_pts.size() >= 2) plot.add_polyline(mean_pts, 0);
  for (const auto& p : mean_pts) plot.add_marker(p[0], p[1], 0);
  plot.add_polyline(ref_pts, 1);
  plot.add_series_label("mean kappa^2/n", 0);
  plot.add_series_label("1 - r^2", 1);
  sink.svg("bulk_profile.svg", plot);
  pass = true;
}

std::string paths_to_csv(const CoupledPaths& p, std::size_t n) {
  std::string csv = "t";
  for (std::size_t i = 0; i < n; ++i) csv += ",p1_" + std::to_string(i);
  for (std::size_t i = 0; i < n; ++i) csv += ",p2_" + std::to_string(i);
  csv += "\n";
  for (std::size_t k = 0; k < p.times.size(); ++k) {
    std::vector<double> row;
    row.reserve(1 + 2 * n);
    row.push_back(p.times[k]);
    for (double v : p.path1[k]) row.push_back(v);
    for (double v : p.path2[k]) row.push_back(v);
    csv += csv_row(row);
  }
  return csv;
}

void run_sde_couple(const ExperimentConfig& c, Sink& sink, bool& pass) {
  SdeVariant variant = variant_from_string(*c.variant);
  const std::size_t n = c.init1->size();
  Rng root(c.rng);
  json per_run = json::array();
  std::int64_t total_violations = 0;
  bool all_completed = true;
  std::int64_t dumped = 0;
  for (std::int64_t r = 0; r < c.runs; ++r) {
    CoupledPaths p =
        couple_evolve(*c.init1, *c.init2, *c.t_final, c.steps, variant,
                      root.substream(static_cast<std::uint64_t>(r)));
    per_run.push_back(json{{"run", r},
                           {"completed", p.completed},
                           {"t_reached", p.t_reached},
                           {"steps_recorded", p.times.size()},
                           {"max_step_used", p.max_step_used},
                           {"tol_ord", p.tol_ord},
                           {"ordering_violation_count",
                            p.ordering_violation_count},
                           {"max_violation", p.max_violation}});
    total_violations += p.ordering_violation_count;
    all_completed = all_completed && p.completed;
    if (dumped < c.dump_paths) {
      char name[32];
      if (r == 0)
        std::snprintf(name, sizeof(name), "paths.csv");
      else
        std::snprintf(name, sizeof(name), "paths_%02lld.csv",
                      static_cast<long long>(r));
      sink.text(name, paths_to_csv(p, n));
      ++dumped;
      if (r == 0 && p.times.size() >= 2) {
        double y_lo = p.path1[0][n - 1], y_hi = p.path2[0][0];
        for (std::size_t k = 0; k < p.times.size(); ++k) {
          y_lo = std::min(y_lo, p.path1[k][n - 1]);
          y_hi = std::max(y_hi, p.path2[k][0]);
        }
        if (p.times.back() > 0.0 && y_hi > y_lo) {
          SvgPlot plot(0.0, p.times.back(), y_lo, 1.02 * y_hi,
                       "coupled singular-value paths");
          for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::array<double, 2>> l1, l2;
            for (std::size_t k = 0; k < p.times.size(); ++k) {
              l1.push_back({p.times[k], p.path1[k][i]});
              l2.push_back({p.times[k], p.path2[k][i]});
            }
            plot.add_polyline(l1, 0);
            plot.add_polyline(l2, 1);
          }
          plot.add_series_label("lower start", 0);
          plot.add_series_label("upper start", 1);
          sink.svg("paths.svg", plot);
        }
      }
    }
  }
  sink.jsonf("couple_summary.json",
             json{{"variant", *c.variant},
                  {"n", n},
                  {"t_final", *c.t_final},
                  {"steps", c.steps},
                  {"runs", c.runs},
                  {"total_ordering_violations", total_violations},
                  {"all_completed", all_completed},
                  {"per_run", per_run},
                  {"pass", total_violations == 0 && all_completed}});
  pass = total_violations == 0 && all_completed;
}

void run_sde_marginal(const ExperimentConfig& c, int workers, Sink& sink,
                      bool& pass) {
  CMatrix m = matrix_from_source(*c.matrix);
  MarginalReport rep =
      marginal_law_check(m, *c.t, c.trials, c.steps,
                         variant_from_string(*c.variant), c.rng, workers);
  sink.jsonf("marginal.json", marginal_report_to_json(rep));
  pass = rep.pass;
}

void run_optimize_st(Sink& sink, bool& pass) {
  StOptimum opt = optimize_st();
  // The certified-regularization constant 4 is usable exactly because the
  // optimal t*sqrt(s) stays below it.
  pass = opt.objective <= 4.0;
  sink.jsonf("st_optimum.json", json{{"t", opt.t},
                                     {"s", opt.s},
                                     {"objective", opt.objective},
                                     {"pass", pass}});
}

}  // namespace

RunManifest run(const ExperimentConfig& config, const std::string& out_dir) {
  // Round-trip through the strict parser so hand-built configs obey exactly
  // the schema a config file would, and the echoed manifest is authoritative.
  json echo = config_echo(config);
  ExperimentConfig c = parse_config_text(echo.dump());

  auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  Sink sink{fs::path(out_dir), {}};
  int workers = resolve_workers(c.workers);
  bool pass = true;

  if (c.command == "pseudospectrum") {
    run_pseudospectrum(c, workers, sink, pass);
  } else if (c.command == "regularize") {
    run_regularize(c, sink, pass);
  } else if (c.command == "verify-theorem-b") {
    run_theorem_b(c, workers, sink, pass);
  } else if (c.command == "tails") {
    run_tails(c, workers, sink, pass);
  } else if (c.command == "jordan-scan") {
    run_jordan_scan(c, workers, sink, pass);
  } else if (c.command == "bulk-profile") {
    run_bulk_profile(c, workers, sink, pass);
  } else if (c.command == "sde-couple") {
    run_sde_couple(c, sink, pass);
  } else if (c.command == "sde-marginal") {
    run_sde_marginal(c, workers, sink, pass);
  } else if (c.command == "optimize-st") {
    run_optimize_st(sink, pass);
  } else {
    throw std::invalid_argument("run: unknown command " + c.command);
  }

  RunManifest m;
  m.command = c.command;
  m.config = echo;
  m.artifacts = sink.names;
  m.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  m.seed = c.rng.seed;
  m.version = kVersion;
  m.pass = pass;
  write_json_file(fs::path(out_dir) / "manifest.json", manifest_to_json(m));
  return m;
}

RunManifest rerun_from_manifest(const std::string& manifest_path,
                                const std::string& out_dir) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open manifest: " + manifest_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("manifest is not valid JSON: ") +
                             e.what());
  }
  if (!j.is_object() || !j.contains("config"))
    throw std::runtime_error("manifest has no config object");
  ExperimentConfig c = parse_config_text(j["config"].dump());
  return run(c, out_dir);
}

nlohmann::json manifest_to_json(const RunManifest& m) {
  return json{{"command", m.command},
              {"config", m.config},
              {"artifacts", m.artifacts},
              {"wall_clock_seconds", m.wall_clock_seconds},
              {"seed", m.seed},
              {"version", m.version},
              {"pass", m.pass}};
}

}  // namespace spectral
