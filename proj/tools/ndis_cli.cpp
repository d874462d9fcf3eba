// Command-line front end: spectrum curves, calibrated mechanisms, utility
// metrics, and the record-universe leverage search, with JSON/CSV output.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ndis/csv.hpp"
#include "ndis/gauss_mech.hpp"
#include "ndis/gl.hpp"
#include "ndis/linalg.hpp"
#include "ndis/metrics.hpp"
#include "ndis/ndis_core.hpp"
#include "ndis/numerics.hpp"
#include "ndis/ols.hpp"
#include "ndis/rng.hpp"
#include "ndis/rp.hpp"

using nlohmann::json;

namespace {

struct Config {
  std::string input;
  std::string out;
  std::string format = "json";
  std::string mechanism;
  std::string method = "analytic";
  std::string algo = "all";
  double eps = 1.0;
  std::string eps_grid;  // "a:b:steps"
  std::optional<double> delta;
  int r = 1;
  double alpha = 0.01;
  double gamma = 0.01;
  std::optional<std::uint64_t> seed;
  std::optional<double> l;
  int trials = 100;
  int k = 0;
  int max_iters = 100;
  bool raw_projection = false;
};

std::vector<double> parse_grid(const Config& cfg) {
  if (cfg.eps_grid.empty()) return {cfg.eps};
  double a, b;
  int steps;
  if (std::sscanf(cfg.eps_grid.c_str(), "%lf:%lf:%d", &a, &b, &steps) != 3 ||
      steps < 1 || b < a)
    throw ndis::Error("bad --eps-grid, expected a:b:steps with b >= a");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    grid.push_back(steps == 1 ? a : a + (b - a) * i / (steps - 1));
  return grid;
}

void emit(const Config& cfg, const json& doc,
          const std::vector<std::string>& csv_header,
          const ndis::Matrix& csv_values) {
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!cfg.out.empty()) {
    file.open(cfg.out);
    if (!file) throw ndis::Error("cannot open output file: " + cfg.out);
    out = &file;
  }
  if (cfg.format == "json")
    *out << doc.dump(2) << "\n";
  else
    ndis::write_csv(*out, csv_header, csv_values);
}

json matrix_json(const ndis::Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const ndis::Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

double auto_norm_bound(const ndis::Matrix& m) {
  double l = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    l = std::max(l, m.row(i).norm());
  return l;
}

ndis::MvGaussian block_projection_gaussian(const ndis::Matrix& d, int r) {
  // D^T G stacked column-wise is N(0, I_r (x) D^T D).
  const ndis::Matrix gram = d.transpose() * d;
  const Eigen::Index w = gram.rows();
  ndis::MvGaussian g;
  g.mu = ndis::Vector::Zero(w * r);
  g.sigma = ndis::Matrix::Zero(w * r, w * r);
  for (int blk = 0; blk < r; ++blk)
    g.sigma.block(blk * w, blk * w, w, w) = gram;
  return g;
}

ndis::Matrix drop_row(const ndis::Matrix& m, Eigen::Index row) {
  ndis::Matrix out(m.rows() - 1, m.cols());
  Eigen::Index at = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if (i != row) out.row(at++) = m.row(i);
  return out;
}

ndis::LsDomainSet ls_neighbor_domain(const ndis::RegressionData& data) {
  const ndis::Matrix joined = data.joined();
  const ndis::DomainSet raw = ndis::neighbor_domain(joined, joined);
  ndis::LsDomainSet x;
  for (const ndis::Matrix& m : raw.members) {
    ndis::RegressionData member;
    member.B = m.leftCols(m.cols() - 1);
    member.b = m.rightCols(1);
    if (ndis::has_full_column_rank(member.B)) x.members.push_back(member);
  }
  return x;
}

int cmd_is_curve(const Config& cfg) {
  const std::vector<double> grid = parse_grid(cfg);
  const bool mc = cfg.method == "mc";
  const std::uint64_t seed = cfg.seed.value_or(0);
  if (mc && !cfg.seed)
    throw ndis::Error("--seed is required for --method mc");

  std::string pair;
  std::vector<ndis::ISPoint> points;

  if (cfg.mechanism == "gauss") {
    const double t = cfg.l.value_or(1.0);  // sensitivity-to-noise ratio
    pair = "gauss(t=" + std::to_string(t) + ")";
    if (mc) {
      ndis::MvGaussian n1{ndis::Vector::Zero(1), ndis::Matrix::Identity(1, 1)};
      ndis::MvGaussian n2{ndis::Vector::Constant(1, t),
                          ndis::Matrix::Identity(1, 1)};
      points = ndis::is_curve(n1, n2, grid, cfg.alpha, cfg.gamma, seed);
    } else {
      for (double e : grid) points.push_back({e, ndis::gauss_delta(t, e)});
    }
  } else if (cfg.mechanism == "rp" || cfg.mechanism == "rlc") {
    const ndis::CsvTable table = ndis::load_csv(cfg.input);
    const ndis::Vector lev = ndis::leverage_scores(table.values);
    Eigen::Index row;
    const double p = lev.maxCoeff(&row);
    const int r = cfg.mechanism == "rlc" ? 1 : cfg.r;
    pair = cfg.mechanism + "(p=" + std::to_string(p) +
           ",row=" + std::to_string(row) + ",r=" + std::to_string(r) + ")";
    if (mc) {
      const ndis::MvGaussian n1 = block_projection_gaussian(table.values, r);
      const ndis::MvGaussian n2 =
          block_projection_gaussian(drop_row(table.values, row), r);
      points = ndis::is_curve(n1, n2, grid, cfg.alpha, cfg.gamma, seed);
    } else if (cfg.mechanism == "rlc") {
      for (double e : grid) points.push_back({e, ndis::delta_rlc(p, e)});
    } else {
      for (double e : grid) points.push_back({e, ndis::delta_rp(p, r, e)});
    }
  } else if (cfg.mechanism == "als") {
    const ndis::RegressionData data =
        ndis::as_regression(ndis::load_csv(cfg.input));
    const ndis::Vector q_all = ndis::leverage_scores(data.joined());
    Eigen::Index row;
    const double q = q_all.maxCoeff(&row);
    const double p = ndis::leverage_scores(data.B)[row];
    pair = "als(q=" + std::to_string(q) + ",p=" + std::to_string(p) +
           ",row=" + std::to_string(row) + ",r=" + std::to_string(cfg.r) + ")";
    if (mc) {
      const ndis::AlsAsymptotic full = ndis::als_asymptotic(data, cfg.r);
      ndis::RegressionData neighbor;
      neighbor.B = drop_row(data.B, row);
      neighbor.b = drop_row(data.b, row);
      const ndis::AlsAsymptotic less = ndis::als_asymptotic(neighbor, cfg.r);
      ndis::MvGaussian n1{full.mean, full.cov};
      ndis::MvGaussian n2{less.mean, less.cov};
      points = ndis::is_curve(n1, n2, grid, cfg.alpha, cfg.gamma, seed);
    } else {
      const int d = static_cast<int>(data.cols());
      for (double e : grid)
        points.push_back({e, ndis::delta_als(q, p, cfg.r, d, e)});
    }
  } else {
    throw ndis::Error("is-curve: --mechanism must be gauss, rp, rlc, or als");
  }

  json doc;
  doc["pair"] = pair;
  doc["points"] = json::array();
  for (const auto& pt : points)
    doc["points"].push_back({{"eps", pt.eps}, {"delta", pt.delta}});
  doc["method"] = mc ? "mc" : "analytic";
  doc["seed"] = seed;

  ndis::Matrix csv(static_cast<Eigen::Index>(points.size()), 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    csv(static_cast<Eigen::Index>(i), 0) = points[i].eps;
    csv(static_cast<Eigen::Index>(i), 1) = points[i].delta;
  }
  emit(cfg, doc, {"eps", "delta"}, csv);
  return 0;
}

struct MechRun {
  json info;
  ndis::Matrix output;  // matrix or column vector
};

MechRun run_mechanism(const Config& cfg, std::uint64_t seed) {
  const ndis::CsvTable table = ndis::load_csv(cfg.input);
  const double delta =
      cfg.delta.value_or(1.0 / static_cast<double>(table.values.rows()));
  if (!(delta > 0.0 && delta < 1.0))
    throw ndis::Error("delta must be in (0, 1)");
  MechRun run;
  run.info["mechanism"] = cfg.mechanism;
  run.info["eps"] = cfg.eps;
  run.info["delta"] = delta;
  run.info["seed"] = seed;

  if (cfg.mechanism == "rp" || cfg.mechanism == "rlc" ||
      cfg.mechanism == "rp-rel") {
    const double l = cfg.l.value_or(auto_norm_bound(table.values));
    ndis::MechRpResult res;
    if (cfg.mechanism == "rp") {
      res = ndis::mech_rp(table.values, cfg.r, cfg.eps, delta, l, seed);
    } else if (cfg.mechanism == "rlc") {
      res = ndis::mech_rlc(table.values, cfg.eps, delta, l, seed);
    } else {
      const ndis::DomainSet x =
          ndis::neighbor_domain(table.values, table.values);
      res = ndis::mech_rp_rel(table.values, x, cfg.r, cfg.eps, delta, l, seed);
      run.info["set_leverage"] = res.set_leverage;
      run.info["branch"] = res.noised ? "noised" : "unnoised";
    }
    run.info["r"] = res.spec.r;
    run.info["l"] = res.spec.l;
    run.info["s_bar"] = res.spec.s_bar;
    run.info["sigma"] = res.spec.sigma;
    run.output = res.output;
    return run;
  }

  if (cfg.mechanism == "ls" || cfg.mechanism == "als" ||
      cfg.mechanism == "ls-rel") {
    const ndis::RegressionData data = ndis::as_regression(table);
    const double l = cfg.l.value_or(auto_norm_bound(data.joined()));
    ndis::MechLsResult res;
    if (cfg.mechanism == "ls") {
      res = ndis::mech_ls(data, cfg.r, cfg.eps, delta, l, seed);
    } else if (cfg.mechanism == "als") {
      res = ndis::mech_als(data, cfg.r, cfg.eps, delta, l, seed);
    } else {
      const ndis::LsDomainSet x = ls_neighbor_domain(data);
      res = ndis::mech_ls_rel(data, x, cfg.r, cfg.eps, delta, l, seed);
      run.info["set_leverage"] = res.set_leverage;
      run.info["set_residual"] = res.set_residual;
      run.info["branch"] = res.regularized ? "regularized" : "unregularized";
    }
    run.info["r"] = res.spec.r;
    run.info["l"] = res.spec.l;
    run.info["sigma"] = res.spec.sigma;
    run.output = res.output;
    return run;
  }

  throw ndis::Error(
      "mechanism must be one of rp, rlc, ls, als, rp-rel, ls-rel");
}

int cmd_mechanism(const Config& cfg) {
  if (!cfg.seed) throw ndis::Error("--seed is required for sampling commands");
  MechRun run = run_mechanism(cfg, *cfg.seed);
  json doc = run.info;
  doc["output"] =
      run.output.cols() == 1
          ? vector_json(run.output.col(0))
          : matrix_json(run.output);
  emit(cfg, doc, {}, run.output);
  return 0;
}

int cmd_metrics(const Config& cfg) {
  if (!cfg.seed) throw ndis::Error("--seed is required for sampling commands");
  if (cfg.trials < 1) throw ndis::Error("--trials must be >= 1");
  const ndis::CsvTable table = ndis::load_csv(cfg.input);
  const bool rp_family = cfg.mechanism == "rp" || cfg.mechanism == "rlc" ||
                         cfg.mechanism == "rp-rel";
  const bool ls_family = cfg.mechanism == "ls" || cfg.mechanism == "als" ||
                         cfg.mechanism == "ls-rel";
  if (!rp_family && !ls_family)
    throw ndis::Error(
        "metrics: --mechanism must be rp, rlc, ls, als, rp-rel, or ls-rel");

  ndis::Vector x_opt;
  if (ls_family)
    x_opt = ndis::residuals(ndis::as_regression(table)).x_opt;

  const ndis::RngStream root(*cfg.seed);
  std::vector<double> pdr_trials, dpr_trials, err_trials;
  json info;
  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t trial_seed =
        root.child("trial", static_cast<std::uint64_t>(t)).root_seed();
    MechRun run = run_mechanism(cfg, trial_seed);
    if (t == 0) info = run.info;
    if (rp_family) {
      ndis::Matrix proj = run.output;
      // The mechanisms emit the unscaled projection; metrics compare in the
      // length-preserving 1/sqrt(r) scale unless told otherwise.
      if (!cfg.raw_projection)
        proj /= std::sqrt(static_cast<double>(info["r"].get<int>()));
      pdr_trials.push_back(ndis::pdr(table.values, proj));
      dpr_trials.push_back(ndis::dpr(table.values, proj));
    } else {
      err_trials.push_back(ndis::relative_l2_error(run.output.col(0), x_opt));
    }
  }

  json doc;
  doc["mechanism"] = cfg.mechanism;
  doc["trials"] = cfg.trials;
  doc["seed"] = *cfg.seed;
  doc["calibration"] = info;
  ndis::Matrix csv;
  std::vector<std::string> header;
  if (rp_family) {
    const auto ps = ndis::summarize(pdr_trials);
    const auto ds = ndis::summarize(dpr_trials);
    doc["pdr"] = {{"mean", ps.mean}, {"ci95", ps.halfwidth}};
    doc["dpr"] = {{"mean", ds.mean}, {"ci95", ds.halfwidth}};
    csv.resize(1, 4);
    csv << ps.mean, ps.halfwidth, ds.mean, ds.halfwidth;
    header = {"pdr_mean", "pdr_ci95", "dpr_mean", "dpr_ci95"};
  } else {
    const auto es = ndis::summarize(err_trials);
    doc["error"] = {{"mean", es.mean}, {"ci95", es.halfwidth}};
    csv.resize(1, 2);
    csv << es.mean, es.halfwidth;
    header = {"error_mean", "error_ci95"};
  }
  emit(cfg, doc, header, csv);
  return 0;
}

int cmd_gl(const Config& cfg) {
  const ndis::CsvTable table = ndis::load_csv(cfg.input);
  ndis::Universe u{table.values};
  const int k = cfg.k > 0 ? cfg.k : static_cast<int>(u.dim()) + 1;
  json doc;
  doc["k"] = k;
  doc["m"] = u.size();

  const bool want_exact = cfg.algo == "all" || cfg.algo == "exact";
  const bool want_greedy = cfg.algo == "all" || cfg.algo == "greedy";
  const bool want_bcd = cfg.algo == "all" || cfg.algo == "bcd";

  if (want_exact) {
    try {
      const ndis::ExactGlResult res = ndis::exact_gl(u, k);
      json subset = json::array();
      for (Eigen::Index i : res.subset) subset.push_back(i);
      doc["exact"] = {{"value", res.value},
                      {"record", res.record},
                      {"subset", subset}};
    } catch (const ndis::TooLarge& e) {
      doc["exact"] = {{"skipped", e.what()}};
    }
  }
  if (want_greedy) {
    const ndis::GreedyGlResult res = ndis::greedy_gl(u, k);
    doc["greedy"] = {{"value", res.value}, {"skipped", res.skipped}};
  }
  if (want_bcd) {
    const std::uint64_t seed = cfg.seed.value_or(0);
    doc["bcd"] = {{"value", ndis::bcd_gl(u, k, seed, cfg.max_iters)},
                  {"seed", seed},
                  {"max_iters", cfg.max_iters}};
  }
  emit(cfg, doc, {}, ndis::Matrix());
  return 0;
}

void add_common(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--input", cfg.input, "input CSV file");
  cmd->add_option("--eps", cfg.eps, "privacy parameter epsilon");
  cmd->add_option("--eps-grid", cfg.eps_grid, "epsilon grid a:b:steps");
  cmd->add_option("--delta", cfg.delta, "privacy parameter delta (default 1/n)");
  cmd->add_option("--r", cfg.r, "reduced dimensionality");
  cmd->add_option("--alpha", cfg.alpha, "Monte Carlo accuracy");
  cmd->add_option("--gamma", cfg.gamma, "Monte Carlo failure probability");
  cmd->add_option("--seed", cfg.seed, "root seed for sampling");
  cmd->add_option("--l", cfg.l, "universe row norm bound (default: max row norm)");
  cmd->add_option("--out", cfg.out, "output path (default stdout)");
  cmd->add_option("--format", cfg.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--mechanism", cfg.mechanism, "mechanism or spectrum name");
  cmd->add_option("--trials", cfg.trials, "trial count for metrics");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"indistinguishability spectra and noise-frugal mechanisms"};
  app.require_subcommand(1);
  Config cfg;

  CLI::App* curve = app.add_subcommand("is-curve", "sample a spectrum");
  add_common(curve, cfg);
  curve->add_option("--method", cfg.method, "analytic|mc")
      ->check(CLI::IsMember({"analytic", "mc"}));

  CLI::App* mech = app.add_subcommand("mechanism", "run a calibrated mechanism");
  add_common(mech, cfg);

  CLI::App* metrics = app.add_subcommand("metrics", "utility metrics over trials");
  add_common(metrics, cfg);
  metrics->add_flag("--raw-projection", cfg.raw_projection,
                    "skip the 1/sqrt(r) metric scaling");

  CLI::App* gl = app.add_subcommand("gl", "record-universe leverage search");
  add_common(gl, cfg);
  gl->add_option("--k", cfg.k, "database size (default d+1)");
  gl->add_option("--algo", cfg.algo, "exact|greedy|bcd|all")
      ->check(CLI::IsMember({"exact", "greedy", "bcd", "all"}));
  gl->add_option("--max-iters", cfg.max_iters, "local search iteration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (curve->parsed()) return cmd_is_curve(cfg);
    if (mech->parsed()) return cmd_mechanism(cfg);
    if (metrics->parsed()) return cmd_metrics(cfg);
    if (gl->parsed()) return cmd_gl(cfg);
    return 1;
  } catch (const ndis::NormViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ndis::NotInDomain& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ndis::RankDeficient& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ndis::NotSpd& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ndis::InvalidLeverage& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ndis::Degenerate& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
