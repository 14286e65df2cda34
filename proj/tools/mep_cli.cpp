#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mep/discretize.hpp"
#include "mep/io.hpp"
#include "mep/jd.hpp"
#include "mep/si.hpp"

namespace {

using namespace mep;

struct SolveFlags {
  std::string in_path, method = "jd", out_csv, out_svg;
  std::vector<double> target_point;  // lambda mu eta
  std::optional<double> eta_target;
  double lambda_shift = 0.0;
  int want = 1;
  uint64_t seed = 1;
  int threads = 1;

  // solver knobs (shared names across jd and si)
  int ell = -1, max_dim = -1, arnoldi_r = 0, max_product_dim = 1000;
  int trqi_pre = 1, trqi_post = 3, trqi_steps = 4;
  int max_updates = 300, max_iters = 20, gmres_steps = 10, ritz_m = 100;
  double delta = -1.0, eps = 1e-8, xi1 = 1e-1, xi2 = 1e-4, zeta = 1e-5;
};

std::vector<CsvRow> make_rows(const BvpProblem& bvp,
                              const std::vector<EigenPair>& pairs,
                              const ThreeParamProblem& original) {
  std::vector<CsvRow> rows;
  rows.reserve(pairs.size());
  const bool physical = bvp.app == App::Ellipsoidal || bvp.app == App::Baer ||
                        bvp.app == App::FourPoint;
  for (size_t i = 0; i < pairs.size(); ++i) {
    CsvRow r;
    r.idx = static_cast<int>(i);
    r.value = pairs[i].value;
    r.residual = residual(original, pairs[i].value, pairs[i].right).total;
    if (physical) {
      try {
        r.index = index_triple(bvp, pairs[i].right);
      } catch (const MepError&) {
      }
      const Complex eta = pairs[i].value.eta;
      if (std::abs(eta.imag()) <= 1e-8 * std::max(1.0, std::abs(eta)) &&
          eta.real() >= 0.0) {
        try {
          r.omega = eigenfrequency(bvp, eta.real());
        } catch (const MepError&) {
        }
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_svg(const SolveFlags& f, const std::vector<CsvRow>& rows) {
  if (f.out_svg.empty()) return;
  std::vector<SvgPoint> pts;
  if (f.eta_target) {
    for (const auto& r : rows)
      pts.push_back({double(r.idx), std::abs(r.value.eta - *f.eta_target)});
    save_svg_scatter(pts, "retrieval index", "|eta - eta_tar|", f.out_svg);
  } else {
    for (const auto& r : rows)
      pts.push_back({r.value.lambda.real(), r.value.eta.real()});
    save_svg_scatter(pts, "Re lambda", "Re eta", f.out_svg);
  }
}

int run_solve(const SolveFlags& f) {
  ProblemFile pf = load_problem(f.in_path);
  const ThreeParamProblem& original = pf.bvp.problem;

  std::vector<EigenPair> pairs;
  SolveStats stats;

  if (f.method == "direct") {
    pairs = solve_direct(original);
  } else if (f.method == "jd" && !f.target_point.empty()) {
    JdConfig cfg;
    cfg.target = Target::at_point(f.target_point[0], f.target_point[1],
                                  f.target_point[2]);
    cfg.want = f.want;
    if (f.ell > 0) cfg.ell = f.ell;
    if (f.max_dim > 0) cfg.max_dim = f.max_dim;
    if (f.delta > 0) cfg.delta = f.delta;
    cfg.eps = f.eps;
    cfg.xi1 = f.xi1;
    cfg.xi2 = f.xi2;
    cfg.trqi_steps = f.trqi_steps;
    cfg.max_updates = f.max_updates;
    cfg.correction.gmres_steps = f.gmres_steps;
    SolveResult res = jd_solve(original, cfg, f.seed);
    pairs = std::move(res.pairs);
    stats = res.stats;
  } else {
    if (!f.eta_target)
      throw MepError("solve: plane methods need --eta-target");
    // work on the shifted, A-preconditioned problem; map values back and
    // report residuals on the original matrices
    const Complex eta_tar = *f.eta_target;
    const Complex shift = f.lambda_shift;
    ThreeParamProblem work = precondition_inverse_A(
        shift_substitute(original, eta_tar, shift));

    SolveResult res;
    if (f.method == "jd") {
      JdConfig cfg;
      cfg.target = Target::eta_plane(0.0);
      cfg.want = f.want;
      if (f.ell > 0) cfg.ell = f.ell;
      if (f.max_dim > 0) cfg.max_dim = f.max_dim;
      if (f.delta > 0) cfg.delta = f.delta;
      cfg.eps = f.eps;
      cfg.xi1 = f.xi1;
      cfg.xi2 = f.xi2;
      cfg.trqi_steps = f.trqi_steps;
      cfg.max_updates = f.max_updates;
      cfg.correction.gmres_steps = f.gmres_steps;
      res = jd_solve(work, cfg, f.seed);
    } else if (f.method == "si") {
      SiConfig cfg;
      cfg.eta_tar = 0.0;
      cfg.want = f.want;
      if (f.ell > 0) cfg.ell = f.ell;
      if (f.delta > 0) cfg.delta = f.delta;
      cfg.eps = f.eps;
      cfg.xi1 = f.xi1;
      cfg.xi2 = f.xi2;
      cfg.zeta = f.zeta;
      cfg.arnoldi_r = f.arnoldi_r;
      cfg.max_product_dim = f.max_product_dim;
      cfg.pre_trqi_steps = f.trqi_pre;
      cfg.post_trqi_steps = f.trqi_post;
      cfg.max_iters = f.max_iters;
      cfg.m = f.ritz_m;
      res = si_solve(work, cfg, f.seed);
    } else {
      throw CLI::ValidationError("--method", "unknown method '" + f.method +
                                                 "'");
    }
    pairs = std::move(res.pairs);
    stats = res.stats;
    for (auto& p : pairs) {
      p.value.lambda -= shift;
      p.value.eta += eta_tar;
    }
  }

  std::vector<CsvRow> rows = make_rows(pf.bvp, pairs, original);
  if (!f.out_csv.empty()) save_csv(rows, f.out_csv);
  emit_svg(f, rows);

  std::cout << format_csv(rows);
  std::cerr << "# computed " << pairs.size() << " of " << f.want
            << " wanted; subspace updates " << stats.subspace_updates
            << ", iterations " << stats.outer_iterations << ", restarts "
            << stats.restarts << ", time " << stats.seconds << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setenv("OPENBLAS_NUM_THREADS", "1", 0);  // reproducible by default

  CLI::App app{"3-parameter eigenvalue problem toolkit"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate a problem file");
  gen->require_subcommand(1);
  std::string gen_out = "problem.mep";
  int gen_n = 50;
  uint64_t gen_seed = 1;

  double e_x0 = 1.0, e_y0 = 1.5, e_z0 = 2.0;
  int e_rho = 0, e_sigma = 0, e_tau = 0;
  auto* gell = gen->add_subcommand("ellipsoidal", "ellipsoidal wave problem");
  gell->add_option("--x0", e_x0);
  gell->add_option("--y0", e_y0);
  gell->add_option("--z0", e_z0);
  gell->add_option("--rho", e_rho);
  gell->add_option("--sigma", e_sigma);
  gell->add_option("--tau", e_tau);

  double b_gamma = 0.0, b_beta = 5.0, b_c = 1.0, b_b = 3.0;
  int b_rho = 0, b_sigma = 0;
  auto* gbaer = gen->add_subcommand("baer", "Baer wave problem");
  gbaer->add_option("--gamma", b_gamma);
  gbaer->add_option("--beta", b_beta);
  gbaer->add_option("--c", b_c);
  gbaer->add_option("--b", b_b);
  gbaer->add_option("--rho", b_rho);
  gbaer->add_option("--sigma", b_sigma);

  auto* gfp = gen->add_subcommand("fourpoint", "four-point problem");

  std::string rand_oracle_out;
  auto* grand = gen->add_subcommand("random", "synthetic known-spectrum problem");
  grand->add_option("--oracle-out", rand_oracle_out,
                    "oracle CSV path (default: <out>.oracle.csv)");

  for (auto* sub : {gell, gbaer, gfp, grand}) {
    sub->add_option("--n", gen_n, "collocation points / size");
    sub->add_option("--seed", gen_seed);
    sub->add_option("--out", gen_out, "output problem file");
  }

  // ---- solve ----
  SolveFlags sf;
  auto* solve = app.add_subcommand("solve", "run a solver on a problem file");
  solve->add_option("input", sf.in_path, "problem file")->required();
  solve->add_option("--method", sf.method, "direct | jd | si")
      ->check(CLI::IsMember({"direct", "jd", "si"}));
  solve->add_option("--target", sf.target_point,
                    "point target: lambda mu eta")
      ->expected(3);
  solve->add_option("--eta-target", sf.eta_target, "eta plane target");
  solve->add_option("--lambda-shift", sf.lambda_shift);
  solve->add_option("--want", sf.want);
  solve->add_option("--seed", sf.seed);
  solve->add_option("--out", sf.out_csv, "CSV output path");
  solve->add_option("--svg", sf.out_svg, "SVG scatter output path");
  solve->add_option("--ell", sf.ell);
  solve->add_option("--max-dim", sf.max_dim);
  solve->add_option("--delta", sf.delta);
  solve->add_option("--eps", sf.eps);
  solve->add_option("--xi1", sf.xi1);
  solve->add_option("--xi2", sf.xi2);
  solve->add_option("--zeta", sf.zeta);
  solve->add_option("--arnoldi-r", sf.arnoldi_r);
  solve->add_option("--max-product-dim", sf.max_product_dim);
  solve->add_option("--ritz-m", sf.ritz_m);
  solve->add_option("--trqi-pre", sf.trqi_pre);
  solve->add_option("--trqi-post", sf.trqi_post);
  solve->add_option("--trqi-steps", sf.trqi_steps);
  solve->add_option("--max-updates", sf.max_updates);
  solve->add_option("--max-iters", sf.max_iters);
  solve->add_option("--gmres-steps", sf.gmres_steps);
  solve->add_option("--threads", sf.threads);

  // ---- compare ----
  std::string cmp_result, cmp_oracle;
  double cmp_tol = 1e-8;
  auto* cmp = app.add_subcommand("compare", "match a result CSV to a reference");
  cmp->add_option("result", cmp_result)->required();
  cmp->add_option("reference", cmp_oracle)->required();
  cmp->add_option("--tol", cmp_tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      ProblemFile pf;
      if (gell->parsed()) {
        pf.bvp = gen_ellipsoidal(e_x0, e_y0, e_z0, e_rho, e_sigma, e_tau,
                                 gen_n);
      } else if (gbaer->parsed()) {
        pf.bvp = gen_baer(b_gamma, b_beta, b_c, b_b, b_rho, b_sigma, gen_n);
      } else if (gfp->parsed()) {
        pf.bvp = gen_four_point(gen_n);
      } else {
        RandomDiagProblem rd = gen_random_diag(gen_n, gen_seed);
        pf.bvp = std::move(rd.bvp);
        pf.oracle = rd.oracle;
        const std::string opath =
            rand_oracle_out.empty() ? gen_out + ".oracle.csv" : rand_oracle_out;
        save_csv(oracle_rows(rd.oracle), opath);
      }
      save_problem(pf, gen_out);
      std::cerr << "wrote " << gen_out << "\n";
      return 0;
    }
    if (solve->parsed()) {
      Eigen::setNbThreads(sf.threads);
      setenv("OPENBLAS_NUM_THREADS", std::to_string(sf.threads).c_str(), 1);
      return run_solve(sf);
    }
    if (cmp->parsed()) {
      CompareReport rep =
          compare_spectra(load_csv(cmp_result), load_csv(cmp_oracle), cmp_tol);
      std::cout << "matched " << rep.matched << ", unmatched " << rep.unmatched
                << ", max mismatch " << rep.max_mismatch << "\n";
      for (int idx : rep.unmatched_rows)
        std::cout << "unmatched row idx " << idx << "\n";
      return rep.ok(cmp_tol) ? 0 : 4;
    }
  } catch (const mep::MepError& e) {
    nlohmann::json err{{"error", e.what()}};
    std::cerr << err.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}};
    std::cerr << err.dump() << "\n";
    return 3;
  }
  return 2;
}
