#include "rsb/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "rsb/errors.hpp"
#include "rsb/glm.hpp"
#include "rsb/io.hpp"
#include "rsb/scenarios.hpp"
#include "rsb/simulation.hpp"
#include "rsb/spatial.hpp"
#include "rsb/trend.hpp"

namespace rsb {
namespace {

struct ChainArgs {
  std::size_t iterations = 1500, burnin = 500, thin = 1;
  std::uint64_t seed = 1;

  void add(CLI::App* app) {
    app->add_option("--iterations", iterations, "Retained draws after burn-in");
    app->add_option("--burnin", burnin);
    app->add_option("--thin", thin);
    app->add_option("--seed", seed);
  }
  ChainConfig config() const {
    ChainConfig c;
    c.iterations = iterations;
    c.burnin = burnin;
    c.thin = thin;
    c.seed = seed;
    return c;
  }
};

struct MixtureArgs {
  std::string error = "mixture";
  double a = 0.5, b = 0.5, a_s = 1.0, b_s = 1.0, delta = kDefaultDelta;

  void add(CLI::App* app) {
    app->add_option("--error", error, "mixture, unit or rsb")->check(CLI::IsMember({"mixture", "unit", "rsb"}));
    app->add_option("--a", a);
    app->add_option("--b", b);
    app->add_option("--a-s,--a_s", a_s);
    app->add_option("--b-s,--b_s", b_s);
    app->add_option("--delta", delta, "Negative binomial size used by the augmentation");
  }
  ErrorModel model() const {
    if (error == "unit") return ErrorModel::Unit;
    if (error == "rsb") return ErrorModel::PureRsb;
    return ErrorModel::Mixture;
  }
  MixtureHyper hyper() const {
    MixtureHyper h;
    h.a_s = a_s;
    h.b_s = b_s;
    h.rsb = RsbParams{a, b, 0.0};
    return h;
  }
};

struct OutputArgs {
  std::string draws = "draws.csv", summary = "summary.txt";

  void add(CLI::App* app) {
    app->add_option("--draws", draws, "Draws CSV path");
    app->add_option("--summary", summary, "Summary path");
  }
  void write(const PosteriorDraws& d) const {
    write_draws_csv(draws, d);
    write_summary(summary, d);
  }
};

// Config entries become "--key=value" arguments placed right after the
// subcommand, so anything given on the command line wins. Keys that the
// chosen subcommand does not take are skipped; keys no subcommand takes are errors.
std::vector<std::string> expand_config(int argc, char** argv, const CLI::App& app) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  const CLI::App* sub = nullptr;
  std::size_t at = 1;
  for (; at < args.size(); ++at) {
    if (args[at].rfind("-", 0) == 0) continue;
    for (const CLI::App* c : app.get_subcommands({}))
      if (c->get_name() == args[at]) sub = c;
    break;
  }
  if (!sub) throw ConfigError("--config needs a subcommand");
  std::vector<std::string> extra;
  for (const auto& [k, v] : read_config_file(path)) {
    bool anywhere = false;
    for (const CLI::App* c : app.get_subcommands({})) anywhere = anywhere || c->get_option_no_throw("--" + k);
    if (!anywhere) throw ConfigError("unknown config key '" + k + "'");
    if (sub->get_option_no_throw("--" + k)) extra.push_back("--" + k + "=" + v);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at + 1), extra.begin(), extra.end());
  return args;
}

void print_line(const char* label, double v) { std::printf("%s %s\n", label, format_double(v).c_str()); }

}  // namespace

int cli_run(int argc, char** argv) {
  CLI::App app{"Robust Bayesian count regression with RSB mixtures"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", "rsbcount 1.0");
  app.add_option("--config", "key = value file applied before the other flags");

  ChainArgs chain;
  MixtureArgs mix;
  OutputArgs out;
  std::string data_path;

  auto* glm = app.add_subcommand("fit-glm", "Poisson log-linear model with multiplicative RSB-mixture error");
  std::string path = "auto";
  double prior_var = 100.0;
  bool no_intercept = false;
  glm->add_option("--data", data_path, "CSV with y, x1..xp, optional offset")->required();
  glm->add_option("--path", path, "auto, mh or pg")->check(CLI::IsMember({"auto", "mh", "pg"}));
  glm->add_option("--prior-var,--prior_var_beta", prior_var);
  glm->add_flag("--no-intercept", no_intercept);
  chain.add(glm);
  mix.add(glm);
  out.add(glm);

  auto* trend = app.add_subcommand("fit-trend", "Horseshoe trend filter for a count series");
  int order = 2;
  std::string solver = "banded";
  trend->add_option("--data", data_path, "CSV with a y column")->required();
  trend->add_option("--k", order, "Difference order");
  trend->add_option("--solver", solver)->check(CLI::IsMember({"banded", "dense"}));
  chain.add(trend);
  mix.add(trend);
  out.add(trend);

  auto* spatial = app.add_subcommand("fit-spatial", "Predictive-process spatial count model");
  Eigen::Index knots = 100;
  double a_tau = 1.0, b_tau = 1.0, h_lo = 0.0, h_hi = 0.0;
  spatial->add_option("--data", data_path, "CSV with y, x1..xp, optional offset, lon, lat")->required();
  spatial->add_option("--knots,--M", knots);
  spatial->add_option("--a-tau", a_tau);
  spatial->add_option("--b-tau", b_tau);
  spatial->add_option("--h-lo,--h_lo", h_lo, "0 selects the default range");
  spatial->add_option("--h-hi,--h_hi", h_hi);
  spatial->add_option("--prior-var,--prior_var_beta", prior_var);
  chain.add(spatial);
  mix.add(spatial);
  out.add(spatial);

  auto* sim = app.add_subcommand("simulate", "Write a simulated dataset");
  std::string kind = "glm", sim_out;
  int scenario = 1;
  double y_o = 20.0;
  bool structured = false, clean = false;
  Eigen::Index n = 0;
  std::uint64_t seed = 1;
  sim->add_option("--kind", kind)->check(CLI::IsMember({"glm", "trend", "spatial"}));
  sim->add_option("--scenario", scenario);
  sim->add_option("--yo", y_o, "Outlier shift");
  sim->add_flag("--structured", structured, "Covariate-dependent zero inflation");
  sim->add_flag("--clean", clean, "Skip contamination");
  sim->add_option("--n", n, "0 selects the scenario default");
  sim->add_option("--seed", seed);
  sim->add_option("--out", sim_out)->required();

  auto* theory = app.add_subcommand("verify-theory", "Zero-count origin table and large-outlier sweep");
  double s = 0.1, a = 0.5, a_alt = 2.0, b = 0.5;
  bool sweep = false;
  theory->add_option("--s", s);
  theory->add_option("--a", a);
  theory->add_option("--a-alt", a_alt);
  theory->add_option("--b", b);
  theory->add_flag("--sweep", sweep, "Also run the intercept-model outlier sweep");

  auto* metrics = app.add_subcommand("metrics", "Replication study summaries");
  std::string study = "glm";
  std::size_t reps = 100;
  unsigned workers = 0;
  Eigen::Index m_knots = 25;
  metrics->add_option("--study", study)->check(CLI::IsMember({"glm", "trend", "spatial"}));
  metrics->add_option("--scenario", scenario);
  metrics->add_option("--yo", y_o);
  metrics->add_flag("--structured", structured);
  metrics->add_option("--replications", reps);
  metrics->add_option("--workers", workers);
  metrics->add_option("--n", n);
  metrics->add_option("--knots,--M", m_knots);
  chain.add(metrics);

  try {
    std::vector<std::string> args = expand_config(argc, argv, app);
    std::vector<char*> cargs;
    for (auto& a_ : args) cargs.push_back(a_.data());
    try {
      app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e);
      return rc == 0 ? 0 : 2;
    }

    if (glm->parsed()) {
      const CountDataset data = read_count_csv(data_path);
      GlmConfig c;
      c.chain = chain.config();
      c.mixture = mix.hyper();
      c.error = mix.model();
      c.delta = mix.delta;
      c.prior.variance = prior_var;
      c.intercept = !no_intercept;
      c.path = path == "mh" ? BetaPath::IndependentMH : path == "pg" ? BetaPath::PgAugmented : BetaPath::Auto;
      RngStream rng(chain.seed);
      out.write(fit_glm_rsb(data, c, rng));
    } else if (trend->parsed()) {
      const CountDataset data = read_count_csv(data_path);
      TrendConfig c;
      c.chain = chain.config();
      c.mixture = mix.hyper();
      c.error = mix.model();
      c.delta = mix.delta;
      c.k = order;
      c.path = solver == "dense" ? SolverPath::Dense : SolverPath::Banded;
      RngStream rng(chain.seed);
      out.write(fit_trend(data.y, c, rng));
    } else if (spatial->parsed()) {
      const CountDataset data = read_count_csv(data_path);
      SpatialConfig c;
      c.chain = chain.config();
      c.mixture = mix.hyper();
      c.error = mix.model();
      c.delta = mix.delta;
      c.M = knots;
      c.priors.a_tau = a_tau;
      c.priors.b_tau = b_tau;
      c.priors.h_lo = h_lo;
      c.priors.h_hi = h_hi;
      c.priors.beta.variance = prior_var;
      RngStream rng(chain.seed);
      const PosteriorDraws d = fit_spatial(data, c, rng);
      out.write(d);
      print_line("dic", spatial_dic(d, data));
    } else if (sim->parsed()) {
      if (kind == "glm") {
        GlmScenario sc = glm_scenario(scenario, y_o, seed, structured);
        if (n > 0) sc.n = n;
        if (clean) sc.omega1 = sc.omega2 = 0.0;
        write_count_csv(sim_out, gen_glm_scenario(sc).data);
      } else if (kind == "trend") {
        RngStream rng(seed, 0x7472);
        CountDataset d;
        d.y = gen_trend_scenario(scenario, n > 0 ? n : 100, rng, !clean).y;
        write_count_csv(sim_out, d);
      } else {
        const SpatialSimulated ss = gen_spatial_synthetic(n > 0 ? n : 400, seed);
        write_count_csv(sim_out, clean ? ss.clean : ss.data);
      }
    } else if (theory->parsed()) {
      const OriginTable t = origin_probability_table(s, a, a_alt, b);
      std::printf("lambda P(eta<0.01|y=0)\n");
      bool monotone = true;
      for (std::size_t i = 0; i < t.lambdas.size(); ++i) {
        std::printf("%s %s\n", format_double(t.lambdas[i]).c_str(), format_double(t.probabilities[i]).c_str());
        if (i > 0 && t.probabilities[i] < t.probabilities[i - 1]) monotone = false;
      }
      std::printf("nondecreasing %s\n", monotone ? "yes" : "no");
      std::printf("eps ratio(a=%s/a=%s)\n", format_double(a).c_str(), format_double(a_alt).c_str());
      for (std::size_t i = 0; i < t.eps.size(); ++i)
        std::printf("%s %s\n", format_double(t.eps[i]).c_str(), format_double(t.ratios[i]).c_str());
      if (sweep) {
        // nine clean counts; the swept outlier is the tenth observation
        Eigen::VectorXd base(9);
        base << 1, 2, 1, 2, 1, 3, 1, 2, 1;
        const OutlierSweep os = outlier_sweep(base, {1e2, 1e4, 1e6}, s);
        std::printf("outlier dist_clean(delta=0) dist_clean(delta=1) dist_tilted(delta=1)\n");
        for (std::size_t i = 0; i < os.magnitudes.size(); ++i)
          std::printf("%s %s %s %s\n", format_double(os.magnitudes[i]).c_str(),
                      format_double(os.dist_clean_rsb[i]).c_str(), format_double(os.dist_clean_tail[i]).c_str(),
                      format_double(os.dist_tilted_tail[i]).c_str());
      }
    } else if (metrics->parsed()) {
      if (study == "glm") {
        ReplicationConfig rc;
        rc.scenario = scenario;
        rc.y_o = y_o;
        rc.structured = structured;
        rc.replications = reps;
        rc.seed = chain.seed;
        rc.chain = chain.config();
        rc.workers = workers;
        const auto recs = run_glm_replications(rc);
        std::vector<double> mr, mp, mg, ir, ip, ig;
        double det = 0.0;
        for (const auto& r : recs) {
          mr.push_back(r.rsb.mse);
          mp.push_back(r.pr.mse);
          mg.push_back(r.pg.mse);
          ir.push_back(r.rsb.interval_score);
          ip.push_back(r.pr.interval_score);
          ig.push_back(r.pg.interval_score);
          det += r.outlier_detection / static_cast<double>(recs.size());
        }
        const auto m1 = paired_comparison(mr, mp), m2 = paired_comparison(mr, mg);
        const auto i1 = paired_comparison(ir, ip), i2 = paired_comparison(ir, ig);
        print_line("mse.rsb", m1.mean_a);
        print_line("mse.pr", m1.mean_b);
        print_line("mse.pg", m2.mean_b);
        print_line("mse.rsb_minus_pr.se", m1.diff_se);
        print_line("is.rsb", i1.mean_a);
        print_line("is.pr", i1.mean_b);
        print_line("is.pg", i2.mean_b);
        print_line("is.rsb_minus_pr.se", i1.diff_se);
        print_line("outlier_detection", det);
      } else if (study == "trend") {
        std::vector<TrendComparison> res(reps);
        parallel_for(reps, workers, [&](std::size_t r) {
          res[r] = compare_trend(scenario, n > 0 ? n : 100, chain.seed + r, chain.config());
        });
        std::size_t wins = 0;
        for (const auto& r : res) wins += r.rmse_rsb < r.rmse_unit;
        std::printf("rsb_better %zu of %zu\n", wins, reps);
      } else {
        std::vector<SpatialComparison> res(reps);
        parallel_for(reps, workers, [&](std::size_t r) {
          res[r] = compare_spatial(chain.seed + r, n > 0 ? n : 400, m_knots, chain.config());
        });
        std::size_t dic_wins = 0, dist_wins = 0;
        for (const auto& r : res) {
          dic_wins += r.dic_rsb < r.dic_unit;
          dist_wins += r.dist_rsb < r.dist_unit;
        }
        std::printf("dic_rsb_better %zu of %zu\n", dic_wins, reps);
        std::printf("xi_rsb_closer %zu of %zu\n", dist_wins, reps);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace rsb
