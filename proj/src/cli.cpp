#include "symchi/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "symchi/errors.hpp"
#include "symchi/io.hpp"
#include "symchi/montecarlo.hpp"

namespace symchi {

namespace {

Eigen::VectorXd parse_beta(const std::string& csv) {
  if (csv.empty()) return Eigen::VectorXd();
  std::vector<double> vals;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t pos = csv.find(',', start);
    const std::string tok = csv.substr(start, pos == std::string::npos ? pos : pos - start);
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ParseError("cannot parse coefficient '" + tok + "'");
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

std::vector<double> parse_list(const std::string& csv) {
  const Eigen::VectorXd v = parse_beta(csv);
  return std::vector<double>(v.data(), v.data() + v.size());
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
  out << text;
}

void emit_json(const nlohmann::json& doc, const std::string& out_path) {
  emit_text(doc.dump(2) + "\n", out_path);
}

nlohmann::json spec_echo(const ExperimentSpec& spec) {
  // Everything that determines the result; deliberately excludes the
  // worker count, which must not affect outputs.
  return {{"model", to_json(spec.model)},
          {"contamination",
           {{"gamma", spec.contamination.gamma}, {"pi", to_json(spec.contamination.pi)}}},
          {"n", spec.n},
          {"replications", spec.replications},
          {"estimator", describe(spec.estimator)},
          {"partition", to_json(spec.partition)},
          {"alpha", spec.alpha},
          {"seed", spec.seed}};
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON in config file: ") + e.what());
  }
  return j;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"symmetrized Pearson-type normality test for AR(p) innovations under outliers"};
  app.require_subcommand(1);
  int exit_code = 0;

  // --- simulate --------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "simulate a (possibly contaminated) AR(p) series");
  struct {
    std::string beta, innovation = "normal", pi = "pointmass:0", out;
    double mu = 0.0, theta = 1.0, gamma = 0.0;
    int n = 0;
    std::uint64_t seed = 1;
  } sim_opt;
  sim->add_option("--model-beta", sim_opt.beta, "AR coefficients, comma separated");
  sim->add_option("--mu", sim_opt.mu, "stationary mean");
  sim->add_option("--theta", sim_opt.theta, "normal innovation scale");
  sim->add_option("--innovation", sim_opt.innovation,
                  "innovation law: normal[:scale] | laplace:s | student:df,s | logistic:s");
  sim->add_option("--gamma", sim_opt.gamma, "contamination intensity parameter");
  sim->add_option("--pi", sim_opt.pi, "outlier law, e.g. pointmass:5 | normal:0,3 | cauchy:0,1");
  sim->add_option("--n", sim_opt.n, "sample size")->required();
  sim->add_option("--seed", sim_opt.seed, "RNG seed");
  sim->add_option("--out", sim_opt.out, "output CSV path (stdout when omitted)");
  sim->callback([&]() {
    InnovationLaw law = (sim_opt.innovation == "normal")
                            ? InnovationLaw(NormalInnovation{sim_opt.theta})
                            : parse_innovation_law(sim_opt.innovation);
    const ArModel model(parse_beta(sim_opt.beta), sim_opt.mu, std::move(law));
    const SeriesSample clean = simulate_clean(model, sim_opt.n, substream_key(sim_opt.seed, 0));
    const ContaminationSpec spec{sim_opt.gamma, parse_outlier_law(sim_opt.pi)};
    const SeriesSample y = contaminate(clean, spec, substream_key(sim_opt.seed, 1));
    if (sim_opt.out.empty()) {
      write_series_csv(std::cout, y);
    } else {
      write_series_csv(std::filesystem::path(sim_opt.out), y);
    }
  });

  // --- test ------------------------------------------------------------
  auto* test = app.add_subcommand("test", "run the normality test on a series CSV");
  struct {
    std::string in, estimator = "huber", partition, out, residuals_out;
    int p = 0, m = 6;
    double alpha = 0.05, partition_scale = 0.0;
  } test_opt;
  test->add_option("--in", test_opt.in, "input series CSV")->required();
  test->add_option("--p", test_opt.p, "autoregression order");
  test->add_option("--estimator", test_opt.estimator, "huber[:k] or ls");
  test->add_option("--partition", test_opt.partition,
                   "fixed partition JSON file (array of finite boundaries)");
  test->add_option("--m", test_opt.m, "cell count for the default partition");
  test->add_option("--partition-scale", test_opt.partition_scale,
                   "use the default boundaries at this fixed scale instead of the "
                   "data-driven rescaling");
  test->add_option("--alpha", test_opt.alpha, "nominal level");
  test->add_option("--out", test_opt.out, "output JSON path (stdout when omitted)");
  test->add_option("--residuals-out", test_opt.residuals_out,
                   "CSV path for the fitted residuals (column eps_hat)");
  test->callback([&]() {
    const SeriesSample y = read_series_csv(test_opt.in, test_opt.p);
    const EstimatorChoice estimator = parse_estimator(test_opt.estimator);
    TestReport report;
    if (!test_opt.partition.empty()) {
      report = run_test(y, estimator, read_partition_file(test_opt.partition), test_opt.alpha);
    } else if (test_opt.partition_scale > 0.0) {
      report = run_test(y, estimator,
                        Partition::default_fixed(test_opt.m, test_opt.partition_scale),
                        test_opt.alpha);
    } else {
      report = run_test(y, estimator, AutoPartition{test_opt.m}, test_opt.alpha);
    }
    if (!test_opt.residuals_out.empty()) {
      write_residuals_csv(test_opt.residuals_out, fit_residuals(y, estimator));
    }
    emit_json(to_json(report), test_opt.out);
    exit_code = report.reject ? 2 : 0;
  });

  // --- theory ----------------------------------------------------------
  auto* theory = app.add_subcommand(
      "theory", "limiting noncentrality and level for a contamination scheme");
  struct {
    std::string beta, pi, partition, curve, out;
    double gamma = 0.0, theta = 1.0, alpha = 0.05, partition_scale = 1.0;
    int m = 6;
  } th_opt;
  theory->add_option("--gamma", th_opt.gamma, "contamination intensity parameter");
  theory->add_option("--model-beta", th_opt.beta, "true AR coefficients, comma separated");
  theory->add_option("--theta", th_opt.theta, "true innovation scale");
  theory->add_option("--pi", th_opt.pi, "outlier law")->required();
  theory->add_option("--partition", th_opt.partition, "fixed partition JSON file");
  theory->add_option("--m", th_opt.m, "cell count for the default partition");
  theory->add_option("--partition-scale", th_opt.partition_scale,
                     "scale of the default partition boundaries");
  theory->add_option("--alpha", th_opt.alpha, "nominal level");
  theory->add_option("--curve", th_opt.curve,
                     "emit CSV rows gamma,level for this comma-separated gamma list");
  theory->add_option("--out", th_opt.out, "output path (stdout when omitted)");
  theory->callback([&]() {
    const Partition part = !th_opt.partition.empty()
                               ? read_partition_file(th_opt.partition)
                               : Partition::default_fixed(th_opt.m, th_opt.partition_scale);
    const ShiftContext ctx{parse_beta(th_opt.beta), th_opt.theta,
                           parse_outlier_law(th_opt.pi)};
    if (!th_opt.curve.empty()) {
      std::string csv = "gamma,level\n";
      for (double g : parse_list(th_opt.curve)) {
        csv += format_double(g) + "," +
               format_double(asymptotic_level(g, th_opt.alpha, part, ctx)) + "\n";
      }
      emit_text(csv, th_opt.out);
      return;
    }
    const NoncentralitySpec spec = noncentrality_spec(th_opt.gamma, part, ctx);
    emit_json(
        {{"gamma", th_opt.gamma},
         {"lambda2", spec.lambda2},
         {"asymptotic_level", asymptotic_level(th_opt.gamma, th_opt.alpha, part, ctx)},
         {"delta", std::vector<double>(spec.delta.data(), spec.delta.data() + spec.delta.size())},
         {"partition", to_json(part)}},
        th_opt.out);
  });

  // --- mc-level --------------------------------------------------------
  auto* mc = app.add_subcommand("mc-level", "replicated level experiment from a JSON config");
  struct {
    std::string config, out, samples_out;
    int threads = -1, reps = 0;
  } mc_opt;
  mc->add_option("config", mc_opt.config, "experiment config JSON")->required();
  mc->add_option("--out", mc_opt.out, "output JSON path (stdout when omitted)");
  mc->add_option("--samples-out", mc_opt.samples_out, "CSV path for the statistic samples");
  mc->add_option("--threads", mc_opt.threads, "worker count override (0 = hardware)");
  mc->add_option("--reps", mc_opt.reps, "replication count override");
  mc->callback([&]() {
    ExperimentSpec spec = experiment_spec_from_json(load_json_file(mc_opt.config));
    if (mc_opt.threads >= 0) spec.threads = mc_opt.threads;
    if (mc_opt.reps > 0) spec.replications = mc_opt.reps;
    const ExperimentResult result = run_level_experiment(spec);
    nlohmann::json doc = to_json(result);
    doc["config"] = spec_echo(spec);
    emit_json(doc, mc_opt.out);
    if (!mc_opt.samples_out.empty()) write_statistics_csv(mc_opt.samples_out, result.statistic_samples);
  });

  // --- expansion-check -------------------------------------------------
  auto* exp = app.add_subcommand(
      "expansion-check", "Monte Carlo check of the symmetrized e.d.f. drift on a grid");
  struct {
    std::string config, grid, out, csv_out;
    int threads = -1, reps = 0;
  } exp_opt;
  exp->add_option("config", exp_opt.config, "experiment config JSON")->required();
  exp->add_option("--grid", exp_opt.grid, "evaluation points, comma separated");
  exp->add_option("--out", exp_opt.out, "output JSON path (stdout when omitted)");
  exp->add_option("--csv-out", exp_opt.csv_out, "CSV path for the drift table");
  exp->add_option("--threads", exp_opt.threads, "worker count override (0 = hardware)");
  exp->add_option("--reps", exp_opt.reps, "replication count override");
  exp->callback([&]() {
    const nlohmann::json cfg = load_json_file(exp_opt.config);
    ExperimentSpec spec = experiment_spec_from_json(cfg);
    if (exp_opt.threads >= 0) spec.threads = exp_opt.threads;
    if (exp_opt.reps > 0) spec.replications = exp_opt.reps;
    std::vector<double> grid;
    if (!exp_opt.grid.empty()) {
      grid = parse_list(exp_opt.grid);
    } else if (cfg.contains("x_grid")) {
      grid = cfg["x_grid"].get<std::vector<double>>();
    } else {
      throw ParseError("expansion-check needs --grid or an 'x_grid' config entry");
    }
    const ExpansionResult result = run_expansion_check(spec, grid);
    nlohmann::json doc = to_json(result);
    doc["config"] = spec_echo(spec);
    emit_json(doc, exp_opt.out);
    if (!exp_opt.csv_out.empty()) write_expansion_csv(exp_opt.csv_out, result);
  });

  // --- robustness-sweep ------------------------------------------------
  auto* sweep = app.add_subcommand(
      "robustness-sweep", "limiting level over a (gamma, Pi) grid, optionally with experiments");
  struct {
    std::string config, out, csv_out;
    int threads = -1, reps = 0;
  } sw_opt;
  sweep->add_option("config", sw_opt.config, "sweep config JSON")->required();
  sweep->add_option("--out", sw_opt.out, "output JSON path (stdout when omitted)");
  sweep->add_option("--csv-out", sw_opt.csv_out, "CSV path for the sweep table");
  sweep->add_option("--threads", sw_opt.threads, "worker count override (0 = hardware)");
  sweep->add_option("--reps", sw_opt.reps, "replication count override");
  sweep->callback([&]() {
    const nlohmann::json cfg = load_json_file(sw_opt.config);
    ExperimentSpec base = experiment_spec_from_json(cfg);
    if (sw_opt.threads >= 0) base.threads = sw_opt.threads;
    if (sw_opt.reps > 0) base.replications = sw_opt.reps;
    std::vector<double> gammas = cfg.value("gammas", std::vector<double>{1.0, 0.5, 0.25, 0.1});
    std::vector<OutlierLaw> pis;
    if (cfg.contains("pis")) {
      for (const auto& pj : cfg["pis"]) pis.push_back(outlier_law_from_json(pj));
    } else {
      for (double c : {1.0, 3.0, 10.0, 100.0}) pis.push_back(PointMassOutlier{c});
      pis.push_back(CauchyOutlier{0.0, 1.0});
      pis.push_back(NormalOutlier{0.0, 9.0});
    }
    const bool empirical = cfg.value("empirical", false);
    const SweepResult result = robustness_sweep(base, gammas, pis, empirical);
    nlohmann::json doc = to_json(result);
    doc["config"] = spec_echo(base);
    emit_json(doc, sw_opt.out);
    if (!sw_opt.csv_out.empty()) write_sweep_csv(sw_opt.csv_out, result);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}

}  // namespace symchi
