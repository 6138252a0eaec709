#include "symchi/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "symchi/errors.hpp"

namespace symchi {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r\n");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t\r\n");
  return s.substr(from, to - from + 1);
}

double parse_double(const std::string& token, long line) {
  const std::string t = trim(token);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError("expected a number, got '" + t + "'", line);
  }
  return value;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

double get_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  if (!j[key].is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// --- series CSV ------------------------------------------------------------

void write_series_csv(std::ostream& out, const SeriesSample& sample) {
  const int p = sample.order();
  const int n = sample.n();
  const bool latent = sample.has_latent();
  out << (latent ? "t,y,v,z,xi\n" : "t,y\n");
  for (int i = 0; i < n + p; ++i) {
    const int t = i + 1 - p;
    out << t << ',' << format_double(sample.observed()[i]);
    if (latent) {
      out << ',' << format_double(sample.latent_v()[i]) << ',' << sample.latent_z()[i] << ','
          << format_double(sample.latent_xi()[i]);
    }
    out << '\n';
  }
}

void write_series_csv(const std::filesystem::path& path, const SeriesSample& sample) {
  std::ofstream out = open_out(path);
  write_series_csv(out, sample);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

SeriesSample read_series_csv(const std::filesystem::path& path, int order) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open series file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty series file", 1);
  const std::vector<std::string> header = split(trim(line), ',');
  int col_y = -1, col_v = -1, col_z = -1, col_xi = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    if (name == "y") col_y = static_cast<int>(c);
    if (name == "v") col_v = static_cast<int>(c);
    if (name == "z") col_z = static_cast<int>(c);
    if (name == "xi") col_xi = static_cast<int>(c);
  }
  if (col_y < 0) throw ParseError("header must contain a 'y' column", 1);
  const bool latent = col_v >= 0 && col_z >= 0 && col_xi >= 0;
  if ((col_v >= 0 || col_z >= 0 || col_xi >= 0) && !latent) {
    throw ParseError("latent columns v,z,xi must appear together", 1);
  }

  std::vector<double> y, v, xi;
  std::vector<int> z;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const std::vector<std::string> cells = split(trimmed, ',');
    if (cells.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " columns, got " +
                           std::to_string(cells.size()),
                       lineno);
    }
    y.push_back(parse_double(cells[col_y], lineno));
    if (latent) {
      v.push_back(parse_double(cells[col_v], lineno));
      const double zval = parse_double(cells[col_z], lineno);
      if (zval != 0.0 && zval != 1.0) throw ParseError("z must be 0 or 1", lineno);
      z.push_back(static_cast<int>(zval));
      xi.push_back(parse_double(cells[col_xi], lineno));
    }
  }
  if (static_cast<int>(y.size()) < order + 1) {
    throw ParseError("series holds " + std::to_string(y.size()) + " rows; needs at least p+1 = " +
                     std::to_string(order + 1));
  }

  Eigen::VectorXd yv = Eigen::Map<Eigen::VectorXd>(y.data(), y.size());
  if (!latent) return SeriesSample(order, std::move(yv));
  Eigen::VectorXd vv = Eigen::Map<Eigen::VectorXd>(v.data(), v.size());
  Eigen::VectorXi zv = Eigen::Map<Eigen::VectorXi>(z.data(), z.size());
  Eigen::VectorXd xiv = Eigen::Map<Eigen::VectorXd>(xi.data(), xi.size());
  return SeriesSample(order, std::move(yv), std::move(vv), std::move(zv), std::move(xiv),
                      Eigen::VectorXd());
}

void write_residuals_csv(const std::filesystem::path& path, const ResidualSet& res) {
  std::ofstream out = open_out(path);
  out << "eps_hat\n";
  for (int i = 0; i < res.residuals.size(); ++i) out << format_double(res.residuals[i]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// --- partitions ------------------------------------------------------------

nlohmann::json to_json(const Partition& part) { return nlohmann::json(part.interior()); }

Partition partition_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("partition must be a JSON array of finite boundaries");
  std::vector<double> interior;
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError("partition boundaries must be numbers");
    interior.push_back(v.get<double>());
  }
  try {
    return Partition(std::move(interior));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid partition: ") + e.what());
  }
}

Partition read_partition_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open partition file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON in partition file: ") + e.what());
  }
  return partition_from_json(j);
}

// --- laws ------------------------------------------------------------------

nlohmann::json to_json(const OutlierLaw& law) {
  return std::visit(
      [](const auto& l) -> nlohmann::json {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, PointMassOutlier>) {
          return {{"type", "pointmass"}, {"c", l.c}};
        } else if constexpr (std::is_same_v<T, NormalOutlier>) {
          return {{"type", "normal"}, {"mean", l.mean}, {"scale", l.scale}};
        } else if constexpr (std::is_same_v<T, CauchyOutlier>) {
          return {{"type", "cauchy"}, {"location", l.location}, {"scale", l.scale}};
        } else if constexpr (std::is_same_v<T, UniformOutlier>) {
          return {{"type", "uniform"}, {"a", l.a}, {"b", l.b}};
        } else {
          return {{"type", "discrete"}, {"atoms", l.atoms}, {"probs", l.probs}};
        }
      },
      law);
}

OutlierLaw outlier_law_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type")) throw ParseError("outlier law needs a 'type'");
  const std::string type = j["type"].get<std::string>();
  OutlierLaw law;
  if (type == "pointmass") {
    law = PointMassOutlier{get_number(j, "c")};
  } else if (type == "normal") {
    law = NormalOutlier{get_number(j, "mean"), get_number(j, "scale")};
  } else if (type == "cauchy") {
    law = CauchyOutlier{get_number(j, "location"), get_number(j, "scale")};
  } else if (type == "uniform") {
    law = UniformOutlier{get_number(j, "a"), get_number(j, "b")};
  } else if (type == "discrete") {
    DiscreteOutlier d;
    d.atoms = j.value("atoms", std::vector<double>{});
    d.probs = j.value("probs", std::vector<double>{});
    law = std::move(d);
  } else {
    throw ParseError("unknown outlier law type '" + type + "'");
  }
  validate(law);
  return law;
}

OutlierLaw parse_outlier_law(const std::string& text) {
  const std::size_t colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    for (const std::string& tok : split(text.substr(colon + 1), ',')) {
      args.push_back(parse_double(tok, 0));
    }
  }
  OutlierLaw law;
  if (name == "pointmass" && args.size() == 1) {
    law = PointMassOutlier{args[0]};
  } else if (name == "normal" && args.size() == 2) {
    law = NormalOutlier{args[0], args[1]};
  } else if (name == "cauchy" && args.size() == 2) {
    law = CauchyOutlier{args[0], args[1]};
  } else if (name == "uniform" && args.size() == 2) {
    law = UniformOutlier{args[0], args[1]};
  } else if (name == "discrete" && args.size() >= 2 && args.size() % 2 == 0) {
    DiscreteOutlier d;
    for (std::size_t i = 0; i < args.size(); i += 2) {
      d.atoms.push_back(args[i]);
      d.probs.push_back(args[i + 1]);
    }
    law = std::move(d);
  } else {
    throw ParseError("cannot parse outlier law '" + text +
                     "'; expected pointmass:c | normal:mean,scale | cauchy:loc,scale | "
                     "uniform:a,b | discrete:a1,p1,a2,p2,...");
  }
  validate(law);
  return law;
}

nlohmann::json to_json(const InnovationLaw& law) {
  return std::visit(
      [](const auto& l) -> nlohmann::json {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, NormalInnovation>) {
          return {{"type", "normal"}, {"scale", l.scale}};
        } else if constexpr (std::is_same_v<T, LaplaceInnovation>) {
          return {{"type", "laplace"}, {"scale", l.scale}};
        } else if constexpr (std::is_same_v<T, StudentTInnovation>) {
          return {{"type", "student"}, {"df", l.df}, {"scale", l.scale}};
        } else {
          return {{"type", "logistic"}, {"scale", l.scale}};
        }
      },
      law);
}

InnovationLaw innovation_law_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type")) throw ParseError("innovation law needs a 'type'");
  const std::string type = j["type"].get<std::string>();
  InnovationLaw law;
  if (type == "normal") {
    law = NormalInnovation{get_number(j, "scale")};
  } else if (type == "laplace") {
    law = LaplaceInnovation{get_number(j, "scale")};
  } else if (type == "student") {
    law = StudentTInnovation{get_number(j, "df"), get_number(j, "scale")};
  } else if (type == "logistic") {
    law = LogisticInnovation{get_number(j, "scale")};
  } else {
    throw ParseError("unknown innovation law type '" + type + "'");
  }
  validate(law);
  return law;
}

InnovationLaw parse_innovation_law(const std::string& text) {
  const std::size_t colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    for (const std::string& tok : split(text.substr(colon + 1), ',')) {
      args.push_back(parse_double(tok, 0));
    }
  }
  InnovationLaw law;
  if (name == "normal" && args.size() <= 1) {
    law = NormalInnovation{args.empty() ? 1.0 : args[0]};
  } else if (name == "laplace" && args.size() == 1) {
    law = LaplaceInnovation{args[0]};
  } else if (name == "student" && args.size() == 2) {
    law = StudentTInnovation{args[0], args[1]};
  } else if (name == "logistic" && args.size() == 1) {
    law = LogisticInnovation{args[0]};
  } else {
    throw ParseError("cannot parse innovation law '" + text +
                     "'; expected normal[:scale] | laplace:scale | student:df,scale | "
                     "logistic:scale");
  }
  validate(law);
  return law;
}

EstimatorChoice parse_estimator(const std::string& text) {
  if (text == "ls" || text == "least-squares") return LeastSquares{};
  if (text == "huber") return HuberM{};
  if (text.rfind("huber:", 0) == 0) {
    return HuberM{parse_double(text.substr(6), 0)};
  }
  throw ParseError("unknown estimator '" + text + "'; expected huber[:k] or ls");
}

// --- reports ---------------------------------------------------------------

nlohmann::json to_json(const TestReport& report) {
  std::vector<long long> nu(report.nu.nu.size());
  for (int j = 0; j < report.nu.nu.size(); ++j) {
    nu[j] = static_cast<long long>(std::llround(report.nu.nu[j]));
  }
  return {{"theta_hat", report.theta_hat},
          {"nu", nu},
          {"n", report.nu.n},
          {"statistic", report.statistic},
          {"df", report.df},
          {"critical_value", report.critical_value},
          {"alpha", report.alpha},
          {"reject", report.reject},
          {"p_value", report.p_value},
          {"estimator", report.estimator},
          {"partition", report.partition_interior},
          {"warnings", report.warnings}};
}

nlohmann::json to_json(const ArModel& model) {
  return {{"beta", std::vector<double>(model.beta().data(), model.beta().data() + model.order())},
          {"mu", model.mu()},
          {"innovation", to_json(model.innovation())}};
}

ArModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("model must be a JSON object");
  std::vector<double> beta = j.value("beta", std::vector<double>{});
  const double mu = j.contains("mu") ? get_number(j, "mu") : 0.0;
  InnovationLaw law = j.contains("innovation") ? innovation_law_from_json(j["innovation"])
                                               : InnovationLaw(NormalInnovation{1.0});
  try {
    return ArModel(Eigen::Map<Eigen::VectorXd>(beta.data(), beta.size()), mu, std::move(law));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid model: ") + e.what());
  }
}

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("experiment config must be a JSON object");
  if (!j.contains("model")) throw ParseError("experiment config needs a 'model'");

  ArModel model = model_from_json(j["model"]);

  ContaminationSpec contamination;
  if (j.contains("contamination")) {
    const auto& c = j["contamination"];
    contamination.gamma = c.contains("gamma") ? get_number(c, "gamma") : 0.0;
    if (c.contains("pi")) contamination.pi = outlier_law_from_json(c["pi"]);
  }

  Partition partition = Partition::default_fixed();
  if (j.contains("partition")) {
    const auto& p = j["partition"];
    if (p.is_array()) {
      partition = partition_from_json(p);
    } else if (p.is_object()) {
      const int m = p.value("m", 6);
      const double scale = p.value("scale", 1.0);
      partition = Partition::default_fixed(m, scale);
    } else if (!(p.is_string() && p.get<std::string>() == "default")) {
      throw ParseError("partition must be an array, an {m, scale} object, or \"default\"");
    }
  }

  EstimatorChoice estimator = HuberM{};
  if (j.contains("estimator")) {
    const auto& e = j["estimator"];
    if (e.is_string()) {
      estimator = parse_estimator(e.get<std::string>());
    } else if (e.is_object()) {
      const std::string type = e.value("type", "huber");
      estimator = (type == "ls") ? EstimatorChoice(LeastSquares{})
                                 : EstimatorChoice(HuberM{e.value("k", 1.345)});
    }
  }

  ExperimentSpec spec{std::move(model),
                      std::move(contamination),
                      static_cast<int>(get_number(j, "n")),
                      static_cast<int>(get_number(j, "replications")),
                      estimator,
                      std::move(partition),
                      j.contains("alpha") ? get_number(j, "alpha") : 0.05,
                      j.contains("seed") ? j["seed"].get<std::uint64_t>() : 1ull,
                      j.contains("threads") ? j["threads"].get<int>() : 0};
  validate(spec);
  return spec;
}

ExperimentSpec read_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON in config file: ") + e.what());
  }
  return experiment_spec_from_json(j);
}

nlohmann::json to_json(const ExperimentResult& result) {
  return {{"rejection_rate", result.rejection_rate},
          {"rejection_se", result.rejection_se},
          {"statistics", result.statistic_samples},
          {"ks_distance_to_reference", result.ks_distance_to_reference},
          {"theory_level", result.theory_level},
          {"theory_lambda2", result.theory_lambda2},
          {"failures", result.failures},
          {"replications", result.replications},
          {"unreliable", result.unreliable}};
}

nlohmann::json to_json(const ExpansionResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ExpansionRow& row : result.rows) {
    rows.push_back({{"x", row.x},
                    {"mean_drift", row.mean_drift},
                    {"se", row.se},
                    {"theory_drift", row.theory_drift}});
  }
  return {{"rows", rows}, {"failures", result.failures}, {"replications", result.replications}};
}

nlohmann::json to_json(const SweepResult& result) {
  nlohmann::json cells = nlohmann::json::array();
  for (const SweepCell& cell : result.cells) {
    cells.push_back({{"gamma", cell.gamma},
                     {"pi", cell.pi_label},
                     {"lambda2", cell.lambda2},
                     {"theory_level", cell.theory_level},
                     {"empirical_level", cell.empirical_level},
                     {"empirical_se", cell.empirical_se},
                     {"failures", cell.failures}});
  }
  nlohmann::json maxdev = nlohmann::json::array();
  for (std::size_t i = 0; i < result.gammas.size(); ++i) {
    maxdev.push_back(
        {{"gamma", result.gammas[i]}, {"max_abs_deviation", result.max_theory_deviation[i]}});
  }
  return {{"alpha", result.alpha},
          {"gammas", result.gammas},
          {"pi", result.pi_labels},
          {"cells", cells},
          {"max_theory_deviation", maxdev}};
}

void write_statistics_csv(const std::filesystem::path& path, const std::vector<double>& stats) {
  std::ofstream out = open_out(path);
  out << "statistic\n";
  for (double s : stats) out << format_double(s) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_expansion_csv(const std::filesystem::path& path, const ExpansionResult& result) {
  std::ofstream out = open_out(path);
  out << "x,mean_drift,se,theory_drift\n";
  for (const ExpansionRow& row : result.rows) {
    out << format_double(row.x) << ',' << format_double(row.mean_drift) << ','
        << format_double(row.se) << ',' << format_double(row.theory_drift) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
  std::ofstream out = open_out(path);
  out << "gamma,pi,lambda2,theory_level,empirical_level,empirical_se\n";
  for (const SweepCell& cell : result.cells) {
    // law labels may contain commas, so the field is always quoted
    out << format_double(cell.gamma) << ",\"" << cell.pi_label << "\","
        << format_double(cell.lambda2) << ',' << format_double(cell.theory_level) << ','
        << format_double(cell.empirical_level) << ',' << format_double(cell.empirical_se)
        << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace symchi
