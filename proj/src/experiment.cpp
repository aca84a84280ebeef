#include "bftopt/experiment.hpp"

#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "bftopt/theory.hpp"

namespace bftopt {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string field;
  while (std::getline(ss, field, ',')) {
    field = trim(field);
    if (field.empty()) continue;
    try {
      out.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw std::invalid_argument("config key '" + key + "': cannot parse '" + field + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("config key '" + key + "': empty value");
  return out;
}

Vector to_vector(const std::vector<double>& values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  return v;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v(k));
  return arr;
}

}  // namespace

ExperimentSpec parse_experiment_config(std::istream& in) {
  ExperimentSpec spec;
  std::map<std::string, std::string> kv;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_number) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_number) +
                                  ": empty key or value");
    }
    if (!kv.emplace(key, value).second) {
      throw std::invalid_argument("config line " + std::to_string(line_number) +
                                  ": duplicate key '" + key + "'");
    }
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto v = take("n")) spec.declared_n = std::stoi(*v);
  if (auto v = take("f")) spec.f = std::stoi(*v);
  if (auto v = take("faulty_agents")) {
    for (double id : parse_double_list(*v, "faulty_agents")) {
      spec.faulty_agents.push_back(static_cast<int>(id));
    }
  }
  if (auto v = take("fault_type")) spec.fault_type = *v;
  if (auto v = take("fault_std")) spec.fault_std = std::stod(*v);
  if (auto v = take("filter")) spec.filter = filter_from_name(*v);
  if (auto v = take("eta_c")) spec.eta_c = std::stod(*v);
  if (auto v = take("iterations")) spec.iterations = std::stoi(*v);
  if (auto v = take("w_lower")) spec.w_lower = to_vector(parse_double_list(*v, "w_lower"));
  if (auto v = take("w_upper")) spec.w_upper = to_vector(parse_double_list(*v, "w_upper"));
  if (auto v = take("x0")) spec.x0 = to_vector(parse_double_list(*v, "x0"));
  if (auto v = take("seed")) spec.seed = std::stoull(*v);
  if (auto v = take("dataset_path")) spec.dataset_path = std::filesystem::path(*v);
  if (auto v = take("dataset_header")) spec.dataset_header = (*v == "true" || *v == "1");

  if (!kv.empty()) {
    throw std::invalid_argument("config: unknown key '" + kv.begin()->first + "'");
  }
  if (!spec.dataset_path) throw std::invalid_argument("config: dataset_path is required");
  return spec;
}

ExperimentSpec load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
  return parse_experiment_config(in);
}

std::vector<QuadraticCost> materialize_costs(const ExperimentSpec& spec) {
  if (spec.dataset_path.has_value() == spec.synthetic.has_value()) {
    throw std::invalid_argument("experiment needs exactly one of dataset_path or synthetic");
  }
  std::vector<QuadraticCost> costs;
  if (spec.dataset_path) {
    costs = load_dataset(*spec.dataset_path, {.header = spec.dataset_header});
  } else {
    costs = generate_synthetic(spec.synthetic->n, spec.synthetic->d, spec.synthetic->noise_std,
                               spec.synthetic->seed)
                .costs;
  }
  if (spec.declared_n && *spec.declared_n != static_cast<int>(costs.size())) {
    throw std::invalid_argument("config: n=" + std::to_string(*spec.declared_n) +
                                " does not match the dataset (" + std::to_string(costs.size()) +
                                " rows)");
  }
  return costs;
}

SimConfig build_sim_config(const ExperimentSpec& spec, std::span<const QuadraticCost> costs) {
  const int n = static_cast<int>(costs.size());
  const int d = costs.empty() ? 0 : costs.front().dimension();

  auto widen = [&](const Vector& bound, double fallback) {
    if (bound.size() == 0) return Vector::Constant(d, fallback).eval();
    if (bound.size() == 1) return Vector::Constant(d, bound(0)).eval();
    return bound;
  };
  BoxRegion region(widen(spec.w_lower, -1000.0), widen(spec.w_upper, 1000.0));

  Vector x0 = spec.x0.size() == 0 ? Vector::Zero(d) : spec.x0;

  std::vector<FaultBehavior> behaviors(n, FaultBehavior::honest());
  for (int id : spec.faulty_agents) {
    if (id < 1 || id > n) {
      throw std::invalid_argument("faulty agent id " + std::to_string(id) + " out of range");
    }
    behaviors[id - 1] = fault_from_name(spec.fault_type, spec.fault_std);
  }

  return SimConfig(n, spec.f, std::move(behaviors), spec.filter, StepSchedule(spec.eta_c),
                   std::move(region), std::move(x0), spec.iterations, spec.seed);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  const Eigen::Index d = trajectory.x_reference.size();
  out << 't';
  for (Eigen::Index k = 0; k < d; ++k) out << ",x_" << (k + 1);
  out << ",loss,distance,phi,filter_norm\n";
  out.precision(17);
  for (const auto& rec : trajectory.records) {
    out << rec.t;
    for (Eigen::Index k = 0; k < d; ++k) out << ',' << rec.x(k);
    out << ',' << rec.loss << ',' << rec.distance << ',' << rec.phi << ','
        << rec.filter_output_norm << '\n';
  }
}

std::string trajectory_csv_string(const Trajectory& trajectory) {
  std::ostringstream out;
  write_trajectory_csv(out, trajectory);
  return out.str();
}

namespace {

json summary_to_json(const ExperimentResult& result, const ExperimentSpec& spec, int n,
                     const Trajectory& trajectory) {
  json j;
  j["filter"] = result.summary.filter;
  j["fault"] = result.summary.fault;
  j["x_out"] = vector_to_json(result.summary.x_out);
  j["x_h"] = vector_to_json(trajectory.x_reference);
  j["dist_to_x_h"] = result.summary.dist_to_x_h;
  j["rounds"] = result.summary.rounds;
  j["final_loss"] = trajectory.final_record().loss;
  j["seed"] = spec.seed;

  if (result.redundancy) {
    const auto& report = *result.redundancy;
    const double mu = report.curvature.mu;
    const double gamma = report.curvature.gamma;
    j["epsilon"] = report.epsilon;
    j["two_epsilon"] = 2.0 * report.epsilon;

    json bounds;
    bounds["mu"] = mu;
    bounds["gamma"] = gamma;
    bounds["mu_eigenvalue_convention"] = mu / 2.0;
    bounds["gamma_eigenvalue_convention"] = gamma / 2.0;
    const CgeBound cge = cge_bound(n, spec.f, mu, gamma, report.epsilon);
    bounds["alpha"] = cge.alpha;
    bounds["cge_applicable"] = cge.applicable();
    if (cge.applicable()) {
      bounds["D"] = *cge.amplification;
      bounds["D_eps"] = *cge.distance_bound;
    }
    j["bounds"] = bounds;
  } else {
    j["epsilon"] = nullptr;
    j["two_epsilon"] = nullptr;
  }
  return j;
}

void write_gnuplot_script(const std::filesystem::path& path, const std::string& csv_name,
                          const std::string& title, int d) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write gnuplot script: " + path.string());
  out << "set datafile separator ','\n"
      << "set key top right\n"
      << "set logscale y\n"
      << "set xlabel 'iteration'\n"
      << "set terminal pngcairo size 900,420\n"
      << "set output '" << title << ".png'\n"
      << "set multiplot layout 1,2 title '" << title << "'\n"
      << "set ylabel 'loss'\n"
      << "plot '" << csv_name << "' using 1:" << (d + 2) << " with lines title 'loss'\n"
      << "set ylabel 'distance'\n"
      << "plot '" << csv_name << "' using 1:" << (d + 3) << " with lines title 'distance'\n"
      << "unset multiplot\n";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  const auto costs = materialize_costs(spec);
  const SimConfig config = build_sim_config(spec, costs);

  ExperimentResult result{
      .summary = {},
      .trajectory = run_dgd(config, costs),
      .redundancy = std::nullopt,
  };
  try {
    result.redundancy = measure_redundancy(costs, spec.f);
  } catch (const RankDeficiencyError&) {
    // some subset lacks a unique minimizer: the run stands, epsilon does not
  } catch (const std::invalid_argument&) {
    // enumeration guard for large n (config-level preconditions were
    // validated by build_sim_config already)
  }

  const auto& last = result.trajectory.final_record();
  result.summary.filter = filter_name(spec.filter);
  result.summary.fault = spec.faulty_agents.empty() ? "none" : spec.fault_type;
  result.summary.x_out = last.x;
  result.summary.dist_to_x_h = (last.x - result.trajectory.x_reference).norm();
  result.summary.epsilon =
      result.redundancy ? result.redundancy->epsilon : std::numeric_limits<double>::quiet_NaN();
  result.summary.rounds = spec.iterations;

  if (spec.out_dir) {
    std::filesystem::create_directories(*spec.out_dir);
    const std::string stem = "trajectory_" + result.summary.filter + "_" + result.summary.fault;
    {
      std::ofstream out(*spec.out_dir / (stem + ".csv"));
      if (!out) throw std::runtime_error("cannot write trajectory CSV");
      write_trajectory_csv(out, result.trajectory);
    }

    // summary.json holds an array of experiment records; reruns append.
    const auto summary_path = *spec.out_dir / "summary.json";
    json summary = json::array();
    if (std::filesystem::exists(summary_path)) {
      std::ifstream in(summary_path);
      try {
        summary = json::parse(in);
      } catch (const json::parse_error&) {
        summary = json::array();
      }
      if (!summary.is_array()) summary = json::array();
    }
    summary.push_back(
        summary_to_json(result, spec, static_cast<int>(costs.size()), result.trajectory));
    std::ofstream out(summary_path);
    out << summary.dump(2) << '\n';

    if (spec.emit_gnuplot) {
      write_gnuplot_script(*spec.out_dir / ("plot_" + result.summary.filter + "_" +
                                            result.summary.fault + ".gp"),
                           stem + ".csv", stem, costs.front().dimension());
    }
  }
  return result;
}

}  // namespace bftopt
