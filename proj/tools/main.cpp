#include <chrono>
#include <cmath>
#include <iomanip>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bftopt/experiment.hpp"
#include "bftopt/redundancy.hpp"
#include "bftopt/resilient.hpp"
#include "bftopt/theory.hpp"

namespace {

using bftopt::AgentSet;
using bftopt::Vector;
using nlohmann::json;

json set_to_json(const AgentSet& ids) {
  json arr = json::array();
  for (int id : ids) arr.push_back(id);
  return arr;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v(k));
  return arr;
}

std::string format_set(const AgentSet& ids) {
  std::string s = "{";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(ids[i]);
  }
  return s + "}";
}

std::string format_vector(const Vector& v, int precision = 6) {
  std::ostringstream out;
  out.precision(precision);
  out << '(';
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (k) out << ", ";
    out << v(k);
  }
  out << ')';
  return out.str();
}

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out_dir;
  bool as_json = false;
};

void cmd_redundancy(const std::string& dataset, int f, bool header, bool force,
                    const GlobalOptions& global) {
  const auto costs = bftopt::load_dataset(dataset, {.header = header});
  const auto report =
      bftopt::measure_redundancy(costs, f, {.max_agents = 20, .force = force});
  const double mu = report.curvature.mu;
  const double gamma = report.curvature.gamma;

  if (global.as_json) {
    json j;
    j["epsilon"] = report.epsilon;
    j["witness_superset"] = set_to_json(report.witness_superset);
    j["witness_subset"] = set_to_json(report.witness_subset);
    j["mu"] = mu;
    j["gamma"] = gamma;
    j["mu_eigenvalue_convention"] = mu / 2.0;
    j["gamma_eigenvalue_convention"] = gamma / 2.0;
    json per;
    for (const auto& [superset, eps] : report.per_superset) {
      per.push_back({{"superset", set_to_json(superset)}, {"epsilon", eps}});
    }
    j["per_superset"] = per;
    std::cout << j.dump(2) << '\n';
    return;
  }

  std::cout << "epsilon         = " << report.epsilon << '\n'
            << "witness         = S " << format_set(report.witness_superset) << "  S-hat "
            << format_set(report.witness_subset) << '\n'
            << "mu              = " << mu << "  (eigenvalue convention: " << mu / 2.0 << ")\n"
            << "gamma           = " << gamma << "  (eigenvalue convention: " << gamma / 2.0
            << ")\n"
            << "per-superset epsilon:\n";
  for (const auto& [superset, eps] : report.per_superset) {
    std::cout << "  " << format_set(superset) << "  " << eps << '\n';
  }
}

void cmd_bounds(const std::string& dataset, int f, int samples, bool header,
                const GlobalOptions& global) {
  const auto costs = bftopt::load_dataset(dataset, {.header = header});
  const int n = static_cast<int>(costs.size());
  const int d = costs.front().dimension();
  const auto report = bftopt::measure_redundancy(costs, f);
  const double mu = report.curvature.mu;
  const double gamma = report.curvature.gamma;

  const auto region = bftopt::BoxRegion::cube(d, -1000.0, 1000.0);
  const double lambda_hat = bftopt::estimate_lambda(costs, region, samples, global.seed);

  const auto cge = bftopt::cge_bound(n, f, mu, gamma, report.epsilon);
  const auto cwtm = bftopt::cwtm_bound(d, n, mu, gamma, lambda_hat, report.epsilon);

  json j;
  j["n"] = n;
  j["f"] = f;
  j["d"] = d;
  j["mu"] = mu;
  j["gamma"] = gamma;
  j["mu_eigenvalue_convention"] = mu / 2.0;
  j["gamma_eigenvalue_convention"] = gamma / 2.0;
  j["epsilon"] = report.epsilon;
  j["alpha"] = cge.alpha;
  j["cge_applicable"] = cge.applicable();
  j["D"] = cge.applicable() ? json(*cge.amplification) : json();
  j["D_eps"] = cge.applicable() ? json(*cge.distance_bound) : json();
  j["lambda_hat"] = lambda_hat;
  j["lambda_hat_note"] = "empirical lower bound from sampling; not a certified sup";
  j["lambda_threshold"] = cwtm.lambda_threshold;
  j["cwtm_applicable"] = cwtm.applicable();
  j["D_prime"] = cwtm.applicable() ? json(*cwtm.amplification) : json();
  j["D_prime_eps"] = cwtm.applicable() ? json(*cwtm.distance_bound) : json();
  std::cout << j.dump(2) << '\n';

  if (!cge.applicable()) {
    std::cerr << "note: alpha <= 0, the CGE sufficient condition does not cover this instance"
                 " (the filter may still converge in practice)\n";
  }
  if (!cwtm.applicable()) {
    std::cerr << "note: lambda_hat >= gamma/(mu sqrt(d)), the CWTM sufficient condition does"
                 " not cover this instance\n";
  }
}

bftopt::QuadraticCost parse_injection(const std::string& text, int d, int n, int& id_out) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw CLI::ValidationError("--inject", "expected <agent_id>:<a_1>,...,<a_d>,<b>");
  }
  id_out = std::stoi(text.substr(0, colon));
  if (id_out < 1 || id_out > n) {
    throw CLI::ValidationError("--inject", "agent id out of range");
  }
  std::vector<double> values;
  std::stringstream ss(text.substr(colon + 1));
  std::string field;
  while (std::getline(ss, field, ',')) values.push_back(std::stod(field));
  if (static_cast<int>(values.size()) != d + 1) {
    throw CLI::ValidationError("--inject", "expected " + std::to_string(d + 1) +
                                               " comma-separated numbers after the colon");
  }
  Vector row(d);
  for (int k = 0; k < d; ++k) row(k) = values[k];
  return bftopt::QuadraticCost(row, values.back());
}

void cmd_exhaustive(const std::string& dataset, int f, const std::vector<std::string>& injections,
                    bool header, bool force, const GlobalOptions& global) {
  auto costs = bftopt::load_dataset(dataset, {.header = header});
  const int n = static_cast<int>(costs.size());
  const int d = costs.front().dimension();
  for (const auto& inject : injections) {
    int id = 0;
    auto cost = parse_injection(inject, d, n, id);
    costs[id - 1] = std::move(cost);
  }

  const bftopt::SubmittedCosts submitted(std::move(costs), f);
  const auto solution = bftopt::resilient_solve(submitted, {.max_agents = 20, .force = force});

  if (global.as_json) {
    json j;
    j["x_hat"] = vector_to_json(solution.x_hat);
    j["chosen_set"] = set_to_json(solution.chosen_set);
    json rs = json::array();
    for (const auto& [candidate, r] : solution.r_values) {
      rs.push_back({{"set", set_to_json(candidate)}, {"r", r}});
    }
    j["r_values"] = rs;
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::cout << "x_hat      = " << format_vector(solution.x_hat, 10) << '\n'
            << "chosen set = " << format_set(solution.chosen_set) << '\n'
            << "r_T per candidate set:\n";
  for (const auto& [candidate, r] : solution.r_values) {
    std::cout << "  " << format_set(candidate) << "  " << r << '\n';
  }
}

void print_summary_row(const bftopt::SummaryRecord& summary) {
  std::cout << std::left << std::setw(9) << summary.filter << std::setw(18) << summary.fault
            << std::setw(28) << format_vector(summary.x_out) << std::scientific
            << std::setprecision(4) << summary.dist_to_x_h << std::defaultfloat << '\n';
}

void cmd_simulate(const std::string& config_path, bool gnuplot, const GlobalOptions& global,
                  bool seed_set) {
  auto spec = bftopt::load_experiment_config(config_path);
  if (!global.out_dir.empty()) spec.out_dir = global.out_dir;
  if (seed_set) spec.seed = global.seed;
  spec.emit_gnuplot = gnuplot;

  const auto result = bftopt::run_experiment(spec);
  if (global.as_json) {
    json j;
    j["filter"] = result.summary.filter;
    j["fault"] = result.summary.fault;
    j["x_out"] = vector_to_json(result.summary.x_out);
    j["dist_to_x_h"] = result.summary.dist_to_x_h;
    j["epsilon"] = result.summary.epsilon;
    j["two_epsilon"] = 2.0 * result.summary.epsilon;
    j["rounds"] = result.summary.rounds;
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::cout << std::left << std::setw(9) << "filter" << std::setw(18) << "fault" << std::setw(28)
            << "x_out" << "dist(x_H, x_out)" << '\n';
  print_summary_row(result.summary);
  if (std::isnan(result.summary.epsilon)) {
    std::cout << "epsilon = n/a (redundancy not measurable for this instance)\n";
  } else {
    std::cout << "epsilon = " << result.summary.epsilon
              << (result.summary.dist_to_x_h < result.summary.epsilon ? "  (dist < epsilon)"
                                                                      : "  (dist >= epsilon)")
              << '\n';
  }
}

void cmd_generate(int n, int d, double noise_std, const std::string& output,
                  const GlobalOptions& global) {
  const auto dataset = bftopt::generate_synthetic(n, d, noise_std, global.seed);
  bftopt::save_dataset(output, dataset.costs);
  if (global.as_json) {
    json j;
    j["path"] = output;
    j["n"] = n;
    j["d"] = d;
    j["noise_std"] = noise_std;
    j["seed"] = global.seed;
    j["ground_truth"] = vector_to_json(dataset.ground_truth);
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::cout << "wrote " << n << " agents (d=" << d << ") to " << output
            << "; ground truth x* = " << format_vector(dataset.ground_truth) << '\n';
}

void cmd_reproduce_table1(const std::string& dataset, const std::string& init, int iterations,
                          const GlobalOptions& global) {
  bftopt::ExperimentSpec base;
  base.dataset_path = dataset;
  base.f = 1;
  base.faulty_agents = {1};
  base.eta_c = 1.5;
  base.iterations = iterations;
  base.seed = global.seed;
  if (!global.out_dir.empty()) base.out_dir = global.out_dir;

  Vector x0(2);
  if (init == "table1") {
    x0 << -0.0085, -0.5643;
  } else if (init == "origin") {
    x0 << 0.0, 0.0;
  } else {
    throw CLI::ValidationError("--init", "expected table1 or origin");
  }
  base.x0 = x0;

  std::cout << "init x0 = " << format_vector(x0) << ", eta_t = 1.5/(t+1), " << iterations
            << " rounds, faulty agent 1\n";
  std::cout << std::left << std::setw(9) << "filter" << std::setw(18) << "fault" << std::setw(28)
            << "x_out" << "dist(x_H, x_out)" << '\n';

  json rows = json::array();
  double epsilon = 0.0;
  bool all_below = true;
  for (const auto& fault : {std::string("gradient_reverse"), std::string("gaussian_random")}) {
    for (const auto filter : {bftopt::FilterKind::cge, bftopt::FilterKind::cwtm}) {
      bftopt::ExperimentSpec spec = base;
      spec.filter = filter;
      spec.fault_type = fault;
      spec.fault_std = 200.0;
      const auto result = bftopt::run_experiment(spec);
      print_summary_row(result.summary);
      epsilon = result.summary.epsilon;
      all_below = all_below && result.summary.dist_to_x_h < epsilon;
      rows.push_back({{"filter", result.summary.filter},
                      {"fault", result.summary.fault},
                      {"x_out", vector_to_json(result.summary.x_out)},
                      {"dist_to_x_h", result.summary.dist_to_x_h}});
    }
  }

  // Fault-free baseline: drop the faulty agent entirely, plain averaging.
  {
    auto costs = bftopt::load_dataset(dataset, {});
    costs.erase(costs.begin());
    const int n = static_cast<int>(costs.size());
    const bftopt::SimConfig config(
        n, 0, std::vector<bftopt::FaultBehavior>(n, bftopt::FaultBehavior::honest()),
        bftopt::FilterKind::average, bftopt::StepSchedule(base.eta_c),
        bftopt::BoxRegion::cube(2, -1000.0, 1000.0), x0, iterations, global.seed);
    const auto trajectory = bftopt::run_dgd(config, costs);
    if (base.out_dir) {
      std::ofstream out(*base.out_dir / "trajectory_average_fault-free.csv");
      bftopt::write_trajectory_csv(out, trajectory);
    }
    const auto& last = trajectory.final_record();
    bftopt::SummaryRecord summary{"average", "fault-free", last.x, last.distance, epsilon,
                                  iterations};
    print_summary_row(summary);
    rows.push_back({{"filter", summary.filter},
                    {"fault", summary.fault},
                    {"x_out", vector_to_json(summary.x_out)},
                    {"dist_to_x_h", summary.dist_to_x_h}});
  }

  std::cout << "epsilon = " << epsilon << "; filtered runs all satisfy dist < epsilon: "
            << (all_below ? "yes" : "NO") << '\n';
  if (global.as_json) std::cout << rows.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate Byzantine fault-tolerant distributed optimization toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  bool seed_set = false;
  app.add_option("--seed", global.seed, "Master seed for randomized components")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", global.out_dir, "Directory for trajectory/summary output files");
  app.add_flag("--json", global.as_json, "Emit machine-readable JSON");

  std::string dataset = "data/regression6.csv";
  int f = 1;
  bool header = false;
  bool force = false;

  auto* redundancy = app.add_subcommand("redundancy", "Measure the instance's redundancy");
  redundancy->add_option("--dataset", dataset, "CSV with rows a_1,...,a_d,b")->required();
  redundancy->add_option("--f", f, "Fault budget")->required();
  redundancy->add_flag("--header", header, "Skip the first CSV line");
  redundancy->add_flag("--force", force, "Run even above the n=20 enumeration guard");

  int samples = 10000;
  auto* bounds = app.add_subcommand("bounds", "Closed-form resilience bounds for the instance");
  bounds->add_option("--dataset", dataset)->required();
  bounds->add_option("--f", f)->required();
  bounds->add_option("--samples", samples, "Sample count for the lambda estimate");
  bounds->add_flag("--header", header);

  std::vector<std::string> injections;
  auto* exhaustive =
      app.add_subcommand("exhaustive", "Run the exhaustive resilient aggregation solver");
  exhaustive->add_option("--dataset", dataset)->required();
  exhaustive->add_option("--f", f)->required();
  exhaustive->add_option("--inject", injections,
                         "Replace an agent's submission: <id>:<a_1>,...,<a_d>,<b>");
  exhaustive->add_flag("--header", header);
  exhaustive->add_flag("--force", force);

  std::string config_path;
  bool gnuplot = false;
  auto* simulate = app.add_subcommand("simulate", "Run one filtered-descent experiment");
  simulate->add_option("--config", config_path, "key = value run description")->required();
  simulate->add_flag("--gnuplot", gnuplot, "Also emit a gnuplot script next to the CSV");

  int gen_n = 6, gen_d = 2;
  double noise_std = 0.05;
  std::string output;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic regression dataset");
  generate->add_option("--n", gen_n, "Agent count")->required();
  generate->add_option("--d", gen_d, "Dimension")->required();
  generate->add_option("--noise-std", noise_std, "Response noise standard deviation");
  generate->add_option("--output", output, "Destination CSV path")->required();

  std::string init = "table1";
  int iterations = 500;
  auto* table1 = app.add_subcommand(
      "reproduce-table1", "Re-run the linear-regression comparison of the two filters");
  table1->add_option("--dataset", dataset)->capture_default_str();
  table1->add_option("--init", init, "Initial estimate: table1 or origin")->capture_default_str();
  table1->add_option("--iterations", iterations)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*redundancy) cmd_redundancy(dataset, f, header, force, global);
    if (*bounds) cmd_bounds(dataset, f, samples, header, global);
    if (*exhaustive) cmd_exhaustive(dataset, f, injections, header, force, global);
    if (*simulate) cmd_simulate(config_path, gnuplot, global, seed_set);
    if (*generate) cmd_generate(gen_n, gen_d, noise_std, output, global);
    if (*table1) cmd_reproduce_table1(dataset, init, iterations, global);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const bftopt::DatasetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
