#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "bftopt/dataset.hpp"
#include "bftopt/redundancy.hpp"
#include "bftopt/simengine.hpp"

namespace bftopt {

/// Synthetic-instance parameters, mirrored by the `generate` subcommand.
struct SyntheticSpec {
  int n = 0;
  int d = 0;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

/// Everything needed to run one simulation end to end: where the costs come
/// from (exactly one source), the run parameters, and where results go.
struct ExperimentSpec {
  std::optional<std::filesystem::path> dataset_path;
  std::optional<SyntheticSpec> synthetic;
  bool dataset_header = false;
  std::optional<int> declared_n;  // config's n key; checked against the costs

  int f = 0;
  AgentSet faulty_agents;            // 1-based ids
  std::string fault_type = "honest";
  double fault_std = 0.0;
  FilterKind filter = FilterKind::average;
  double eta_c = 1.5;
  Vector w_lower;
  Vector w_upper;
  Vector x0;
  int iterations = 500;
  std::uint64_t seed = 0;

  std::optional<std::filesystem::path> out_dir;
  bool emit_gnuplot = false;
};

/// One row of results in the shape of the experiment tables: the run's
/// output point, its distance to the honest minimizer, and the instance's
/// measured redundancy.
struct SummaryRecord {
  std::string filter;
  std::string fault;
  Vector x_out;
  double dist_to_x_h = 0.0;
  double epsilon = 0.0;
  int rounds = 0;
};

/// Flat `key = value` run description; the same keys the README documents.
/// Unknown keys are rejected. Lists are comma-separated; w_lower/w_upper
/// accept a scalar that applies to every coordinate.
ExperimentSpec parse_experiment_config(std::istream& in);
ExperimentSpec load_experiment_config(const std::filesystem::path& path);

/// Loads or generates the costs named by the spec.
std::vector<QuadraticCost> materialize_costs(const ExperimentSpec& spec);

/// Builds the SimConfig for the given costs (n comes from the cost list).
SimConfig build_sim_config(const ExperimentSpec& spec, std::span<const QuadraticCost> costs);

struct ExperimentResult {
  SummaryRecord summary;
  Trajectory trajectory;
  // Unset when the instance defeats the measurement (enumeration guard for
  // large n, or rank-deficient subsets); summary.epsilon is NaN then.
  std::optional<RedundancyReport> redundancy;
};

/// Runs the configured simulation, measures redundancy, and, when an output
/// directory is set, writes trajectory_<filter>_<fault>.csv plus
/// summary.json (appending to the summary array if one exists) and,
/// optionally, a gnuplot script for the loss/distance curves.
ExperimentResult run_experiment(const ExperimentSpec& spec);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
std::string trajectory_csv_string(const Trajectory& trajectory);

}  // namespace bftopt
