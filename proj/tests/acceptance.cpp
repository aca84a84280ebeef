// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line. Exit status is the number of failed criteria.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "bftopt/experiment.hpp"
#include "bftopt/redundancy.hpp"
#include "bftopt/resilient.hpp"
#include "bftopt/theory.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace bftopt;
using nlohmann::json;

namespace {

struct Criterion {
  std::string name;
  std::function<void(std::ostream&)> run;  // throws on failure
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw Failure(message);
}

std::string run_cli(const std::string& args, double* elapsed_seconds) {
  const auto out_path = std::filesystem::temp_directory_path() / "bftopt_cli_out.txt";
  const std::string command = std::string(BFTOPT_CLI_PATH) + " " + args + " > " +
                              out_path.string() + " 2>/dev/null";
  const auto start = std::chrono::steady_clock::now();
  const int status = std::system(command.c_str());
  const auto stop = std::chrono::steady_clock::now();
  if (elapsed_seconds) {
    *elapsed_seconds = std::chrono::duration<double>(stop - start).count();
  }
  require(status == 0, "CLI exited with status " + std::to_string(status));
  std::ifstream in(out_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::filesystem::remove(out_path);
  return buffer.str();
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

const std::string kDataset = std::string(BFTOPT_DATA_DIR) + "/regression6.csv";

SimConfig table1_config(FilterKind filter, const FaultBehavior& fault, const Vector& x0,
                        std::uint64_t seed) {
  std::vector<FaultBehavior> behaviors(6, FaultBehavior::honest());
  behaviors[0] = fault;
  return SimConfig(6, 1, std::move(behaviors), filter, StepSchedule(1.5),
                   BoxRegion::cube(2, -1000.0, 1000.0), x0, 500, seed);
}

// ---------------------------------------------------------------------------

void criterion_redundancy_cli(std::ostream& log) {
  double elapsed = 0.0;
  const std::string output =
      run_cli("redundancy --dataset " + kDataset + " --f 1 --json", &elapsed);
  const json j = json::parse(output);
  const double epsilon = j.at("epsilon").get<double>();
  log << "epsilon=" << epsilon << " elapsed=" << elapsed << "s";
  require(std::abs(epsilon - 0.0890) <= 1e-3, "epsilon outside 0.0890 +- 1e-3");
  require(elapsed < 1.0, "runtime >= 1 s");
}

void criterion_honest_minimizer(std::ostream& log) {
  const auto costs = testsupport::regression6();
  const Vector x_h = aggregate_minimizer(costs, {2, 3, 4, 5, 6});
  log << "x_H=(" << x_h(0) << ", " << x_h(1) << ")";
  require(std::abs(x_h(0) - 1.0780) <= 1e-3, "x_H[0] outside 1.0780 +- 1e-3");
  require(std::abs(x_h(1) - 0.9825) <= 1e-3, "x_H[1] outside 0.9825 +- 1e-3");
}

void criterion_table1_deterministic(std::ostream& log) {
  const auto costs = testsupport::regression6();
  // the two initial estimates the experiment ships with (they differ
  // between write-ups of this comparison; see README)
  const Vector init_a = vec2(-0.0085, -0.5643);
  const Vector init_b = vec2(0.0, 0.0);
  const double epsilon = measure_redundancy(costs, 1).epsilon;

  struct RunResult {
    double cge;
    double cwtm;
    double seconds;
  };
  auto run_pair = [&](const Vector& x0) {
    const auto start = std::chrono::steady_clock::now();
    const auto cge = run_dgd(
        table1_config(FilterKind::cge, FaultBehavior::gradient_reverse(), x0, 0), costs);
    const auto mid = std::chrono::steady_clock::now();
    const auto cwtm = run_dgd(
        table1_config(FilterKind::cwtm, FaultBehavior::gradient_reverse(), x0, 0), costs);
    const auto stop = std::chrono::steady_clock::now();
    const double per_run = std::max(std::chrono::duration<double>(mid - start).count(),
                                    std::chrono::duration<double>(stop - mid).count());
    return RunResult{cge.final_record().distance, cwtm.final_record().distance, per_run};
  };

  const RunResult a = run_pair(init_a);
  const RunResult b = run_pair(init_b);
  log << "init_a: cge=" << a.cge << " cwtm=" << a.cwtm << "; init_b: cge=" << b.cge
      << " cwtm=" << b.cwtm;

  auto tight = [](const RunResult& r) {
    return std::abs(r.cge - 0.0239) <= 0.005 && std::abs(r.cwtm - 0.0167) <= 0.005;
  };
  if (tight(a) || tight(b)) {
    log << "; tight match";
  } else {
    // documented fallback: the reference CGE figure is not what the exact
    // update rule produces (the reversed gradient has the largest norm near
    // the optimum and is filtered out, giving machine-precision recovery),
    // so fall back to the weaker observation dist <= epsilon
    log << "; tight miss -> fallback dist <= epsilon";
    for (const RunResult& r : {a, b}) {
      require(r.cge <= epsilon, "fallback failed: CGE distance above epsilon");
      require(r.cwtm <= epsilon, "fallback failed: CWTM distance above epsilon");
    }
  }
  require(a.seconds < 1.0 && b.seconds < 1.0, "a 500-round run took >= 1 s");
}

void criterion_table1_random(std::ostream& log) {
  const auto costs = testsupport::regression6();
  const double epsilon = 0.0890;
  std::vector<double> cge_dists;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (const auto filter : {FilterKind::cge, FilterKind::cwtm}) {
      const auto trajectory = run_dgd(
          table1_config(filter, FaultBehavior::gaussian_random(200.0),
                        vec2(-0.0085, -0.5643), seed),
          costs);
      const double dist = trajectory.final_record().distance;
      worst = std::max(worst, dist);
      require(dist < epsilon, "distance " + std::to_string(dist) + " not below epsilon (seed " +
                                  std::to_string(seed) + ")");
      if (filter == FilterKind::cge) cge_dists.push_back(dist);
    }
  }
  std::sort(cge_dists.begin(), cge_dists.end());
  const double median = 0.5 * (cge_dists[4] + cge_dists[5]);
  log << "worst=" << worst << " cge_median=" << median;
  require(median < 1e-2, "CGE median distance not below 1e-2");
}

void criterion_exhaustive_guarantee(std::ostream& log) {
  const auto base = testsupport::regression6();
  const AgentSet honest = {2, 3, 4, 5, 6};
  const Vector x_honest = aggregate_minimizer(base, honest);
  const double eps_honest = superset_epsilon(base, honest, 1);
  const double eps_instance = measure_redundancy(base, 1).epsilon;

  CounterRng rng(2025);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    auto submitted = base;
    Vector row;
    do {
      row = testsupport::random_vector(rng, 2, 5.0);
    } while (row.norm() < 0.3);
    submitted[0] = QuadraticCost(row, rng.next_gaussian(0.0, 50.0));
    const auto solution = resilient_solve(SubmittedCosts(std::move(submitted), 1));
    const double dist = (solution.x_hat - x_honest).norm();
    worst = std::max(worst, dist);
    require(dist <= 2.0 * eps_honest + 1e-8,
            "adversarial trial exceeded 2*eps_honest: " + std::to_string(dist));
    require(dist <= 2.0 * eps_instance + 1e-8,
            "adversarial trial exceeded 2*epsilon: " + std::to_string(dist));
  }
  log << "worst=" << worst << " 2*eps_honest=" << 2.0 * eps_honest;

  // noise-free instances: exact recovery whatever the adversary sends
  for (int trial = 0; trial < 10; ++trial) {
    auto clean = testsupport::random_instance(rng, 6, 2, 0.0);
    const int faulty = 1 + static_cast<int>(rng.next_u64() % 6);
    Vector row;
    do {
      row = testsupport::random_vector(rng, 2, 5.0);
    } while (row.norm() < 0.3);
    clean[faulty - 1] = QuadraticCost(row, rng.next_gaussian(0.0, 50.0));
    const auto solution = resilient_solve(SubmittedCosts(std::move(clean), 1));
    require((solution.x_hat - Vector::Ones(2)).norm() <= 1e-9,
            "noise-free recovery missed the exact minimizer");
  }
}

void criterion_bruteforce_equivalence(std::ostream& log) {
  CounterRng rng(2026);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + static_cast<int>(rng.next_u64() % 3);  // 5..7
    const int f = n >= 6 ? 1 + static_cast<int>(rng.next_u64() % 2) : 1;
    const auto costs = testsupport::random_instance(rng, n, 2, 0.4);

    const auto report = measure_redundancy(costs, f);
    const auto reference = oracle::measure_redundancy(costs, f);
    require(std::abs(report.epsilon - reference.epsilon) <= 1e-10 * (1.0 + reference.epsilon),
            "redundancy mismatch vs oracle");

    const auto solution = resilient_solve(SubmittedCosts(costs, f));
    const auto ref_solution = oracle::resilient_solve(costs, f);
    require(solution.chosen_set == ref_solution.chosen_set, "chosen set mismatch vs oracle");
    require((solution.x_hat - ref_solution.x_hat).norm() <= 1e-9, "x_hat mismatch vs oracle");
    ++checked;
  }
  log << checked << " instances";
}

void criterion_filter_oracles(std::ostream& log) {
  CounterRng rng(2027);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 12);
    const int max_f = std::min((n - 1) / 2, 4);
    const int f = max_f == 0 ? 0 : static_cast<int>(rng.next_u64() % (max_f + 1));
    const int d = 1 + static_cast<int>(rng.next_u64() % 4);
    std::vector<Vector> grads;
    for (int i = 0; i < n; ++i) grads.push_back(testsupport::random_vector(rng, d, 4.0));
    if (n >= 2 && trial % 9 == 0) grads[1] = -grads[0];  // equal norms

    const GradientBundle bundle(grads, f);
    const Vector cge = filter_cge(bundle);
    const Vector cge_ref = oracle::cge(grads, f);
    const Vector cwtm = filter_cwtm(bundle);
    const Vector cwtm_ref = oracle::cwtm(grads, f);
    require(cge == cge_ref, "CGE differs from the sort-based oracle");
    require(cwtm == cwtm_ref, "CWTM differs from the sort-based oracle");
    ++checked;
  }
  log << checked << " bundles, exact equality";
}

void criterion_gradient_correctness(std::ostream& log) {
  const auto costs = testsupport::regression6();
  CounterRng rng(2028);
  double worst = 0.0;
  for (const auto& cost : costs) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vector x = testsupport::random_vector(rng, 2, 100.0);
      const Vector analytic = cost.gradient(x);
      const Vector numeric = oracle::finite_difference_gradient(cost, x);
      const double rel = (analytic - numeric).norm() / (1.0 + analytic.norm());
      worst = std::max(worst, rel);
      require(rel <= 1e-6, "finite-difference mismatch " + std::to_string(rel));
    }
  }
  log << "worst rel err=" << worst;
}

void criterion_bound_formulas(std::ostream& log) {
  // direct substitutions
  const auto fault_free = cge_bound(6, 0, 2.0, 0.7, 0.1);
  require(fault_free.alpha == 1.0 && fault_free.applicable() &&
              *fault_free.amplification == 0.0 && *fault_free.distance_bound == 0.0,
          "f=0 CGE bound wrong");
  const auto simple = cge_bound(6, 1, 1.0, 1.0, 0.25);
  require(std::abs(simple.alpha - 0.5) <= 1e-15 && simple.applicable() &&
              std::abs(*simple.amplification - 8.0) <= 1e-12,
          "n=6,f=1,mu=gamma=1 CGE bound wrong");
  const auto cwtm_simple = cwtm_bound(1, 5, 1.0, 1.0, 0.5, 0.1);
  require(cwtm_simple.applicable() && std::abs(*cwtm_simple.amplification - 10.0) <= 1e-12,
          "d=1,n=5 CWTM bound wrong");
  require(!cwtm_bound(1, 5, 1.0, 1.0, 1.0, 0.1).applicable(),
          "CWTM bound applicable past the threshold");

  // bundled instance: alpha < 0 (the sufficient condition does not cover it)
  const auto costs = testsupport::regression6();
  const auto report = measure_redundancy(costs, 1);
  const auto bundled =
      cge_bound(6, 1, report.curvature.mu, report.curvature.gamma, report.epsilon);
  require(bundled.alpha < 0.0 && !bundled.applicable(),
          "expected alpha < 0 on the bundled instance");

  // gamma <= mu for every extracted pair
  CounterRng rng(2029);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 4 + static_cast<int>(rng.next_u64() % 4);
    const auto inst = testsupport::random_instance(rng, n, 2, 0.5);
    const auto pair = curvature_for_set(inst, full_agent_set(n));
    require(pair.gamma <= pair.mu + 1e-9, "extracted gamma exceeds mu");
  }
  log << "alpha(bundled)=" << bundled.alpha;
}

void criterion_impossibility_guards(std::ostream& log) {
  // f >= n/2 rejected at configuration time
  bool rejected = false;
  try {
    SimConfig(6, 3, std::vector<FaultBehavior>(6, FaultBehavior::honest()), FilterKind::cge,
              StepSchedule(1.5), BoxRegion::cube(2, -1000.0, 1000.0), Vector::Zero(2), 1, 0);
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  require(rejected, "SimConfig accepted f >= n/2");

  // CWTM with n <= 2f cannot even form a bundle
  rejected = false;
  try {
    GradientBundle bundle({vec2(1, 0), vec2(0, 1)}, 1);
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  require(rejected, "bundle accepted n <= 2f");

  // the two necessity labelings defeat any single deterministic output
  for (const auto& [eps, delta] :
       std::vector<std::pair<double, double>>{{1.0, 0.5}, {0.0, 0.1}, {0.089, 0.01}}) {
    const auto scenario = necessity_scenario(eps, delta);
    require(std::abs(std::abs(scenario.x_s - scenario.x_bs) - (2.0 * eps + 2.0 * delta)) <= 1e-12,
            "separation is not 2*eps + 2*delta");
    const auto solution = resilient_solve(scenario.scenario_a);
    const double worst = std::max(std::abs(solution.x_hat(0) - scenario.x_s),
                                  std::abs(solution.x_hat(0) - scenario.x_bs));
    require(worst >= eps + delta - 1e-12, "deterministic output beat the necessity bound");
  }
  log << "guards + necessity scenarios hold";
}

void criterion_determinism(std::ostream& log) {
  const auto costs = testsupport::regression6();
  for (const auto filter : {FilterKind::cge, FilterKind::cwtm}) {
    const auto config = table1_config(filter, FaultBehavior::gaussian_random(200.0),
                                      vec2(-0.0085, -0.5643), 77);
    const std::string first = trajectory_csv_string(run_dgd(config, costs));
    const std::string second = trajectory_csv_string(run_dgd(config, costs));
    require(first == second, "trajectory bytes differ between identical runs");
  }
  log << "byte-identical trajectories";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"1 redundancy CLI: epsilon = 0.0890 +- 1e-3 in < 1 s", criterion_redundancy_cli},
      {"2 honest minimizer (1.0780, 0.9825) +- 1e-3", criterion_honest_minimizer},
      {"3 deterministic-fault runs: tight table1 reference match or dist <= epsilon",
       criterion_table1_deterministic},
      {"4 random-fault runs: 10 seeds below epsilon, CGE median < 1e-2",
       criterion_table1_random},
      {"5 exhaustive solver: 2*eps guarantee + exact noise-free recovery",
       criterion_exhaustive_guarantee},
      {"6 brute-force oracle equivalence on random instances", criterion_bruteforce_equivalence},
      {"7 filter oracles: 1000 random bundles, exact equality", criterion_filter_oracles},
      {"8 analytic gradients vs finite differences (rel <= 1e-6)",
       criterion_gradient_correctness},
      {"9 bound formulas: substitutions, alpha < 0, gamma <= mu", criterion_bound_formulas},
      {"10 impossibility guards + necessity scenarios", criterion_impossibility_guards},
      {"11 determinism: byte-identical trajectories", criterion_determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    std::ostringstream log;
    try {
      criterion.run(log);
      std::cout << "[PASS] " << criterion.name;
      if (!log.str().empty()) std::cout << "  (" << log.str() << ")";
      std::cout << '\n';
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "[FAIL] " << criterion.name << "  (" << e.what() << ")\n";
    }
  }
  if (failures > 0) std::cout << failures << " criterion(s) failed\n";
  return failures;
}
