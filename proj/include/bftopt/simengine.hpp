#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "bftopt/costmodel.hpp"
#include "bftopt/filters.hpp"
#include "bftopt/rng.hpp"

namespace bftopt {

/// What an agent sends in place of its true gradient.
struct FaultBehavior {
  enum class Kind { honest, gradient_reverse, gaussian_random, custom };
  using CustomFn =
      std::function<Vector(const Vector& x, const Vector& true_gradient, int round, CounterRng& rng)>;

  Kind kind = Kind::honest;
  double gaussian_std = 0.0;
  CustomFn custom_fn;

  static FaultBehavior honest() { return {}; }
  static FaultBehavior gradient_reverse() { return {Kind::gradient_reverse, 0.0, nullptr}; }
  static FaultBehavior gaussian_random(double stddev);
  static FaultBehavior custom(CustomFn fn);

  bool is_honest() const { return kind == Kind::honest; }
};

FaultBehavior fault_from_name(std::string_view name, double gaussian_std);
std::string fault_name(const FaultBehavior& behavior);

/// Axis-aligned compact box W; its Euclidean projection is a per-coordinate
/// clamp.
struct BoxRegion {
  Vector lower;
  Vector upper;

  BoxRegion(Vector lo, Vector up);
  static BoxRegion cube(int dimension, double lo, double up);
  int dimension() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& x) const;
};

Vector project_box(const Vector& x, const BoxRegion& region);

/// Diminishing schedule eta_t = c/(t+1); square-summable but not summable,
/// as the convergence results require.
struct StepSchedule {
  double c;
  explicit StepSchedule(double coefficient);
  double at(int t) const { return c / static_cast<double>(t + 1); }
};

struct SimConfig {
  int n;
  int f;
  std::vector<FaultBehavior> behaviors;  // one per agent, id order
  FilterKind filter;
  StepSchedule schedule;
  BoxRegion region;
  Vector x0;
  int iterations;
  std::uint64_t seed;

  /// Validates n > 2f, |behaviors| = n, at most f non-honest behaviors,
  /// x0 in the region, iterations >= 0.
  SimConfig(int n, int f, std::vector<FaultBehavior> behaviors, FilterKind filter,
            StepSchedule schedule, BoxRegion region, Vector x0, int iterations,
            std::uint64_t seed);

  AgentSet honest_agents() const;
};

/// phi_t of the convergence criterion: <x_t - x_ref, filter output>.
double phi(const Vector& x_t, const Vector& x_ref, const Vector& filter_output);

struct TrajectoryRecord {
  int t;
  Vector x;                  // estimate at the start of round t
  double loss;               // sum over honest agents of Q_i(x)
  double distance;           // ||x - x_H||
  double phi;                // <x - x_H, filter output at x>
  double filter_output_norm;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;  // rounds 0..iterations inclusive
  Vector x_reference;                     // honest aggregate minimizer x_H

  const TrajectoryRecord& final_record() const { return records.back(); }
};

/// Runs the synchronous filtered descent loop: broadcast x_t, collect the n
/// gradients (honest agents send the true gradient, faulty ones whatever
/// their behavior dictates), apply the configured filter, step and project.
/// Fully deterministic given (config, costs): faulty randomness comes from
/// counter-based per-agent streams keyed by (seed, agent id, round).
Trajectory run_dgd(const SimConfig& config, std::span<const QuadraticCost> costs);

/// A running system whose roster can shrink. Stream ids are pinned at
/// construction so eliminating an agent does not shift the surviving
/// agents' random draws even though their ids are re-assigned 1..n-1.
struct SystemState {
  SimConfig config;
  std::vector<QuadraticCost> costs;
  std::vector<std::uint64_t> stream_ids;

  SystemState(SimConfig cfg, std::vector<QuadraticCost> agent_costs);
};

/// Removes the agent with the given current id, decrements both n and f,
/// and re-assigns ids 1..n-1 preserving order. Requires f >= 1; a missing
/// (already eliminated) id is an error.
SystemState eliminate_agent(const SystemState& state, int agent_id);

Trajectory run_dgd(const SystemState& state);

}  // namespace bftopt
