#include "bftopt/simengine.hpp"

#include <algorithm>

namespace bftopt {

FaultBehavior FaultBehavior::gaussian_random(double stddev) {
  if (!(stddev > 0.0)) throw std::invalid_argument("gaussian_random fault needs std > 0");
  return {Kind::gaussian_random, stddev, nullptr};
}

FaultBehavior FaultBehavior::custom(CustomFn fn) {
  if (!fn) throw std::invalid_argument("custom fault needs a callable");
  return {Kind::custom, 0.0, std::move(fn)};
}

FaultBehavior fault_from_name(std::string_view name, double gaussian_std) {
  if (name == "honest") return FaultBehavior::honest();
  if (name == "gradient_reverse") return FaultBehavior::gradient_reverse();
  if (name == "gaussian_random" || name == "random") {
    return FaultBehavior::gaussian_random(gaussian_std);
  }
  throw std::invalid_argument("unknown fault type '" + std::string(name) +
                              "' (expected honest|gradient_reverse|gaussian_random)");
}

std::string fault_name(const FaultBehavior& behavior) {
  switch (behavior.kind) {
    case FaultBehavior::Kind::honest: return "honest";
    case FaultBehavior::Kind::gradient_reverse: return "gradient_reverse";
    case FaultBehavior::Kind::gaussian_random: return "gaussian_random";
    case FaultBehavior::Kind::custom: return "custom";
  }
  throw std::logic_error("unreachable fault kind");
}

BoxRegion::BoxRegion(Vector lo, Vector up) : lower(std::move(lo)), upper(std::move(up)) {
  require_finite(lower, "BoxRegion lower");
  require_finite(upper, "BoxRegion upper");
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw std::invalid_argument("BoxRegion: bounds must share a positive dimension");
  }
  for (Eigen::Index k = 0; k < lower.size(); ++k) {
    if (!(lower(k) < upper(k))) {
      throw std::invalid_argument("BoxRegion: lower[k] < upper[k] required");
    }
  }
}

BoxRegion BoxRegion::cube(int dimension, double lo, double up) {
  return BoxRegion(Vector::Constant(dimension, lo), Vector::Constant(dimension, up));
}

bool BoxRegion::contains(const Vector& x) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x(k) < lower(k) || x(k) > upper(k)) return false;
  }
  return true;
}

Vector project_box(const Vector& x, const BoxRegion& region) {
  require_dimension(x, region.lower.size(), "project_box");
  return x.cwiseMax(region.lower).cwiseMin(region.upper);
}

StepSchedule::StepSchedule(double coefficient) : c(coefficient) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("StepSchedule: c must be positive");
}

SimConfig::SimConfig(int n_, int f_, std::vector<FaultBehavior> behaviors_, FilterKind filter_,
                     StepSchedule schedule_, BoxRegion region_, Vector x0_, int iterations_,
                     std::uint64_t seed_)
    : n(n_),
      f(f_),
      behaviors(std::move(behaviors_)),
      filter(filter_),
      schedule(schedule_),
      region(std::move(region_)),
      x0(std::move(x0_)),
      iterations(iterations_),
      seed(seed_) {
  if (f < 0) throw std::invalid_argument("SimConfig: f must be non-negative");
  if (n <= 2 * f) {
    // No deterministic algorithm can be resilient once f >= n/2.
    throw std::invalid_argument("SimConfig: requires n > 2f (got n=" + std::to_string(n) +
                                ", f=" + std::to_string(f) + ")");
  }
  if (static_cast<int>(behaviors.size()) != n) {
    throw std::invalid_argument("SimConfig: need one behavior per agent");
  }
  const auto faulty = std::count_if(behaviors.begin(), behaviors.end(),
                                    [](const FaultBehavior& b) { return !b.is_honest(); });
  if (faulty > f) {
    throw std::invalid_argument("SimConfig: " + std::to_string(faulty) +
                                " non-honest behaviors exceed f=" + std::to_string(f));
  }
  require_finite(x0, "SimConfig x0");
  if (x0.size() != region.lower.size()) throw std::invalid_argument("SimConfig: x0 dimension mismatch");
  if (!region.contains(x0)) throw std::invalid_argument("SimConfig: x0 outside the region");
  if (iterations < 0) throw std::invalid_argument("SimConfig: iterations must be non-negative");
}

AgentSet SimConfig::honest_agents() const {
  AgentSet ids;
  for (int i = 0; i < n; ++i) {
    if (behaviors[i].is_honest()) ids.push_back(i + 1);
  }
  return ids;
}

double phi(const Vector& x_t, const Vector& x_ref, const Vector& filter_output) {
  require_dimension(x_ref, x_t.size(), "phi");
  require_dimension(filter_output, x_t.size(), "phi");
  return (x_t - x_ref).dot(filter_output);
}

SystemState::SystemState(SimConfig cfg, std::vector<QuadraticCost> agent_costs)
    : config(std::move(cfg)), costs(std::move(agent_costs)) {
  if (static_cast<int>(costs.size()) != config.n) {
    throw std::invalid_argument("SystemState: need one cost per agent");
  }
  for (const auto& c : costs) {
    if (c.dimension() != config.region.dimension()) {
      throw std::invalid_argument("SystemState: cost dimension does not match the region");
    }
  }
  stream_ids.resize(costs.size());
  for (std::size_t i = 0; i < costs.size(); ++i) stream_ids[i] = static_cast<std::uint64_t>(i + 1);
}

SystemState eliminate_agent(const SystemState& state, int agent_id) {
  if (agent_id < 1 || agent_id > state.config.n) {
    throw std::invalid_argument("eliminate_agent: no agent with id " + std::to_string(agent_id));
  }
  if (state.config.f < 1) {
    throw std::invalid_argument("eliminate_agent: f is already 0; a missing agent would exceed the budget");
  }
  const std::size_t idx = static_cast<std::size_t>(agent_id - 1);

  std::vector<FaultBehavior> behaviors = state.config.behaviors;
  behaviors.erase(behaviors.begin() + idx);
  SimConfig config(state.config.n - 1, state.config.f - 1, std::move(behaviors),
                   state.config.filter, state.config.schedule, state.config.region,
                   state.config.x0, state.config.iterations, state.config.seed);

  SystemState next(std::move(config), [&] {
    std::vector<QuadraticCost> costs = state.costs;
    costs.erase(costs.begin() + idx);
    return costs;
  }());
  next.stream_ids = state.stream_ids;
  next.stream_ids.erase(next.stream_ids.begin() + idx);
  return next;
}

Trajectory run_dgd(const SimConfig& config, std::span<const QuadraticCost> costs) {
  return run_dgd(SystemState(config, std::vector<QuadraticCost>(costs.begin(), costs.end())));
}

Trajectory run_dgd(const SystemState& state) {
  const SimConfig& config = state.config;
  const auto& costs = state.costs;

  const AgentSet honest = config.honest_agents();
  Trajectory trajectory;
  trajectory.x_reference = aggregate_minimizer(std::span<const QuadraticCost>(costs), honest);
  const Vector& x_ref = trajectory.x_reference;

  Vector x = config.x0;
  trajectory.records.reserve(config.iterations + 1);

  for (int t = 0; t <= config.iterations; ++t) {
    // Round t: every agent reports a gradient at x. Faulty randomness is a
    // pure function of (seed, agent stream id, round), so this evaluation
    // never perturbs another round's draws.
    std::vector<Vector> gradients(costs.size());
    for (std::size_t i = 0; i < costs.size(); ++i) {
      const Vector true_gradient = costs[i].gradient(x);
      const FaultBehavior& behavior = config.behaviors[i];
      switch (behavior.kind) {
        case FaultBehavior::Kind::honest:
          gradients[i] = true_gradient;
          break;
        case FaultBehavior::Kind::gradient_reverse:
          gradients[i] = -true_gradient;
          break;
        case FaultBehavior::Kind::gaussian_random: {
          CounterRng rng =
              CounterRng(agent_stream_key(config.seed, static_cast<int>(state.stream_ids[i])))
                  .at_round(t);
          Vector noise(true_gradient.size());
          for (Eigen::Index k = 0; k < noise.size(); ++k) {
            noise(k) = rng.next_gaussian(0.0, behavior.gaussian_std);
          }
          gradients[i] = noise;
          break;
        }
        case FaultBehavior::Kind::custom: {
          CounterRng rng =
              CounterRng(agent_stream_key(config.seed, static_cast<int>(state.stream_ids[i])))
                  .at_round(t);
          gradients[i] = behavior.custom_fn(x, true_gradient, t, rng);
          require_dimension(gradients[i], x.size(), "custom fault output");
          break;
        }
      }
    }

    GradientBundle bundle(std::move(gradients), config.f);
    const Vector direction = apply_filter(config.filter, bundle);

    double loss = 0.0;
    for (int id : honest) loss += costs[id - 1].value(x);

    TrajectoryRecord record;
    record.t = t;
    record.x = x;
    record.loss = loss;
    record.distance = (x - x_ref).norm();
    record.phi = phi(x, x_ref, direction);
    record.filter_output_norm = direction.norm();
    trajectory.records.push_back(std::move(record));

    if (t == config.iterations) break;
    x = project_box(x - config.schedule.at(t) * direction, config.region);
  }

  return trajectory;
}

}  // namespace bftopt
