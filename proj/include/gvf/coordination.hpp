// Distributed coordination: consensus corrections and a lossy broadcast bus.
//
// Vehicles broadcast a scalar (circle phase or virtual coordinate) over a
// simulated bus with period, delivery delay and independent per-receiver
// Bernoulli drops.  Each receiver keeps the latest payload per sender.  The
// consensus corrections are computed from those received values and applied
// with zero-order hold between bus ticks:
//   - circle formations shift each vehicle's tracked level set, so a vehicle
//     commanded outward flies a longer lap and falls back;
//   - parametric formations add a rate correction to the virtual coordinate.
#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gvf/errors.hpp"
#include "gvf/geometry.hpp"

namespace gvf {

// Desired offset of vehicle b's coordination value relative to vehicle a's:
// offset = desired(value_b - value_a).  Edges are undirected; the reverse
// direction uses the negated offset, so antisymmetry holds by construction.
struct CommEdge {
  int a = 0;
  int b = 0;
  double offset = 0.0;
};

struct NeighborOffset {
  int id = 0;
  double offset = 0.0;  // desired(value_id - value_self)
};

struct CommGraph {
  int count = 0;  // vehicles are 0 .. count-1
  std::vector<CommEdge> edges;

  std::vector<NeighborOffset> neighbors(int id) const {
    std::vector<NeighborOffset> out;
    for (const auto& e : edges) {
      if (e.a == id) out.push_back({e.b, e.offset});
      if (e.b == id) out.push_back({e.a, -e.offset});
    }
    return out;
  }

  // Checks vertex ranges, connectivity, and that offsets are consistent
  // around every cycle (equivalently: they derive from per-vehicle
  // potentials).  Phase offsets compare modulo 2 pi, so set wrap_offsets for
  // angular values.
  void validate(bool wrap_offsets) const {
    if (count < 1) throw ValidationError("comm graph needs at least one vehicle");
    for (const auto& e : edges) {
      if (e.a < 0 || e.a >= count || e.b < 0 || e.b >= count)
        throw ValidationError("comm edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) +
                              ") references an unknown vehicle");
      if (e.a == e.b)
        throw ValidationError("comm edge connects vehicle " + std::to_string(e.a) + " to itself");
    }
    // BFS from vehicle 0 assigning potentials, then re-check every edge.
    std::vector<double> potential(count, 0.0);
    std::vector<bool> seen(count, false);
    std::vector<int> queue{0};
    seen[0] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      for (const auto& n : neighbors(v)) {
        if (seen[n.id]) continue;
        seen[n.id] = true;
        potential[n.id] = potential[v] + n.offset;
        queue.push_back(n.id);
      }
    }
    for (int v = 0; v < count; ++v)
      if (!seen[v])
        throw ValidationError("comm graph is not connected (vehicle " + std::to_string(v) +
                              " unreachable)");
    for (const auto& e : edges) {
      double err = potential[e.b] - potential[e.a] - e.offset;
      if (wrap_offsets) err = wrap_to_pi(err);
      if (std::abs(err) > 1.0e-9)
        throw ValidationError("comm graph offsets are inconsistent around a cycle through edge (" +
                              std::to_string(e.a) + ", " + std::to_string(e.b) + ")");
    }
  }
};

// One neighbor's contribution to a consensus sum: its last received value and
// the desired offset of that neighbor relative to the receiving vehicle.
struct NeighborSample {
  double value = 0.0;
  double offset = 0.0;
};

// Level-set offset for circle formations.  Positive output commands a larger
// ring (longer lap), so with phases that DECREASE along travel the sum
// produces a positive offset for the vehicle that runs ahead, which makes it
// fall back.  Callers that measure phase the other way (increasing along
// travel) must negate the result; the scenario runner does this from the
// field's direction gain.
inline double level_set_offset(double self_phase, const std::vector<NeighborSample>& neighbors,
                               double kc, double e_max) {
  if (kc <= 0.0) throw ValidationError("consensus gain kc must be positive");
  if (e_max <= 0.0) throw ValidationError("consensus clamp e_max must be positive");
  double sum = 0.0;
  for (const auto& n : neighbors) sum += wrap_to_pi(n.value - self_phase - n.offset);
  return clamp(kc * sum, -e_max, e_max);
}

// Virtual-coordinate rate correction for parametric formations; added to the
// commanded w rate.  w is unbounded, so no wrapping is applied.
inline double w_rate_correction(double self_w, const std::vector<NeighborSample>& neighbors,
                                double kc) {
  if (kc <= 0.0) throw ValidationError("consensus gain kc must be positive");
  double sum = 0.0;
  for (const auto& n : neighbors) sum += n.value - self_w - n.offset;
  return kc * sum;
}

struct BusConfig {
  double period = 0.1;            // broadcast interval [s]
  double delay = 0.0;             // delivery latency [s]
  double drop_probability = 0.0;  // per-receiver Bernoulli drop chance
  std::uint64_t seed = 0;

  void validate() const {
    if (period <= 0.0) throw ValidationError("bus period must be positive");
    if (delay < 0.0) throw ValidationError("bus delay must be nonnegative");
    if (drop_probability < 0.0 || drop_probability >= 1.0)
      throw ValidationError("bus drop probability must be in [0, 1)");
  }
};

struct BusMessage {
  int sender = 0;
  double value = 0.0;
  double sent_at = 0.0;
};

struct Delivery {
  int sender = 0;
  int receiver = 0;
  double value = 0.0;
  double sent_at = 0.0;
};

// Broadcast bus simulation.  Drop decisions come from one seeded stream
// consumed in (tick, sender, receiver) order, so a run is reproducible
// bit-for-bit.  Deliveries happen on the first tick at or after
// sent_at + delay; per (receiver, sender) only the newest payload is kept.
class MessageBus {
 public:
  MessageBus(const BusConfig& config, int vehicle_count,
             std::vector<std::vector<int>> receivers_of)
      : config_(config), receivers_of_(std::move(receivers_of)), rng_(config.seed),
        latest_(vehicle_count) {
    config_.validate();
  }

  static MessageBus for_graph(const BusConfig& config, const CommGraph& graph) {
    std::vector<std::vector<int>> receivers(graph.count);
    for (int v = 0; v < graph.count; ++v)
      for (const auto& n : graph.neighbors(v)) receivers[v].push_back(n.id);
    return MessageBus(config, graph.count, std::move(receivers));
  }

  // Enqueue this tick's broadcasts (callers pass them in sender order) and
  // return everything that comes due by `now`.
  std::vector<Delivery> tick(const std::vector<BusMessage>& outbox, double now) {
    for (const auto& msg : outbox) {
      for (int receiver : receivers_of_[msg.sender]) {
        const double u = (rng_() >> 11) * 0x1.0p-53;
        if (u < config_.drop_probability) {
          ++dropped_;
          continue;
        }
        in_flight_.push_back({msg.sender, receiver, msg.value, msg.sent_at});
      }
    }
    std::vector<Delivery> due;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < in_flight_.size(); ++i) {
      const Delivery& d = in_flight_[i];
      if (d.sent_at + config_.delay <= now + 1.0e-9) {
        due.push_back(d);
      } else {
        in_flight_[kept++] = in_flight_[i];
      }
    }
    in_flight_.resize(kept);
    for (const auto& d : due) {
      auto& slot = latest_[d.receiver];
      auto it = slot.find(d.sender);
      if (it == slot.end() || it->second.sent_at <= d.sent_at) slot[d.sender] = d;
      ++delivered_;
    }
    return due;
  }

  // Latest payload per sender, for one receiver.
  const std::map<int, Delivery>& latest(int receiver) const { return latest_[receiver]; }
  std::uint64_t delivered_count() const { return delivered_; }
  std::uint64_t dropped_count() const { return dropped_; }

 private:
  BusConfig config_;
  std::vector<std::vector<int>> receivers_of_;
  std::mt19937_64 rng_;
  std::vector<Delivery> in_flight_;
  std::vector<std::map<int, Delivery>> latest_;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
};

}  // namespace gvf
