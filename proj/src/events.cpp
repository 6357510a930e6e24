#include "algossip/events.hpp"

#include <numeric>

#include "algossip/errors.hpp"

namespace algossip {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::ALG: return "alg";
    case Variant::ALMG: return "almg";
    case Variant::ALBG: return "albg";
  }
  return "?";
}

EventDistribution::EventDistribution(std::vector<Event> outcomes, std::vector<double> probs)
    : outcomes_(std::move(outcomes)), probs_(std::move(probs)) {
  if (outcomes_.size() != probs_.size() || outcomes_.empty())
    throw DomainError("event distribution: outcome/probability size mismatch");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw DomainError("event distribution: negative probability");
    total += p;
  }
  if (!(total > 0.0)) throw DomainError("event distribution: zero total mass");
  for (double& p : probs_) p /= total;
  dist_ = std::discrete_distribution<std::size_t>(probs_.begin(), probs_.end());

  int max_node = -1, max_arc = -1;
  for (const auto& ev : outcomes_) {
    max_node = std::max(max_node, ev.node);
    max_arc = std::max(max_arc, ev.arc);
  }
  node_index_.assign(max_node + 1, -1);
  aux_index_.assign(std::max(max_node, max_arc) + 1, -1);
  for (std::size_t k = 0; k < outcomes_.size(); ++k) {
    const auto& ev = outcomes_[k];
    int idx = static_cast<int>(k);
    switch (ev.kind) {
      case EventKind::XUpdate:
      case EventKind::BGUpdate: node_index_[ev.node] = idx; break;
      case EventKind::YTransfer: aux_index_[ev.arc] = idx; break;
      case EventKind::MGBroadcast: aux_index_[ev.node] = idx; break;
      case EventKind::Void: void_index_ = idx; break;
    }
  }
}

int EventDistribution::index_of(const Event& ev) const {
  switch (ev.kind) {
    case EventKind::XUpdate:
    case EventKind::BGUpdate: return node_index_.at(ev.node);
    case EventKind::YTransfer: return aux_index_.at(ev.arc);
    case EventKind::MGBroadcast: return aux_index_.at(ev.node);
    case EventKind::Void:
      if (void_index_ >= 0) return void_index_;
      return aux_index_.at(ev.node);  // empty MG broadcast
  }
  return -1;
}

std::size_t EventDistribution::sample_index(Rng& rng) const { return dist_(rng); }

namespace {

std::vector<double> rates_or_ones(const std::vector<double>& rates, std::size_t n,
                                  const char* what) {
  if (rates.empty()) return std::vector<double>(n, 1.0);
  if (rates.size() != n) throw ConfigError(std::string("wrong number of clock rates"), what);
  for (double r : rates)
    if (!(r > 0.0)) throw ConfigError("clock rates must be positive", what);
  return rates;
}

}  // namespace

EventDistribution event_distribution(const Supergraph& g, const FailureModel& failures,
                                     const ClockModel& clocks) {
  const int n = g.num_nodes();
  if (failures.num_arcs() != g.num_arcs())
    throw ConfigError("failure model does not match the graph", "failures");
  std::vector<Event> outcomes;
  std::vector<double> probs;
  auto xr = rates_or_ones(clocks.x_rates, n, "x_rates");

  switch (clocks.variant) {
    case Variant::ALG: {
      auto yr = rates_or_ones(clocks.y_rates, g.num_arcs(), "y_rates");
      double total = std::accumulate(xr.begin(), xr.end(), 0.0) +
                     std::accumulate(yr.begin(), yr.end(), 0.0);
      double void_mass = 0.0;
      for (NodeId i = 0; i < n; ++i) {
        outcomes.push_back(Event::x_update(i));
        probs.push_back(xr[i] / total);
      }
      for (ArcId a = 0; a < g.num_arcs(); ++a) {
        outcomes.push_back(Event::y_transfer(a));
        probs.push_back(yr[a] / total * failures.success(a));
        void_mass += yr[a] / total * (1.0 - failures.success(a));
      }
      outcomes.push_back(Event::void_slot());
      probs.push_back(void_mass);
      break;
    }
    case Variant::ALMG: {
      auto yr = rates_or_ones(clocks.y_rates, n, "y_rates");
      double total = std::accumulate(xr.begin(), xr.end(), 0.0) +
                     std::accumulate(yr.begin(), yr.end(), 0.0);
      for (NodeId i = 0; i < n; ++i) {
        outcomes.push_back(Event::x_update(i));
        probs.push_back(xr[i] / total);
      }
      for (NodeId i = 0; i < n; ++i) {
        outcomes.push_back(Event{EventKind::MGBroadcast, i, -1, {}});
        probs.push_back(yr[i] / total);
      }
      break;
    }
    case Variant::ALBG: {
      double total = std::accumulate(xr.begin(), xr.end(), 0.0);
      for (NodeId i = 0; i < n; ++i) {
        outcomes.push_back(Event::bg_update(i));
        probs.push_back(xr[i] / total);
      }
      break;
    }
  }
  return EventDistribution(std::move(outcomes), std::move(probs));
}

std::vector<ArcId> sample_mg_receivers(NodeId i, const Supergraph& g, const FailureModel& failures,
                                       Rng& rng) {
  std::vector<ArcId> got;
  const auto& arcs = g.out_arcs(i);
  if (failures.mode() == FailureMode::AlwaysOn) return arcs;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (ArcId a : arcs)
    if (unit(rng) < failures.success(a)) got.push_back(a);
  return got;
}

Event sample_event(const EventDistribution& dist, const Supergraph& g,
                   const FailureModel& failures, Rng& rng) {
  Event ev = dist.outcomes()[dist.sample_index(rng)];
  if (ev.kind == EventKind::MGBroadcast) {
    ev.receivers = sample_mg_receivers(ev.node, g, failures, rng);
    if (ev.receivers.empty()) ev.kind = EventKind::Void;
  }
  return ev;
}

}  // namespace algossip
