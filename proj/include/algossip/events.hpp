#pragma once

#include <random>
#include <string>
#include <vector>

#include "algossip/graph.hpp"
#include "algossip/types.hpp"

namespace algossip {

enum class Variant { ALG, ALMG, ALBG };

std::string to_string(Variant v);

enum class EventKind { XUpdate, YTransfer, MGBroadcast, BGUpdate, Void };

/// Outcome of one fast-time-scale slot.
///
/// XUpdate/BGUpdate/MGBroadcast use `node`; YTransfer uses `arc`. For an
/// MGBroadcast, `receivers` lists the arcs (node, j) whose transmission got
/// through; an empty receiver set is reported as Void with `node` set.
struct Event {
  EventKind kind = EventKind::Void;
  NodeId node = -1;
  ArcId arc = -1;
  std::vector<ArcId> receivers;

  static Event x_update(NodeId i) { return {EventKind::XUpdate, i, -1, {}}; }
  static Event y_transfer(ArcId a) { return {EventKind::YTransfer, -1, a, {}}; }
  static Event bg_update(NodeId i) { return {EventKind::BGUpdate, i, -1, {}}; }
  static Event void_slot(NodeId i = -1, ArcId a = -1) { return {EventKind::Void, i, a, {}}; }

  bool operator==(const Event&) const = default;
};

/// Poisson clock rates. ALG has one x-clock per node and one y-clock per arc;
/// ALMG has an x-clock and a broadcast clock per node; ALBG one clock per node.
/// Empty rate vectors mean "all equal".
struct ClockModel {
  Variant variant = Variant::ALG;
  std::vector<double> x_rates;
  std::vector<double> y_rates;

  static ClockModel equal(Variant v) { return ClockModel{v, {}, {}}; }
};

/// Categorical law of the slot outcome.
///
/// For ALG the outcomes are XUpdate(i), YTransfer(a) and a single Void
/// outcome. For ALMG and ALBG the outcomes are the clock winners
/// (XUpdate/MGBroadcast or BGUpdate); the MG receiver subset is drawn
/// afterwards by sample_mg_receivers. Probabilities sum to one.
class EventDistribution {
 public:
  EventDistribution(std::vector<Event> outcomes, std::vector<double> probs);

  const std::vector<Event>& outcomes() const { return outcomes_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return outcomes_.size(); }
  /// Index of the Void outcome, or -1 when there is none.
  int void_index() const { return void_index_; }
  /// Index of the outcome an event maps to (receivers ignored).
  int index_of(const Event& ev) const;

  std::size_t sample_index(Rng& rng) const;

 private:
  std::vector<Event> outcomes_;
  std::vector<double> probs_;
  mutable std::discrete_distribution<std::size_t> dist_;
  int void_index_ = -1;
  std::vector<int> node_index_;  // node -> outcome (XUpdate/BGUpdate)
  std::vector<int> aux_index_;   // arc -> YTransfer outcome, or node -> MGBroadcast
};

EventDistribution event_distribution(const Supergraph& g, const FailureModel& failures,
                                     const ClockModel& clocks);

/// Receiver arcs of a broadcast by node i; each out-arc is included
/// independently with its success probability (FailureModel only represents
/// spatially independent arcs).
std::vector<ArcId> sample_mg_receivers(NodeId i, const Supergraph& g, const FailureModel& failures,
                                       Rng& rng);

/// Draws the next slot. For ALMG a clock win by a broadcast clock is resolved
/// into MGBroadcast (non-empty receivers) or Void.
Event sample_event(const EventDistribution& dist, const Supergraph& g,
                   const FailureModel& failures, Rng& rng);

}  // namespace algossip
