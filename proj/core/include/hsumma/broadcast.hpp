#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsumma/hockney.hpp"

namespace hsumma {

enum class BroadcastAlg {
  flat,          // root sends the full message to each rank in turn
  binomial,      // recursive doubling tree
  van_de_geijn,  // binomial scatter followed by a ring allgather
};

const char* to_string(BroadcastAlg alg);
BroadcastAlg parse_broadcast_alg(const std::string& name);

// One point-to-point transfer.  `offset`/`size` locate the payload inside the
// broadcast message [0, m), so a schedule can be audited for validity (a rank
// may only forward data it has already received).  `deps` lists indices of
// earlier events in the same schedule that must complete before this one may
// start; `round` records the generation round for diagnostics.
struct SendEvent {
  int src = 0;
  int dst = 0;
  std::int64_t size = 0;
  std::int64_t offset = 0;
  int round = 0;
  std::vector<int> deps;
};

// An explicit one-to-all broadcast plan over `participants` (root first).
// Events are topologically ordered: every dependency index precedes its
// dependent.  For van de Geijn schedules the first scatter_rounds rounds are
// the scatter phase and the remaining rounds are the ring allgather.
struct BroadcastSchedule {
  std::vector<int> participants;
  std::int64_t message_size = 0;
  int scatter_rounds = 0;
  std::vector<SendEvent> events;

  int root() const { return participants.front(); }
};

// Builds the schedule for broadcasting `message_size` elements from `root`
// over `participants` (any order; the root must be a member).  Throws
// std::invalid_argument on an empty or duplicated participant list, a root
// that is not a participant, or a negative message size.
BroadcastSchedule make_schedule(BroadcastAlg alg, int root,
                                const std::vector<int>& participants,
                                std::int64_t message_size);

// Simulated state of one rank.  `time` is the rank's clock in seconds;
// latency/bandwidth/compute decompose the chain of events that produced that
// clock value (alpha, size*beta and gamma shares along the realizing path),
// so time == latency + bandwidth + compute whenever the clock started at 0.
struct RankClock {
  double time = 0.0;
  double latency = 0.0;
  double bandwidth = 0.0;
  double compute = 0.0;
};

using ClockState = std::vector<RankClock>;

// Replays a schedule against per-rank clocks under the Hockney model and
// returns the advanced clocks.  An event starts once (a) all of its declared
// dependencies have completed, (b) the sender's port is free (a rank's sends
// are serialized in schedule order), and (c) the receiver has entered the
// broadcast (its clock value at the start of the replay).  It completes
// alpha + size * beta later.  Receiving is passive: links are full duplex, so
// an incoming transfer does not block a rank's own sends.  A rank's final
// clock is the completion time of the last event it takes part in.
//
// Throws std::invalid_argument on an event rank without a clock entry or a
// dependency index that does not point to an earlier event.
ClockState simulate_schedule(const BroadcastSchedule& schedule,
                             const HockneyParams& params, ClockState clocks);

double max_time(const ClockState& clocks);

}  // namespace hsumma
