#include "hsumma/broadcast.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace hsumma {

const char* to_string(BroadcastAlg alg) {
  switch (alg) {
    case BroadcastAlg::flat: return "flat";
    case BroadcastAlg::binomial: return "binomial";
    case BroadcastAlg::van_de_geijn: return "van-de-geijn";
  }
  return "?";
}

BroadcastAlg parse_broadcast_alg(const std::string& name) {
  std::string s = name;
  std::replace(s.begin(), s.end(), '_', '-');
  if (s == "flat") return BroadcastAlg::flat;
  if (s == "binomial") return BroadcastAlg::binomial;
  if (s == "van-de-geijn" || s == "vdg") return BroadcastAlg::van_de_geijn;
  throw std::invalid_argument("unknown broadcast algorithm: " + name);
}

namespace {

// Root sends the whole message to every other rank, one after another.
void build_flat(BroadcastSchedule& sched) {
  const int q = static_cast<int>(sched.participants.size());
  for (int i = 1; i < q; ++i) {
    SendEvent e;
    e.src = sched.participants[0];
    e.dst = sched.participants[i];
    e.size = sched.message_size;
    e.offset = 0;
    e.round = i - 1;
    sched.events.push_back(std::move(e));
  }
}

// Recursive doubling: in round r every informed rank i (index < 2^r) sends
// the whole message to index i + 2^r.  The informed set doubles each round.
void build_binomial(BroadcastSchedule& sched) {
  const int q = static_cast<int>(sched.participants.size());
  std::vector<int> recv_event(q, -1);
  int round = 0;
  for (int mask = 1; mask < q; mask <<= 1, ++round) {
    for (int i = 0; i < mask && i + mask < q; ++i) {
      SendEvent e;
      e.src = sched.participants[i];
      e.dst = sched.participants[i + mask];
      e.size = sched.message_size;
      e.offset = 0;
      e.round = round;
      if (recv_event[i] >= 0) e.deps.push_back(recv_event[i]);
      recv_event[i + mask] = static_cast<int>(sched.events.size());
      sched.events.push_back(std::move(e));
    }
  }
}

// Scatter the message as q near-equal chunks down a binomial tree, then shift
// chunks around a ring for q-1 steps until everyone holds all of them
// (allgather).  Ring sends whose receiver already holds the chunk -- the
// chunks it kept from its own scatter subtree -- are omitted, so every
// non-root rank receives exactly message_size elements and the total traffic
// is (q-1) * message_size, matching the flat and binomial schedules.
void build_van_de_geijn(BroadcastSchedule& sched) {
  const int q = static_cast<int>(sched.participants.size());
  if (q < 2) return;
  const std::int64_t m = sched.message_size;

  std::vector<std::int64_t> csize(q), coff(q);
  {
    const std::int64_t base = m / q, rem = m % q;
    std::int64_t off = 0;
    for (int k = 0; k < q; ++k) {
      csize[k] = base + (k < rem ? 1 : 0);
      coff[k] = off;
      off += csize[k];
    }
  }

  // held[i][k]: chunk k present at index i; acquire[i][k]: event that
  // delivered it (-1 when held from the start, i.e. at the root).
  std::vector<std::vector<char>> held(q, std::vector<char>(q, 0));
  std::vector<std::vector<int>> acquire(q, std::vector<int>(q, -1));
  std::vector<int> recv_event(q, -1);
  for (int k = 0; k < q; ++k) held[0][k] = 1;

  // Halving scatter over index segments [lo, hi); the owner keeps the lower
  // half and hands the upper half to its first index.
  struct Segment {
    int lo, hi;
  };
  std::vector<Segment> segs{{0, q}};
  int round = 0;
  for (;;) {
    bool split_any = false;
    std::vector<Segment> next;
    for (const Segment& s : segs) {
      const int size = s.hi - s.lo;
      if (size <= 1) {
        next.push_back(s);
        continue;
      }
      split_any = true;
      int half = 1;
      while (half * 2 < size) half *= 2;
      const int mid = s.lo + half;
      SendEvent e;
      e.src = sched.participants[s.lo];
      e.dst = sched.participants[mid];
      e.size = coff[s.hi - 1] + csize[s.hi - 1] - coff[mid];
      e.offset = coff[mid];
      e.round = round;
      if (recv_event[s.lo] >= 0) e.deps.push_back(recv_event[s.lo]);
      const int idx = static_cast<int>(sched.events.size());
      recv_event[mid] = idx;
      for (int k = mid; k < s.hi; ++k) {
        held[mid][k] = 1;
        acquire[mid][k] = idx;
      }
      sched.events.push_back(std::move(e));
      next.push_back({s.lo, mid});
      next.push_back({mid, s.hi});
    }
    segs = std::move(next);
    if (!split_any) break;
    ++round;
  }
  sched.scatter_rounds = round;

  // Ring allgather: at step s index j forwards chunk (j - s) mod q to j + 1.
  for (int s = 0; s < q - 1; ++s) {
    for (int j = 0; j < q; ++j) {
      const int c = ((j - s) % q + q) % q;
      const int dst = (j + 1) % q;
      assert(held[j][c]);
      if (held[dst][c]) continue;
      SendEvent e;
      e.src = sched.participants[j];
      e.dst = sched.participants[dst];
      e.size = csize[c];
      e.offset = coff[c];
      e.round = sched.scatter_rounds + s;
      if (acquire[j][c] >= 0) e.deps.push_back(acquire[j][c]);
      held[dst][c] = 1;
      acquire[dst][c] = static_cast<int>(sched.events.size());
      sched.events.push_back(std::move(e));
    }
  }
}

}  // namespace

BroadcastSchedule make_schedule(BroadcastAlg alg, int root,
                                const std::vector<int>& participants,
                                std::int64_t message_size) {
  if (participants.empty())
    throw std::invalid_argument("make_schedule: no participants");
  if (message_size < 0)
    throw std::invalid_argument("make_schedule: negative message size");
  {
    std::unordered_set<int> seen(participants.begin(), participants.end());
    if (seen.size() != participants.size())
      throw std::invalid_argument("make_schedule: duplicate participant");
  }
  const auto it = std::find(participants.begin(), participants.end(), root);
  if (it == participants.end())
    throw std::invalid_argument("make_schedule: root is not a participant");

  BroadcastSchedule sched;
  sched.message_size = message_size;
  // Rotate so the root leads; the cyclic order defines the ring.
  sched.participants.reserve(participants.size());
  sched.participants.insert(sched.participants.end(), it, participants.end());
  sched.participants.insert(sched.participants.end(), participants.begin(), it);

  switch (alg) {
    case BroadcastAlg::flat: build_flat(sched); break;
    case BroadcastAlg::binomial: build_binomial(sched); break;
    case BroadcastAlg::van_de_geijn: build_van_de_geijn(sched); break;
  }
  return sched;
}

namespace {

struct Path {
  double time = 0.0;
  double latency = 0.0;
  double bandwidth = 0.0;
  double compute = 0.0;
};

Path path_of(const RankClock& c) { return {c.time, c.latency, c.bandwidth, c.compute}; }

}  // namespace

ClockState simulate_schedule(const BroadcastSchedule& schedule,
                             const HockneyParams& params, ClockState clocks) {
  const int nranks = static_cast<int>(clocks.size());
  for (int r : schedule.participants)
    if (r < 0 || r >= nranks)
      throw std::invalid_argument("simulate_schedule: participant has no clock entry");

  std::vector<Path> done(schedule.events.size());
  std::unordered_map<int, Path> port;  // sender availability
  std::unordered_map<int, Path> last;  // latest completion a rank takes part in

  for (std::size_t idx = 0; idx < schedule.events.size(); ++idx) {
    const SendEvent& e = schedule.events[idx];
    if (e.src < 0 || e.src >= nranks || e.dst < 0 || e.dst >= nranks)
      throw std::invalid_argument("simulate_schedule: event rank has no clock entry");

    // Start when the sender's port frees, the receiver has entered the
    // broadcast, and all declared dependencies have completed.
    Path start = path_of(clocks[e.src]);
    if (auto p = port.find(e.src); p != port.end() && p->second.time > start.time)
      start = p->second;
    if (const Path d = path_of(clocks[e.dst]); d.time > start.time) start = d;
    for (int dep : e.deps) {
      if (dep < 0 || static_cast<std::size_t>(dep) >= idx)
        throw std::invalid_argument("simulate_schedule: dangling dependency index");
      if (done[dep].time > start.time) start = done[dep];
    }

    Path fin = start;
    fin.time += params.alpha + static_cast<double>(e.size) * params.beta;
    fin.latency += params.alpha;
    fin.bandwidth += static_cast<double>(e.size) * params.beta;
    done[idx] = fin;
    port[e.src] = fin;
    for (int r : {e.src, e.dst}) {
      auto [f, inserted] = last.try_emplace(r, fin);
      if (!inserted && fin.time > f->second.time) f->second = fin;
    }
  }

  for (const auto& [rank, p] : last) {
    if (p.time > clocks[rank].time)
      clocks[rank] = RankClock{p.time, p.latency, p.bandwidth, p.compute};
  }
  return clocks;
}

double max_time(const ClockState& clocks) {
  double t = 0.0;
  for (const RankClock& c : clocks) t = std::max(t, c.time);
  return t;
}

}  // namespace hsumma
