#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hsumma/broadcast.hpp"
#include "hsumma/cost_model.hpp"
#include "hsumma/grid.hpp"
#include "hsumma/hockney.hpp"

namespace hsumma {

// Configuration for a simulated run.  The grouping carries the processor
// grid; for the flat algorithm the grouping is ignored (treated as 1 x 1).
// block_inner (b) is the broadcast width inside a group, block_outer (B) the
// width between groups; b must divide B and B must divide both tile sides.
struct SimConfig {
  int n = 0;
  GroupedGridSpec grid;
  int block_inner = 1;
  int block_outer = 1;
  BroadcastAlg alg = BroadcastAlg::binomial;
  HockneyParams params;
  bool record_events = true;
  // Fault injection for validation tests: shifts the A-panel offset used by
  // the local update by this many inner blocks (mod n), desynchronizing it
  // from the B panel.  Any nonzero value makes the product verifiably wrong
  // while the communication schedule stays legal.
  int pivot_skew = 0;
};

// One recorded transfer, tagged with the flat step index and the broadcast
// level it belongs to.
struct SimEventRecord {
  int step = 0;
  bool between_groups = false;
  int src = 0;
  int dst = 0;
  std::int64_t size = 0;

  bool operator==(const SimEventRecord&) const = default;
};

// Per-step timing: the largest per-rank clock advance in each communication
// phase of the step, message/volume tallies, and the compute charge.
struct StepMetrics {
  int step = 0;
  double comm_between_s = 0.0;
  double comm_within_s = 0.0;
  double compute_s = 0.0;
  std::uint64_t msgs_between = 0;
  std::uint64_t msgs_within = 0;
  std::uint64_t volume_between = 0;
  std::uint64_t volume_within = 0;
};

struct SimMetrics {
  double makespan_s = 0.0;
  // Maxima over ranks of accumulated per-rank phase times (waiting included),
  // so comm_time_s + compute_time_s >= makespan_s >= max(comm, compute).
  double comm_time_s = 0.0;
  double compute_time_s = 0.0;
  double comm_between_s = 0.0;
  double comm_within_s = 0.0;
  // alpha/beta/gamma decomposition of the chain of events that produced the
  // makespan; the three sum to makespan_s.
  double critical_latency_s = 0.0;
  double critical_bandwidth_s = 0.0;
  double critical_compute_s = 0.0;
  std::uint64_t msg_count = 0;
  std::uint64_t volume_elems = 0;
  std::uint64_t msgs_between = 0;
  std::uint64_t msgs_within = 0;
  std::uint64_t volume_between = 0;
  std::uint64_t volume_within = 0;
  std::vector<StepMetrics> steps;
  std::vector<SimEventRecord> events;  // filled when record_events
};

// Simulated flat multiplication: n/b steps, each broadcasting a width-b
// column panel of A along grid rows and a width-b row panel of B along grid
// columns, followed by the local rank-b update.  Returns the distributed
// product and the timing metrics.  The grouping in cfg is ignored.
std::pair<DistMatrix, SimMetrics> run_summa(const DistMatrix& a, const DistMatrix& b,
                                            const SimConfig& cfg);

// Simulated two-level multiplication: n/B outer steps broadcast width-B
// panels between groups (over the ranks holding the same position in each
// group), and each outer step runs B/b inner steps broadcasting width-b
// slices within every group before the local update.  With a 1 x 1 grouping
// this reduces to run_summa event for event.
std::pair<DistMatrix, SimMetrics> run_hsumma(const DistMatrix& a, const DistMatrix& b,
                                             const SimConfig& cfg);

// Side-by-side comparison of simulated metrics and a closed-form prediction.
struct ModelComparison {
  double comm_sim = 0.0;
  double comm_model = 0.0;
  double comm_rel_dev = 0.0;
  double compute_sim = 0.0;
  double compute_model = 0.0;
  double compute_rel_dev = 0.0;
  double total_sim = 0.0;
  double total_model = 0.0;
  double total_rel_dev = 0.0;
};

ModelComparison measured_vs_model(const SimMetrics& metrics, const CostBreakdown& model);

}  // namespace hsumma
