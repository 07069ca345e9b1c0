#include "hsumma/simulator.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace hsumma {

namespace {

void validate_inputs(const DistMatrix& a, const DistMatrix& b, const SimConfig& cfg,
                     bool hierarchical) {
  const GridSpec& grid = cfg.grid.base;
  if (cfg.n < 1) throw std::invalid_argument("simulator: n must be >= 1");
  if (a.layout.n != cfg.n || b.layout.n != cfg.n)
    throw std::invalid_argument("simulator: operand size does not match config");
  if (!(a.layout.grid == grid) || !(b.layout.grid == grid))
    throw std::invalid_argument("simulator: operand grid does not match config");
  if (a.tiles.size() != static_cast<std::size_t>(grid.size()) ||
      b.tiles.size() != static_cast<std::size_t>(grid.size()))
    throw std::invalid_argument("simulator: operand tile count does not match grid");
  const int tr = cfg.n / grid.rows;
  const int tc = cfg.n / grid.cols;
  if (cfg.block_inner < 1)
    throw std::invalid_argument("simulator: inner block must be >= 1");
  if (tr % cfg.block_inner != 0 || tc % cfg.block_inner != 0)
    throw std::invalid_argument("simulator: inner block must divide both tile sides");
  if (hierarchical) {
    if (cfg.block_outer < cfg.block_inner || cfg.block_outer % cfg.block_inner != 0)
      throw std::invalid_argument(
          "simulator: outer block must be a multiple of the inner block");
    if (tr % cfg.block_outer != 0 || tc % cfg.block_outer != 0)
      throw std::invalid_argument("simulator: outer block must divide both tile sides");
    if (cfg.grid.group_rows < 1 || cfg.grid.group_cols < 1 ||
        grid.rows % cfg.grid.group_rows != 0 || grid.cols % cfg.grid.group_cols != 0)
      throw std::invalid_argument("simulator: grouping does not divide the grid");
  }
}

// Shared machinery of the flat and two-level runs: per-rank clocks with
// per-phase accounting, event recording, and the local update kernel.
//
// Data placement is handled separately from timing: the update kernel reads
// panels straight out of the owner's tile (the values a real broadcast would
// have delivered), while the clocks advance according to the explicit
// broadcast schedules.  This keeps the numerics bit-reproducible regardless
// of the communication algorithm under study.
struct Engine {
  const SimConfig& cfg;
  const DistMatrix& A;
  const DistMatrix& B;
  GridSpec grid;
  int trows, tcols;
  DistMatrix C;
  ClockState clocks;
  std::vector<double> comm_acc, between_acc, within_acc, compute_acc;
  std::vector<double> before;  // clock snapshot at phase entry
  SimMetrics metrics;

  Engine(const DistMatrix& a, const DistMatrix& b, const SimConfig& config)
      : cfg(config), A(a), B(b), grid(config.grid.base) {
    trows = cfg.n / grid.rows;
    tcols = cfg.n / grid.cols;
    const int p = grid.size();
    C.layout = a.layout;
    C.tiles.assign(p, Matrix(trows, tcols));
    clocks.assign(p, RankClock{});
    comm_acc.assign(p, 0.0);
    between_acc.assign(p, 0.0);
    within_acc.assign(p, 0.0);
    compute_acc.assign(p, 0.0);
    before.assign(p, 0.0);
    metrics.steps.assign(cfg.n / cfg.block_inner, StepMetrics{});
    for (std::size_t i = 0; i < metrics.steps.size(); ++i)
      metrics.steps[i].step = static_cast<int>(i);
  }

  // Replays one communication phase (a set of broadcasts over disjoint
  // participant sets) against the shared clocks and accounts the per-rank
  // advances to the step and to the between/within totals.
  void apply_phase(const std::vector<BroadcastSchedule>& comms, bool between, int step) {
    const int p = grid.size();
    for (int r = 0; r < p; ++r) before[r] = clocks[r].time;
    std::uint64_t msgs = 0, volume = 0;
    for (const BroadcastSchedule& sched : comms) {
      for (const SendEvent& e : sched.events) {
        ++msgs;
        volume += static_cast<std::uint64_t>(e.size);
        if (cfg.record_events)
          metrics.events.push_back(SimEventRecord{step, between, e.src, e.dst, e.size});
      }
      clocks = simulate_schedule(sched, cfg.params, std::move(clocks));
    }
    double max_advance = 0.0;
    for (int r = 0; r < p; ++r) {
      const double d = clocks[r].time - before[r];
      comm_acc[r] += d;
      (between ? between_acc : within_acc)[r] += d;
      if (d > max_advance) max_advance = d;
    }
    StepMetrics& sm = metrics.steps[step];
    if (between) {
      sm.comm_between_s += max_advance;
      sm.msgs_between += msgs;
      sm.volume_between += volume;
      metrics.msgs_between += msgs;
      metrics.volume_between += volume;
    } else {
      sm.comm_within_s += max_advance;
      sm.msgs_within += msgs;
      sm.volume_within += volume;
      metrics.msgs_within += msgs;
      metrics.volume_within += volume;
    }
    metrics.msg_count += msgs;
    metrics.volume_elems += volume;
  }

  // Rank-`width` update C += A[:, ak:ak+width] * B[bk:bk+width, :] on every
  // tile, plus the uniform gamma charge.  Panels are read from the owning
  // tiles; alignment guarantees each panel lives inside a single tile.
  void local_update(int ak, int bk, int width, int step) {
    const int aco = ak / tcols, alo = ak % tcols;
    const int bro = bk / trows, blo = bk % trows;
    assert(alo + width <= tcols && blo + width <= trows);
    const int p = grid.size();
    for (int rank = 0; rank < p; ++rank) {
      const int gr = grid.row_of(rank), gc = grid.col_of(rank);
      const Matrix& atile = A.tiles[grid.rank_of(gr, aco)];
      const Matrix& btile = B.tiles[grid.rank_of(bro, gc)];
      Matrix& ctile = C.tiles[rank];
      for (int i = 0; i < trows; ++i) {
        double* crow = ctile.row(i);
        for (int k = 0; k < width; ++k) {
          const double av = atile(i, alo + k);
          const double* brow = btile.row(blo + k);
          for (int j = 0; j < tcols; ++j) crow[j] += av * brow[j];
        }
      }
    }
    const double seconds = static_cast<double>(trows) * tcols * width * cfg.params.gamma;
    for (int rank = 0; rank < p; ++rank) {
      clocks[rank].time += seconds;
      clocks[rank].compute += seconds;
      compute_acc[rank] += seconds;
    }
    metrics.steps[step].compute_s += seconds;
  }

  std::pair<DistMatrix, SimMetrics> finish() {
    const int p = grid.size();
    int critical = 0;
    for (int r = 0; r < p; ++r) {
      if (clocks[r].time > clocks[critical].time) critical = r;
      metrics.comm_time_s = std::max(metrics.comm_time_s, comm_acc[r]);
      metrics.comm_between_s = std::max(metrics.comm_between_s, between_acc[r]);
      metrics.comm_within_s = std::max(metrics.comm_within_s, within_acc[r]);
      metrics.compute_time_s = std::max(metrics.compute_time_s, compute_acc[r]);
    }
    metrics.makespan_s = clocks[critical].time;
    metrics.critical_latency_s = clocks[critical].latency;
    metrics.critical_bandwidth_s = clocks[critical].bandwidth;
    metrics.critical_compute_s = clocks[critical].compute;
    return {std::move(C), std::move(metrics)};
  }
};

}  // namespace

std::pair<DistMatrix, SimMetrics> run_summa(const DistMatrix& a, const DistMatrix& b,
                                            const SimConfig& cfg) {
  validate_inputs(a, b, cfg, /*hierarchical=*/false);
  Engine eng(a, b, cfg);
  const GridSpec& grid = eng.grid;
  const int s = grid.rows, t = grid.cols;
  const int bw = cfg.block_inner;
  const int steps = cfg.n / bw;

  std::vector<BroadcastSchedule> comms;
  for (int k = 0; k < steps; ++k) {
    const int g = k * bw;

    // Width-b column panel of A travels along each grid row.
    const int aco = g / eng.tcols;
    comms.clear();
    for (int gr = 0; gr < s; ++gr) {
      std::vector<int> parts(t);
      for (int c = 0; c < t; ++c) parts[c] = grid.rank_of(gr, c);
      comms.push_back(make_schedule(cfg.alg, grid.rank_of(gr, aco), parts,
                                    static_cast<std::int64_t>(eng.trows) * bw));
    }
    eng.apply_phase(comms, /*between=*/false, k);

    // Width-b row panel of B travels along each grid column.
    const int bro = g / eng.trows;
    comms.clear();
    for (int gc = 0; gc < t; ++gc) {
      std::vector<int> parts(s);
      for (int r = 0; r < s; ++r) parts[r] = grid.rank_of(r, gc);
      comms.push_back(make_schedule(cfg.alg, grid.rank_of(bro, gc), parts,
                                    static_cast<std::int64_t>(bw) * eng.tcols));
    }
    eng.apply_phase(comms, /*between=*/false, k);

    // pivot_skew shifts only A's panel, so the two operands genuinely
    // desynchronize instead of a joint rotation that would still sum over
    // every k.
    const int shift = ((cfg.pivot_skew * bw) % cfg.n + cfg.n) % cfg.n;
    eng.local_update((g + shift) % cfg.n, g, bw, k);
  }
  return eng.finish();
}

std::pair<DistMatrix, SimMetrics> run_hsumma(const DistMatrix& a, const DistMatrix& b,
                                             const SimConfig& cfg) {
  validate_inputs(a, b, cfg, /*hierarchical=*/true);
  Engine eng(a, b, cfg);
  const GridSpec& grid = eng.grid;
  const GroupedGridSpec& gg = cfg.grid;
  const int s = grid.rows, t = grid.cols;
  const int si = gg.inner_rows(), tj = gg.inner_cols();
  const int bw = cfg.block_inner, BW = cfg.block_outer;
  const int inner_per_outer = BW / bw;
  const int outer_steps = cfg.n / BW;

  std::vector<BroadcastSchedule> comms;
  for (int kk = 0; kk < outer_steps; ++kk) {
    const int g_outer = kk * BW;
    const int first_step = kk * inner_per_outer;

    // Owner coordinates of the outer panels: grid column aco holds the A
    // panel, grid row bro holds the B panel; (aj, ai) are their positions
    // inside their groups.
    const int aco = g_outer / eng.tcols;
    const int aj = aco % tj;
    const int bro = g_outer / eng.trows;
    const int ai = bro % si;

    // Between groups: the width-B panel of A moves along each grid row,
    // between the ranks occupying column position aj of every group.
    comms.clear();
    for (int r = 0; r < s; ++r) {
      std::vector<int> parts(gg.group_cols);
      for (int z = 0; z < gg.group_cols; ++z) parts[z] = grid.rank_of(r, z * tj + aj);
      comms.push_back(make_schedule(cfg.alg, grid.rank_of(r, aco), parts,
                                    static_cast<std::int64_t>(eng.trows) * BW));
    }
    eng.apply_phase(comms, /*between=*/true, first_step);

    // Between groups: the width-B panel of B moves along each grid column.
    comms.clear();
    for (int c = 0; c < t; ++c) {
      std::vector<int> parts(gg.group_rows);
      for (int z = 0; z < gg.group_rows; ++z) parts[z] = grid.rank_of(z * si + ai, c);
      comms.push_back(make_schedule(cfg.alg, grid.rank_of(bro, c), parts,
                                    static_cast<std::int64_t>(BW) * eng.tcols));
    }
    eng.apply_phase(comms, /*between=*/true, first_step);

    for (int it = 0; it < inner_per_outer; ++it) {
      const int step = first_step + it;
      const int g = g_outer + it * bw;

      // Within each group: width-b slices of the A panel move along group
      // rows from the holder at column position aj.
      comms.clear();
      for (int gx = 0; gx < gg.group_rows; ++gx) {
        for (int gy = 0; gy < gg.group_cols; ++gy) {
          for (int i = 0; i < si; ++i) {
            const int r = gx * si + i;
            std::vector<int> parts(tj);
            for (int j = 0; j < tj; ++j) parts[j] = grid.rank_of(r, gy * tj + j);
            comms.push_back(make_schedule(cfg.alg, grid.rank_of(r, gy * tj + aj), parts,
                                          static_cast<std::int64_t>(eng.trows) * bw));
          }
        }
      }
      eng.apply_phase(comms, /*between=*/false, step);

      // Within each group: width-b slices of the B panel move along group
      // columns from the holder at row position ai.
      comms.clear();
      for (int gx = 0; gx < gg.group_rows; ++gx) {
        for (int gy = 0; gy < gg.group_cols; ++gy) {
          for (int j = 0; j < tj; ++j) {
            const int c = gy * tj + j;
            std::vector<int> parts(si);
            for (int i = 0; i < si; ++i) parts[i] = grid.rank_of(gx * si + i, c);
            comms.push_back(make_schedule(cfg.alg, grid.rank_of(gx * si + ai, c), parts,
                                          static_cast<std::int64_t>(bw) * eng.tcols));
          }
        }
      }
      eng.apply_phase(comms, /*between=*/false, step);

      const int shift = ((cfg.pivot_skew * bw) % cfg.n + cfg.n) % cfg.n;
      eng.local_update((g + shift) % cfg.n, g, bw, step);
    }
  }
  return eng.finish();
}

ModelComparison measured_vs_model(const SimMetrics& metrics, const CostBreakdown& model) {
  auto rel = [](double sim, double mod) {
    if (mod != 0.0) return std::abs(sim - mod) / std::abs(mod);
    return sim == 0.0 ? 0.0 : INFINITY;
  };
  ModelComparison cmp;
  cmp.comm_sim = metrics.comm_time_s;
  cmp.comm_model = model.latency_s + model.bandwidth_s;
  cmp.comm_rel_dev = rel(cmp.comm_sim, cmp.comm_model);
  cmp.compute_sim = metrics.compute_time_s;
  cmp.compute_model = model.compute_s;
  cmp.compute_rel_dev = rel(cmp.compute_sim, cmp.compute_model);
  cmp.total_sim = metrics.makespan_s;
  cmp.total_model = model.total_s();
  cmp.total_rel_dev = rel(cmp.total_sim, cmp.total_model);
  return cmp;
}

}  // namespace hsumma
