// End-to-end acceptance suite: one line per criterion, nonzero exit if any
// fails.  Library criteria run in-process; the CLI criteria spawn the real
// binary (path injected via HSUMMA_CLI_PATH).

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hsumma/broadcast.hpp"
#include "hsumma/cost_model.hpp"
#include "hsumma/grid.hpp"
#include "hsumma/matrix.hpp"
#include "hsumma/presets.hpp"
#include "hsumma/simulator.hpp"

using namespace hsumma;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string run_binary(const std::string& args, int* exit_code) {
  const std::string cmd = std::string(HSUMMA_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    *exit_code = -1;
    return out;
  }
  std::array<char, 4096> buf;
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  *exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

bool rel_close(double a, double b, double tol) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

std::vector<int> divisors(int v) {
  std::vector<int> out;
  for (int d = 1; d <= v; ++d)
    if (v % d == 0) out.push_back(d);
  return out;
}

// --- 1: simulated output vs triple loop over the full admissible grid --------

void criterion_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  long configs = 0;
  std::string first_bad;

  for (int n : {8, 16, 64, 256}) {
    Matrix ga(n, n), gb(n, n);
    fill_uniform(ga, 7);
    fill_uniform(gb, 8);
    const Matrix want = reference_multiply(ga, gb);

    for (int p : {1, 4, 16, 64}) {
      const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(p))));
      if (n % side != 0) continue;
      const int tile = n / side;
      const GridSpec grid = make_grid(side, side);
      const BlockLayout lay = make_block_layout(n, 1, grid);
      const DistMatrix da = scatter_matrix(ga, lay);
      const DistMatrix db = scatter_matrix(gb, lay);

      for (auto alg : {BroadcastAlg::flat, BroadcastAlg::binomial, BroadcastAlg::van_de_geijn}) {
        for (int b : divisors(tile)) {
          SimConfig cfg;
          cfg.n = n;
          cfg.grid = make_grouped_grid(grid, 1, 1);
          cfg.block_inner = b;
          cfg.block_outer = b;
          cfg.alg = alg;
          cfg.params = {1e-4, 1e-9, 0.0};
          cfg.record_events = false;

          const double flat_err =
              relative_frobenius_error(gather_matrix(run_summa(da, db, cfg).first), want);
          ++configs;
          if (flat_err > worst) worst = flat_err;
          if (flat_err > 1e-10 && first_bad.empty())
            first_bad = "summa n=" + std::to_string(n) + " p=" + std::to_string(p) +
                        " b=" + std::to_string(b);

          for (int B = b; B <= tile; B += b) {
            if (tile % B != 0) continue;
            for (int gside : divisors(side)) {
              cfg.block_outer = B;
              cfg.grid = make_grouped_grid(grid, gside, gside);
              const double err = relative_frobenius_error(
                  gather_matrix(run_hsumma(da, db, cfg).first), want);
              ++configs;
              if (err > worst) worst = err;
              if (err > 1e-10 && first_bad.empty())
                first_bad = "hsumma n=" + std::to_string(n) + " p=" + std::to_string(p) +
                            " b=" + std::to_string(b) + " B=" + std::to_string(B) +
                            " G=" + std::to_string(gside * gside);
            }
          }
        }
      }
    }
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char detail[256];
  std::snprintf(detail, sizeof detail,
                "%ld configurations, worst relative error %.3g, %.1f s%s%s", configs, worst,
                secs, first_bad.empty() ? "" : ", first failure ", first_bad.c_str());
  report(1, "simulated products match the reference", worst <= 1e-10 && secs < 120.0, detail);
}

// --- 2: replayed broadcast makespans vs closed forms --------------------------

void criterion_schedule_formulas() {
  const HockneyParams hp{3e-6, 1e-9, 0.0};
  double worst = 0.0;
  for (int q : {2, 4, 8, 16, 32}) {
    for (std::int64_t m : {static_cast<std::int64_t>(32), static_cast<std::int64_t>(4800),
                           static_cast<std::int64_t>(64000)}) {
      if (m % q != 0) continue;
      std::vector<int> parts(q);
      for (int i = 0; i < q; ++i) parts[i] = i;
      const double logq = std::log2(static_cast<double>(q));

      const double tree = max_time(simulate_schedule(
          make_schedule(BroadcastAlg::binomial, 0, parts, m), hp, ClockState(q)));
      const double tree_want = logq * (hp.alpha + static_cast<double>(m) * hp.beta);
      worst = std::max(worst, std::abs(tree - tree_want) / tree_want);

      const double pipe = max_time(simulate_schedule(
          make_schedule(BroadcastAlg::van_de_geijn, 0, parts, m), hp, ClockState(q)));
      const double pipe_want = (logq + q - 1) * hp.alpha +
                               2.0 * (q - 1) / q * static_cast<double>(m) * hp.beta;
      worst = std::max(worst, std::abs(pipe - pipe_want) / pipe_want);
    }
  }
  char detail[128];
  std::snprintf(detail, sizeof detail,
                "q in {2..32}, three message sizes, worst relative deviation %.3g", worst);
  report(2, "replayed broadcasts match the closed forms", worst <= 1e-9, detail);
}

// --- 3: one group / p groups degenerate to the flat algorithm -----------------

void criterion_degeneracy() {
  bool ok = true;
  std::string why;

  const ModelProblem prob = make_model_problem(64, 16, 4, 4);
  const HockneyParams hp{0.5, 0.25, 0.125};
  for (auto alg : {BroadcastAlg::flat, BroadcastAlg::binomial, BroadcastAlg::van_de_geijn}) {
    const BcastCostModel model = bcast_cost_model(alg);
    const CostBreakdown flat_cost = summa_comm_cost(prob, hp, model);
    if (hsumma_comm_cost(prob, hp, model, 1.0).total_s() != flat_cost.total_s()) {
      ok = false;
      why = "cost mismatch at G=1";
    }
    if (hsumma_comm_cost(prob, hp, model, 16.0).total_s() != flat_cost.total_s()) {
      ok = false;
      why = "cost mismatch at G=p";
    }
  }

  long events_checked = 0;
  for (auto alg : {BroadcastAlg::binomial, BroadcastAlg::van_de_geijn}) {
    for (int B : {4, 8}) {
      const int n = 32;
      const GridSpec grid = make_grid(4, 4);
      const BlockLayout lay = make_block_layout(n, 4, grid);
      Matrix ga(n, n), gb(n, n);
      fill_uniform(ga, 3);
      fill_uniform(gb, 4);
      const DistMatrix da = scatter_matrix(ga, lay);
      const DistMatrix db = scatter_matrix(gb, lay);

      SimConfig cfg;
      cfg.n = n;
      cfg.grid = make_grouped_grid(grid, 1, 1);
      cfg.block_inner = 4;
      cfg.block_outer = B;
      cfg.alg = alg;
      cfg.params = {1e-4, 1e-9, 1e-9};

      const auto [c1, m1] = run_summa(da, db, cfg);
      const auto [c2, m2] = run_hsumma(da, db, cfg);
      if (m1.makespan_s != m2.makespan_s || m1.msg_count != m2.msg_count ||
          m1.volume_elems != m2.volume_elems || m1.events.size() != m2.events.size()) {
        ok = false;
        why = "metrics mismatch at G=1";
        continue;
      }
      for (std::size_t i = 0; i < m1.events.size(); ++i) {
        ++events_checked;
        if (!(m1.events[i] == m2.events[i])) {
          ok = false;
          why = "event mismatch at index " + std::to_string(i);
          break;
        }
      }
    }
  }

  char detail[160];
  std::snprintf(detail, sizeof detail,
                "exact cost equality at G=1 and G=p, %ld replayed events identical%s%s",
                events_checked, why.empty() ? "" : "; ", why.c_str());
  report(3, "grouping degenerates to the flat algorithm", ok, detail);
}

// --- 4: regime, optimum location and derivative signs at scale ----------------

void criterion_extremum() {
  const PlatformPreset& ex = find_preset("exascale");
  const ModelProblem prob = make_model_problem(ex.n, ex.p, ex.b, ex.B);
  const BcastCostModel model = bcast_cost_model(BroadcastAlg::van_de_geijn);

  bool ok = regime_check(prob, ex.params) == CostRegime::interior_minimum;
  std::string why = ok ? "" : "regime is not interior-minimum";

  std::vector<double> candidates;
  for (double g = 1.0; g <= static_cast<double>(prob.p); g *= 2.0) candidates.push_back(g);
  const double best = optimal_groups(prob, ex.params, model, candidates).first;
  if (best != 1024.0) {
    ok = false;
    why = "optimum at G=" + std::to_string(best);
  }

  for (double g : {2.0, 10.0, 512.0, 1000.0})
    if (hsumma_cost_derivative_sign(prob, ex.params, g) != -1) {
      ok = false;
      why = "derivative not negative below the optimum";
    }
  for (double g : {1100.0, 4096.0, 524288.0, 1000000.0})
    if (hsumma_cost_derivative_sign(prob, ex.params, g) != 1) {
      ok = false;
      why = "derivative not positive above the optimum";
    }

  char detail[160];
  std::snprintf(detail, sizeof detail,
                "interior-minimum regime, optimum G=1024, signs flip across sqrt(p)%s%s",
                why.empty() ? "" : "; ", why.c_str());
  report(4, "cost curve has its interior minimum at sqrt(p)", ok, detail);
}

// --- 5: equal-levels split equals its closed-form expression ------------------

void criterion_equal_split_form() {
  const BcastCostModel model = bcast_cost_model(BroadcastAlg::van_de_geijn);
  double worst = 0.0;
  for (std::int64_t p : {std::int64_t{16}, std::int64_t{256}, std::int64_t{4096},
                         std::int64_t{1} << 20}) {
    const std::int64_t n = 16 * p;
    const std::int64_t b = 16;
    const ModelProblem prob = make_model_problem(n, p, b, b);
    const HockneyParams hp{3e-6, 1e-9, 0.0};
    const double root_p = std::sqrt(static_cast<double>(p));
    const double quarter = std::sqrt(root_p);
    const double nd = static_cast<double>(n);
    // Both levels broadcast over p^(1/4) ranks, so the total collapses to
    //   4 (n/b) (log2 q + q - 1) alpha + 8 (n^2 / sqrt(p)) ((q-1)/q) beta.
    const double direct =
        4.0 * (nd / static_cast<double>(b)) * (std::log2(quarter) + quarter - 1.0) * hp.alpha +
        8.0 * (nd * nd / root_p) * ((quarter - 1.0) / quarter) * hp.beta;
    const double got = hsumma_comm_cost(prob, hp, model, root_p).total_s();
    worst = std::max(worst, std::abs(got - direct) / direct);
  }
  char detail[128];
  std::snprintf(detail, sizeof detail,
                "four machine sizes up to p=2^20, worst relative deviation %.3g", worst);
  report(5, "equal-levels split matches its closed form", worst <= 1e-12, detail);
}

// --- 6: simulation agrees with the model; simulated curve dips at sqrt(p) -----

void criterion_model_vs_simulation() {
  const HockneyParams hp{1e-4, 1e-9, 0.0};
  double worst = 0.0;
  bool ok = true;
  std::string why;

  for (int p : {16, 64, 256}) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(p))));
    const int n = 16 * side;
    const int b = 16;  // equals the tile side, so b == B == tile
    const GridSpec grid = make_grid(side, side);
    const BlockLayout lay = make_block_layout(n, b, grid);
    Matrix ga(n, n), gb(n, n);
    fill_uniform(ga, 5);
    fill_uniform(gb, 6);
    const DistMatrix da = scatter_matrix(ga, lay);
    const DistMatrix db = scatter_matrix(gb, lay);
    const ModelProblem prob = make_model_problem(n, p, b, b);

    for (auto alg : {BroadcastAlg::binomial, BroadcastAlg::van_de_geijn}) {
      const BcastCostModel model = bcast_cost_model(alg);
      for (int gside : divisors(side)) {
        SimConfig cfg;
        cfg.n = n;
        cfg.grid = make_grouped_grid(grid, gside, gside);
        cfg.block_inner = b;
        cfg.block_outer = b;
        cfg.alg = alg;
        cfg.params = hp;
        cfg.record_events = false;
        const SimMetrics m = run_hsumma(da, db, cfg).second;
        const CostBreakdown c = hsumma_comm_cost(
            prob, hp, model, static_cast<double>(gside) * gside);
        const double dev =
            std::abs(m.comm_time_s - (c.latency_s + c.bandwidth_s)) /
            (c.latency_s + c.bandwidth_s);
        worst = std::max(worst, dev);
        if (dev > 0.01) {
          ok = false;
          why = "deviation " + std::to_string(dev) + " at p=" + std::to_string(p);
        }
      }
    }
  }

  // Simulated comm-vs-G curve at p=256, n=256: minimum at the admissible
  // square group count nearest sqrt(p) = 16.
  {
    const int n = 256;
    const GridSpec grid = make_grid(16, 16);
    const int b = 16;
    const ModelProblem prob = make_model_problem(n, 256, b, b);
    if (regime_check(prob, hp) != CostRegime::interior_minimum) {
      ok = false;
      why = "curve check parameters left the interior-minimum regime";
    }
    const BlockLayout lay = make_block_layout(n, b, grid);
    Matrix ga(n, n), gb(n, n);
    fill_uniform(ga, 5);
    fill_uniform(gb, 6);
    const DistMatrix da = scatter_matrix(ga, lay);
    const DistMatrix db = scatter_matrix(gb, lay);
    double best_time = 0.0;
    int best_g = -1;
    for (int gside : {1, 2, 4, 8, 16}) {
      SimConfig cfg;
      cfg.n = n;
      cfg.grid = make_grouped_grid(grid, gside, gside);
      cfg.block_inner = b;
      cfg.block_outer = b;
      cfg.alg = BroadcastAlg::van_de_geijn;
      cfg.params = hp;
      cfg.record_events = false;
      const double t = run_hsumma(da, db, cfg).second.comm_time_s;
      if (best_g < 0 || t < best_time) {
        best_time = t;
        best_g = gside * gside;
      }
    }
    if (best_g != 16) {
      ok = false;
      why = "simulated curve minimum at G=" + std::to_string(best_g);
    }
  }

  char detail[192];
  std::snprintf(detail, sizeof detail,
                "worst comm deviation %.3g across p in {16,64,256}, curve minimum at G=16%s%s",
                worst, why.empty() ? "" : "; ", why.c_str());
  report(6, "simulation tracks the model within 1 percent", ok, detail);
}

// --- 7: the shipped prediction curve has the expected shape and values --------

void criterion_prediction_curve() {
  int exit_code = 0;
  const std::string csv = run_binary("predict-exascale", &exit_code);
  bool ok = exit_code == 0;
  std::string why = ok ? "" : "nonzero exit";

  const auto lines = split(csv, '\n');
  double summa_value = 0.0, min_h = 0.0, min_g = -1.0;
  if (ok && (lines.size() < 2 || lines[0] != "NB_groups,summa_total_s,hsumma_total_s")) {
    ok = false;
    why = "unexpected header";
  }
  if (ok) {
    bool first_row = true;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto f = split(lines[i], ',');
      if (f.size() != 3) {
        ok = false;
        why = "malformed row";
        break;
      }
      const double g = std::stod(f[0]);
      const double s = std::stod(f[1]);
      const double h = std::stod(f[2]);
      if (first_row) {
        summa_value = s;
        first_row = false;
      } else if (s != summa_value) {
        ok = false;
        why = "flat-algorithm value not constant";
        break;
      }
      if (min_g < 0 || h < min_h) {
        min_h = h;
        min_g = g;
      }
      const bool endpoint = g == 1.0 || g == 1048576.0;
      if (endpoint && h != s) {
        ok = false;
        why = "endpoint does not meet the flat value";
        break;
      }
      if (!endpoint && !(h < s)) {
        ok = false;
        why = "two-level curve not below the flat value at G=" + f[0];
        break;
      }
    }
  }
  if (ok && !rel_close(summa_value, 17.6113364162, 0.01)) {
    ok = false;
    why = "flat value off target";
  }
  if (ok && !rel_close(min_h, 2.51122859925, 0.01)) {
    ok = false;
    why = "curve minimum off target";
  }
  if (ok && min_g != 1024.0) {
    ok = false;
    why = "curve minimum not at G=1024";
  }

  char detail[192];
  std::snprintf(detail, sizeof detail,
                "flat %.6f s, minimum %.6f s at G=%.0f%s%s", summa_value, min_h, min_g,
                why.empty() ? "" : "; ", why.c_str());
  report(7, "shipped prediction curve has the expected extremes", ok, detail);
}

// --- 8: identical flags give byte-identical output ----------------------------

void criterion_determinism() {
  int rc1 = 0, rc2 = 0;
  const std::string v1 = run_binary("validate", &rc1);
  const std::string v2 = run_binary("validate", &rc2);
  bool ok = rc1 == 0 && rc2 == 0 && v1 == v2 && !v1.empty();
  std::string why = ok ? "" : "validate output differs between runs";

  const std::string sweep = "sweep-groups --mode both --n 64 --grid 4x4 --b 4 --B 8 "
                            "--alpha 1e-4 --beta 1e-9 --gamma 1e-9";
  const std::string s1 = run_binary(sweep, &rc1);
  const std::string s2 = run_binary(sweep, &rc2);
  if (!(rc1 == 0 && rc2 == 0 && s1 == s2 && !s1.empty())) {
    ok = false;
    why = "sweep output differs between runs";
  }

  char detail[128];
  std::snprintf(detail, sizeof detail, "validate and sweep outputs byte-identical%s%s",
                why.empty() ? "" : "; ", why.c_str());
  report(8, "repeated runs are byte-identical", ok, detail);
}

}  // namespace

int main() {
  criterion_oracle_equivalence();
  criterion_schedule_formulas();
  criterion_degeneracy();
  criterion_extremum();
  criterion_equal_split_form();
  criterion_model_vs_simulation();
  criterion_prediction_curve();
  criterion_determinism();
  if (g_failures > 0) {
    std::printf("%d criteria failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
