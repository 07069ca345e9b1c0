// hsumma: desk-scale laboratory for flat and hierarchical broadcast-based
// parallel matrix multiplication.  Subcommands evaluate the closed-form cost
// model, run the schedule-level simulator, sweep group counts and processor
// counts, and emit plot-ready CSV.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsumma/broadcast.hpp"
#include "hsumma/cost_model.hpp"
#include "hsumma/grid.hpp"
#include "hsumma/hockney.hpp"
#include "hsumma/matrix.hpp"
#include "hsumma/presets.hpp"
#include "hsumma/simulator.hpp"

namespace {

using namespace hsumma;

constexpr std::int64_t kGuardMaxProcs = 4096;
constexpr std::int64_t kGuardMaxN = 4096;
constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ull;
constexpr double kVerifyTolerance = 1e-10;

int usage_error(const std::string& msg) {
  std::cerr << "hsumma: error: " << msg << "\n";
  return 2;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_u64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%" PRIu64, v);
  return buf;
}

// --- option plumbing ---------------------------------------------------------

struct CommonOpts {
  std::string preset = "none";
  std::int64_t n = -1;
  std::int64_t p = -1;
  std::int64_t b = -1;
  std::int64_t B = -1;
  std::string grid;
  std::string groups;
  std::string bcast = "van-de-geijn";
  double alpha = NAN;
  double beta = NAN;
  double gamma = NAN;
  std::uint64_t seed = 1;
  std::string out = "-";
  std::string config_path;
  bool allow_big = false;
};

void add_common_options(CLI::App* cmd, CommonOpts& o, bool with_sim_options) {
  cmd->add_option("--config", o.config_path, "Read options from a key=value file (# comments)")
      ->envname("HSUMMA_CONFIG");
  cmd->add_option("--preset", o.preset, "Platform preset: grid5000, bgp, exascale, none")
      ->envname("HSUMMA_PRESET");
  cmd->add_option("--n", o.n, "Matrix dimension")->envname("HSUMMA_N");
  cmd->add_option("--p", o.p, "Processor count (model commands)")->envname("HSUMMA_P");
  cmd->add_option("--b", o.b, "Inner (within-group) block width")->envname("HSUMMA_B_INNER");
  cmd->add_option("--B", o.B, "Outer (between-group) block width")->envname("HSUMMA_B_OUTER");
  cmd->add_option("--bcast", o.bcast, "Broadcast algorithm: flat, binomial, van-de-geijn")
      ->envname("HSUMMA_BCAST");
  cmd->add_option("--alpha", o.alpha, "Per-message startup time [s]")->envname("HSUMMA_ALPHA");
  cmd->add_option("--beta", o.beta, "Per-element transfer time [s]")->envname("HSUMMA_BETA");
  cmd->add_option("--gamma", o.gamma, "Per multiply-add pair time [s]")->envname("HSUMMA_GAMMA");
  cmd->add_option("--out", o.out, "Output CSV path, '-' for stdout")->envname("HSUMMA_OUT");
  if (with_sim_options) {
    cmd->add_option("--grid", o.grid, "Processor grid as SxT, e.g. 4x4")->envname("HSUMMA_GRID");
    cmd->add_option("--groups", o.groups, "Grouping as IxJ, e.g. 2x2")->envname("HSUMMA_GROUPS");
    cmd->add_option("--seed", o.seed, "Seed for input generation")->envname("HSUMMA_SEED");
    cmd->add_flag("--allow-big", o.allow_big,
                  "Lift the desk-scale guard (p <= 4096, n <= 4096)")
        ->envname("HSUMMA_ALLOW_BIG");
  }
}

// Config files are expanded into injected arguments before parsing: explicit
// flags win over file values, and injected values in turn win over environment
// variables because the environment is only consulted for options that are
// still unset after parsing.
std::vector<std::string> expand_config_args(std::vector<std::string> args) {
  static const char* kConfigCommands[] = {"simulate", "cost", "sweep-groups", "sweep-procs"};
  if (args.empty() || std::find(std::begin(kConfigCommands), std::end(kConfigCommands),
                                args.front()) == std::end(kConfigCommands))
    return args;

  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config requires a path");
      path = args[i + 1];
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      break;
    }
  }
  if (path.empty()) {
    if (const char* env = std::getenv("HSUMMA_CONFIG")) path = env;
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");

  const auto flag_given = [&args](const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&flag](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };

  std::string line;
  while (std::getline(in, line)) {
    const std::string text = CLI::detail::trim_copy(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    const std::string key = eq == std::string::npos ? "" : CLI::detail::trim_copy(text.substr(0, eq));
    if (key.empty())
      throw std::invalid_argument("config: malformed line '" + text + "', expected key=value");
    if (key == "config") throw std::invalid_argument("config: nested config files not allowed");
    const std::string flag = "--" + key;
    if (flag_given(flag)) continue;
    args.push_back(flag + "=" + CLI::detail::trim_copy(text.substr(eq + 1)));
  }
  return args;
}

std::pair<int, int> parse_shape(const std::string& text, const char* what) {
  const auto xpos = text.find('x');
  if (xpos == std::string::npos || xpos == 0 || xpos + 1 >= text.size())
    throw std::invalid_argument(std::string("malformed ") + what + " '" + text +
                                "', expected e.g. 4x4");
  std::size_t used1 = 0, used2 = 0;
  int a = 0, b = 0;
  try {
    a = std::stoi(text.substr(0, xpos), &used1);
    b = std::stoi(text.substr(xpos + 1), &used2);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("malformed ") + what + " '" + text + "'");
  }
  if (used1 != xpos || used2 != text.size() - xpos - 1 || a < 1 || b < 1)
    throw std::invalid_argument(std::string("malformed ") + what + " '" + text + "'");
  return {a, b};
}

std::int64_t isqrt_exact(std::int64_t p) {
  auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(p))));
  while (r > 0 && r * r > p) --r;
  while ((r + 1) * (r + 1) <= p) ++r;
  return r * r == p ? r : -1;
}

// Fully resolved run parameters: preset values overridden by explicit flags.
struct Resolved {
  std::int64_t n = 0;
  std::int64_t p = 0;
  std::int64_t b = 0;
  std::int64_t B = 0;
  HockneyParams params;
  BroadcastAlg alg = BroadcastAlg::binomial;
  std::optional<GridSpec> grid;
  int group_rows = 1;
  int group_cols = 1;
  std::uint64_t seed = 1;
};

Resolved resolve(const CommonOpts& o) {
  Resolved r;
  const PlatformPreset* preset = nullptr;
  if (o.preset != "none") preset = &find_preset(o.preset);

  r.n = o.n >= 0 ? o.n : (preset ? preset->n : -1);
  r.b = o.b >= 0 ? o.b : (preset ? preset->b : -1);
  r.B = o.B >= 0 ? o.B : (preset ? preset->B : r.b);
  r.params.alpha = !std::isnan(o.alpha) ? o.alpha : (preset ? preset->params.alpha : NAN);
  r.params.beta = !std::isnan(o.beta) ? o.beta : (preset ? preset->params.beta : NAN);
  r.params.gamma = !std::isnan(o.gamma) ? o.gamma : (preset ? preset->params.gamma : 0.0);
  r.alg = parse_broadcast_alg(o.bcast);
  r.seed = o.seed;

  if (!o.grid.empty()) {
    const auto [s, t] = parse_shape(o.grid, "grid");
    r.grid = make_grid(s, t);
    r.p = static_cast<std::int64_t>(s) * t;
    if (o.p >= 0 && o.p != r.p)
      throw std::invalid_argument("--p disagrees with --grid");
  } else {
    r.p = o.p >= 0 ? o.p : (preset ? preset->p : -1);
    if (r.p >= 1) {
      const std::int64_t side = isqrt_exact(r.p);
      if (side > 0 && side <= INT32_MAX)
        r.grid = make_grid(static_cast<int>(side), static_cast<int>(side));
    }
  }
  if (!o.groups.empty()) {
    const auto [i, j] = parse_shape(o.groups, "groups");
    r.group_rows = i;
    r.group_cols = j;
  }

  if (r.n < 1) throw std::invalid_argument("matrix dimension not set (--n or --preset)");
  if (r.p < 1) throw std::invalid_argument("processor count not set (--p, --grid or --preset)");
  if (r.b < 1) throw std::invalid_argument("block width not set (--b or --preset)");
  if (r.B < r.b) throw std::invalid_argument("outer block must be >= inner block");
  if (std::isnan(r.params.alpha) || std::isnan(r.params.beta))
    throw std::invalid_argument("alpha/beta not set (--alpha/--beta or --preset)");
  return r;
}

GridSpec require_grid(const Resolved& r) {
  if (!r.grid)
    throw std::invalid_argument("this command needs a grid; pass --grid SxT "
                                "(processor count is not a perfect square)");
  return *r.grid;
}

bool guard_blocks(const Resolved& r, bool allow_big, std::string* why) {
  if (allow_big) return false;
  if (r.p > kGuardMaxProcs || r.n > kGuardMaxN) {
    *why = "desk-scale guard: p <= " + std::to_string(kGuardMaxProcs) + " and n <= " +
           std::to_string(kGuardMaxN) + " (got p=" + std::to_string(r.p) +
           ", n=" + std::to_string(r.n) + "); pass --allow-big to override";
    return true;
  }
  return false;
}

// --- CSV ---------------------------------------------------------------------

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (path != "-") {
      file.open(path);
      if (!file) throw std::invalid_argument("cannot open output file: " + path);
      os = &file;
    }
  }
  std::ostream& stream() { return *os; }
};

// One row of the shared sweep schema.  `key` is NB_groups or NB_procs
// depending on the command.
struct SweepRow {
  double key = 0.0;
  double overall_comm = 0.0;
  double time_mean = 0.0;
  double latency_s = 0.0;
  double bandwidth_s = 0.0;
  double compute_s = 0.0;
  std::string source;
};

SweepRow model_row(double key, const CostBreakdown& c) {
  return {key,          c.latency_s + c.bandwidth_s, c.total_s(), c.latency_s,
          c.bandwidth_s, c.compute_s,                "model"};
}

SweepRow sim_row(double key, const SimMetrics& m) {
  return {key,
          m.comm_time_s,
          m.makespan_s,
          m.critical_latency_s,
          m.critical_bandwidth_s,
          m.critical_compute_s,
          "simulation"};
}

SweepRow skipped_row(double key) {
  return {key, NAN, NAN, NAN, NAN, NAN, "skipped"};
}

void print_row(std::ostream& os, const SweepRow& r, const std::string& extra = "") {
  os << fmt(r.key) << ',' << fmt(r.overall_comm) << ',' << fmt(r.time_mean) << ','
     << fmt(r.latency_s) << ',' << fmt(r.bandwidth_s) << ',' << fmt(r.compute_s) << ','
     << r.source << extra << "\n";
}

// --- simulation helpers ------------------------------------------------------

struct SimRun {
  SimMetrics metrics;
  double rel_error = NAN;  // vs reference product; NAN when skipped
};

SimRun run_simulation(const Resolved& r, bool flat_alg, bool verify) {
  const GridSpec grid = require_grid(r);
  const GroupedGridSpec grouping = make_grouped_grid(grid, r.group_rows, r.group_cols);
  const BlockLayout layout =
      make_block_layout(static_cast<int>(r.n), static_cast<int>(r.b), grid);

  Matrix A(static_cast<int>(r.n), static_cast<int>(r.n));
  Matrix B(static_cast<int>(r.n), static_cast<int>(r.n));
  fill_uniform(A, r.seed);
  fill_uniform(B, r.seed + kSeedStride);

  SimConfig cfg;
  cfg.n = static_cast<int>(r.n);
  cfg.grid = grouping;
  cfg.block_inner = static_cast<int>(r.b);
  cfg.block_outer = static_cast<int>(r.B);
  cfg.alg = r.alg;
  cfg.params = r.params;
  cfg.record_events = false;

  const DistMatrix da = scatter_matrix(A, layout);
  const DistMatrix db = scatter_matrix(B, layout);
  auto [dc, metrics] = flat_alg ? run_summa(da, db, cfg) : run_hsumma(da, db, cfg);

  SimRun out{std::move(metrics), NAN};
  if (verify) {
    const Matrix want = reference_multiply(A, B);
    out.rel_error = relative_frobenius_error(gather_matrix(dc), want);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = NAN;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size())
      throw std::invalid_argument(std::string("malformed ") + what + " entry '" + item + "'");
    vals.push_back(v);
  }
  if (vals.empty()) throw std::invalid_argument(std::string("empty ") + what);
  return vals;
}

// Square group counts realizable on this grid with an equal I = J = sqrt(G)
// split along both sides.
bool admissible_square_groups(const GridSpec& grid, double g, int* side_out) {
  if (!(g >= 1.0) || g != std::floor(g)) return false;
  const std::int64_t gi = static_cast<std::int64_t>(g);
  const std::int64_t side = isqrt_exact(gi);
  if (side < 1) return false;
  if (grid.rows % side != 0 || grid.cols % side != 0) return false;
  *side_out = static_cast<int>(side);
  return true;
}

}  // namespace

// --- subcommands -------------------------------------------------------------

namespace {

int cmd_cost(const CommonOpts& opts, double groups, bool flat_alg) {
  const Resolved r = resolve(opts);
  const ModelProblem prob = make_model_problem(r.n, r.p, r.b, r.B);
  const BcastCostModel model = bcast_cost_model(r.alg);
  const CostBreakdown c = flat_alg ? summa_comm_cost(prob, r.params, model)
                                   : hsumma_comm_cost(prob, r.params, model, groups);
  Output out(opts.out);
  out.stream() << "NB_groups,overall_comm,time_mean,latency_s,bandwidth_s,compute_s,source\n";
  print_row(out.stream(), model_row(flat_alg ? 1.0 : groups, c));
  return 0;
}

int cmd_simulate(const CommonOpts& opts, bool flat_alg) {
  const Resolved r = resolve(opts);
  std::string why;
  if (guard_blocks(r, opts.allow_big, &why)) return usage_error(why);

  const bool verify = r.n <= 512;
  const SimRun run = run_simulation(r, flat_alg, verify);
  const SimMetrics& m = run.metrics;

  const double groups = flat_alg ? 1.0
                                 : static_cast<double>(r.group_rows) *
                                       static_cast<double>(r.group_cols);
  Output out(opts.out);
  out.stream() << "NB_groups,overall_comm,time_mean,latency_s,bandwidth_s,compute_s,source\n";
  print_row(out.stream(), sim_row(groups, m));

  std::cerr << "algorithm " << (flat_alg ? "summa" : "hsumma") << " (bcast "
            << to_string(r.alg) << "), grid " << require_grid(r).rows << "x"
            << require_grid(r).cols << ", groups " << r.group_rows << "x" << r.group_cols
            << ", b=" << r.b << ", B=" << r.B << ", n=" << r.n << "\n";
  std::cerr << "makespan " << fmt(m.makespan_s) << " s (comm " << fmt(m.comm_time_s)
            << " s, compute " << fmt(m.compute_time_s) << " s)\n";
  std::cerr << "messages " << fmt_u64(m.msg_count) << ", volume " << fmt_u64(m.volume_elems)
            << " elements (" << fmt_u64(m.volume_elems * kBytesPerElement) << " bytes)\n";
  if (!verify) {
    std::cerr << "verification: SKIPPED (n > 512)\n";
    return 0;
  }
  if (run.rel_error <= kVerifyTolerance) {
    std::cerr << "verification: OK (relative error " << fmt(run.rel_error) << ")\n";
    return 0;
  }
  std::cerr << "verification: FAIL (relative error " << fmt(run.rel_error) << ")\n";
  return 1;
}

int cmd_sweep_groups(const CommonOpts& opts, const std::string& mode,
                     const std::string& glist_text) {
  if (mode != "model" && mode != "simulate" && mode != "both")
    return usage_error("--mode must be model, simulate or both");
  const Resolved r = resolve(opts);
  const bool want_sim = mode != "model";
  const bool want_model = mode != "simulate";
  std::string why;
  if (want_sim && guard_blocks(r, opts.allow_big, &why)) return usage_error(why);

  std::vector<double> glist;
  if (!glist_text.empty()) {
    glist = parse_double_list(glist_text, "--G-list");
  } else {
    for (double g = 1.0; g <= static_cast<double>(r.p); g *= 4.0) glist.push_back(g);
  }

  const ModelProblem prob = make_model_problem(r.n, r.p, r.b, r.B);
  const BcastCostModel model = bcast_cost_model(r.alg);

  Output out(opts.out);
  out.stream() << "# regime: " << to_string(regime_check(prob, r.params))
               << " (alpha/beta vs 2nb/p)\n";
  out.stream() << "NB_groups,overall_comm,time_mean,latency_s,bandwidth_s,compute_s,source";
  if (mode == "both") out.stream() << ",deviation";
  out.stream() << "\n";

  for (double g : glist) {
    const bool in_range = g >= 1.0 && g <= static_cast<double>(r.p);
    std::optional<SweepRow> mrow, srow;
    if (want_model && in_range)
      mrow = model_row(g, hsumma_comm_cost(prob, r.params, model, g));
    int side = 0;
    if (want_sim && in_range &&
        admissible_square_groups(require_grid(r), g, &side)) {
      Resolved r2 = r;
      r2.group_rows = side;
      r2.group_cols = side;
      srow = sim_row(g, run_simulation(r2, false, false).metrics);
    }
    if (!in_range || (want_sim && !srow)) {
      std::cerr << "warning: G=" << fmt(g) << " not admissible on this grid, skipped\n";
      SweepRow row = skipped_row(g);
      print_row(out.stream(), row, mode == "both" ? ",nan" : "");
      continue;
    }
    std::string extra;
    if (mode == "both") {
      const double dev = mrow->overall_comm != 0.0
                             ? std::abs(srow->overall_comm - mrow->overall_comm) /
                                   mrow->overall_comm
                             : (srow->overall_comm == 0.0 ? 0.0 : INFINITY);
      extra = "," + fmt(dev);
    }
    if (want_model) print_row(out.stream(), *mrow, extra);
    if (want_sim) print_row(out.stream(), *srow, extra);
  }
  return 0;
}

int cmd_sweep_procs(const CommonOpts& opts, const std::string& mode,
                    const std::string& plist_text, const std::string& grule) {
  if (mode != "model" && mode != "simulate")
    return usage_error("--mode must be model or simulate");
  if (grule != "1" && grule != "sqrt" && grule != "best")
    return usage_error("--G-rule must be 1, sqrt or best");
  if (plist_text.empty()) return usage_error("--p-list is required");

  const std::vector<double> plist = parse_double_list(plist_text, "--p-list");
  // p comes from --p-list row by row; satisfy the resolver when nothing else
  // provides a processor count.
  CommonOpts base_opts = opts;
  if (base_opts.p < 0 && base_opts.grid.empty() && base_opts.preset == "none") base_opts.p = 1;
  const Resolved base = resolve(base_opts);
  const BcastCostModel model = bcast_cost_model(base.alg);

  Output out(opts.out);
  out.stream()
      << "NB_procs,overall_comm,time_mean,latency_s,bandwidth_s,compute_s,source,algorithm\n";

  for (double pd : plist) {
    if (!(pd >= 1.0) || pd != std::floor(pd))
      return usage_error("p values must be positive integers");
    const std::int64_t p = static_cast<std::int64_t>(pd);
    const std::int64_t side = isqrt_exact(p);
    if (side < 1) return usage_error("p=" + std::to_string(p) + " is not a perfect square");

    Resolved r = base;
    r.p = p;
    r.grid = make_grid(static_cast<int>(side), static_cast<int>(side));
    const ModelProblem prob = make_model_problem(r.n, r.p, r.b, r.B);

    // Group count for the two-level algorithm at this p.
    double g = 1.0;
    if (grule == "sqrt") {
      g = static_cast<double>(side);
    } else if (grule == "best") {
      std::vector<double> cands;
      for (std::int64_t q = 1; q * q <= p; q *= 2)
        if ((side % q) == 0) cands.push_back(static_cast<double>(q) * q);
      g = optimal_groups(prob, r.params, model, cands).first;
    }

    if (mode == "model") {
      print_row(out.stream(), model_row(pd, summa_comm_cost(prob, r.params, model)),
                ",summa");
      print_row(out.stream(), model_row(pd, hsumma_comm_cost(prob, r.params, model, g)),
                ",hsumma");
      continue;
    }

    std::string why;
    if (guard_blocks(r, opts.allow_big, &why)) return usage_error(why);
    print_row(out.stream(), sim_row(pd, run_simulation(r, true, false).metrics), ",summa");
    Resolved rh = r;
    const std::int64_t gside = isqrt_exact(static_cast<std::int64_t>(g));
    rh.group_rows = static_cast<int>(gside);
    rh.group_cols = static_cast<int>(gside);
    print_row(out.stream(), sim_row(pd, run_simulation(rh, false, false).metrics),
              ",hsumma");
  }
  return 0;
}

int cmd_predict_exascale(const std::string& out_path) {
  const PlatformPreset& ex = find_preset("exascale");
  const ModelProblem prob = make_model_problem(ex.n, ex.p, ex.b, ex.B);
  const BcastCostModel model = bcast_cost_model(BroadcastAlg::van_de_geijn);
  const double summa_total = summa_comm_cost(prob, ex.params, model).total_s();

  Output out(out_path);
  out.stream() << "NB_groups,summa_total_s,hsumma_total_s\n";
  for (double g = 1.0; g <= static_cast<double>(ex.p); g *= 2.0) {
    const double h = predict_execution(prob, ex.params, model, g);
    out.stream() << fmt(g) << ',' << fmt(summa_total) << ',' << fmt(h) << "\n";
  }
  return 0;
}

// --- validate ----------------------------------------------------------------

bool rel_close(double a, double b, double tol) {
  if (a == b) return true;
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= tol * scale;
}

double replay_makespan(BroadcastAlg alg, int q, std::int64_t m, const HockneyParams& prm) {
  std::vector<int> parts(q);
  for (int i = 0; i < q; ++i) parts[i] = i;
  return max_time(simulate_schedule(make_schedule(alg, 0, parts, m), prm, ClockState(q)));
}

bool check_schedule_formula(BroadcastAlg alg) {
  const HockneyParams prm{1.0, 0.01, 0.0};
  for (int q : {2, 4, 8, 16, 32}) {
    for (std::int64_t m : {static_cast<std::int64_t>(q), std::int64_t{1024},
                           std::int64_t{1000000}}) {
      if (m % q != 0) continue;
      const double md = static_cast<double>(m);
      double want = 0.0;
      if (alg == BroadcastAlg::binomial) {
        want = std::log2(q) * (prm.alpha + md * prm.beta);
      } else {
        want = (std::log2(q) + q - 1) * prm.alpha +
               2.0 * (q - 1.0) / q * md * prm.beta;
      }
      if (!rel_close(replay_makespan(alg, q, m, prm), want, 1e-9)) return false;
    }
  }
  return true;
}

// Every participant of a schedule must end up holding all message_size
// elements, receive none of them twice, and only forward data it already has.
bool check_data_completeness() {
  for (BroadcastAlg alg :
       {BroadcastAlg::flat, BroadcastAlg::binomial, BroadcastAlg::van_de_geijn}) {
    for (int q : {1, 2, 3, 4, 5, 7, 8, 9, 16}) {
      for (std::int64_t m : {std::int64_t{0}, std::int64_t{1}, std::int64_t{97},
                             std::int64_t{1024}}) {
        std::vector<int> parts(q);
        for (int i = 0; i < q; ++i) parts[i] = i;
        const BroadcastSchedule sched = make_schedule(alg, 0, parts, m);
        std::vector<std::vector<char>> held(q, std::vector<char>(m, 0));
        for (std::int64_t k = 0; k < m; ++k) held[0][k] = 1;
        for (const SendEvent& e : sched.events) {
          for (std::int64_t k = e.offset; k < e.offset + e.size; ++k) {
            if (!held[e.src][k]) return false;  // forwards data it lacks
            if (held[e.dst][k]) return false;   // duplicate delivery
            held[e.dst][k] = 1;
          }
        }
        for (int i = 0; i < q; ++i)
          for (std::int64_t k = 0; k < m; ++k)
            if (!held[i][k]) return false;
      }
    }
  }
  return true;
}

bool check_replay_nonpow2() {
  // Non-power-of-two communicators have no exact closed form here; the replay
  // must still deliver everything and stay within the per-broadcast slack
  // bound of (q-1) * beta relative to the q | m formula.
  const HockneyParams prm{1.0, 0.01, 0.0};
  for (int q : {3, 5, 6, 7, 9}) {
    for (std::int64_t m : {std::int64_t{1}, std::int64_t{100}}) {
      const double got = replay_makespan(BroadcastAlg::van_de_geijn, q, m, prm);
      const double ceil_log = std::ceil(std::log2(q));
      const double want = (ceil_log + q - 1) * prm.alpha +
                          2.0 * (q - 1.0) / q * static_cast<double>(m) * prm.beta;
      if (got + 1e-12 < want - (q - 1) * prm.beta) return false;
      if (got > want + (q - 1) * prm.beta + 1e-12) return false;
    }
  }
  return true;
}

bool check_cost_degeneracy() {
  const HockneyParams prm{1e-4, 1e-9, 1e-12};
  for (std::int64_t p : {std::int64_t{16}, std::int64_t{64}, std::int64_t{1024}}) {
    const ModelProblem prob = make_model_problem(1024, p, 16, 16);
    for (BroadcastAlg alg :
         {BroadcastAlg::flat, BroadcastAlg::binomial, BroadcastAlg::van_de_geijn}) {
      const BcastCostModel model = bcast_cost_model(alg);
      const CostBreakdown su = summa_comm_cost(prob, prm, model);
      for (double g : {1.0, static_cast<double>(p)}) {
        const CostBreakdown h = hsumma_comm_cost(prob, prm, model, g);
        if (h.latency_s != su.latency_s || h.bandwidth_s != su.bandwidth_s ||
            h.compute_s != su.compute_s)
          return false;
      }
    }
  }
  return true;
}

bool check_sqrtp_closed_form() {
  // At G = sqrt(p) with b = B under the van de Geijn model the two-level cost
  // collapses to (log2 p + 4 (p^(1/4) - 1)) (n/b) alpha
  //            + 8 (1 - p^(-1/4)) (n^2 / sqrt(p)) beta.
  const HockneyParams prm{5e-7, 1e-11, 0.0};
  const BcastCostModel model = bcast_cost_model(BroadcastAlg::van_de_geijn);
  for (std::int64_t p : {std::int64_t{16}, std::int64_t{256}, std::int64_t{4096},
                         std::int64_t{1048576}}) {
    const std::int64_t n = 4194304;
    const ModelProblem prob = make_model_problem(n, p, 256, 256);
    const double pd = static_cast<double>(p);
    const double nd = static_cast<double>(n);
    const double quarter = std::sqrt(std::sqrt(pd));
    const double want_lat =
        (std::log2(pd) + 4.0 * (quarter - 1.0)) * (nd / 256.0) * prm.alpha;
    const double want_bw =
        8.0 * (1.0 - 1.0 / quarter) * (nd * nd / std::sqrt(pd)) * prm.beta;
    const CostBreakdown h = hsumma_comm_cost(prob, prm, model, std::sqrt(pd));
    if (!rel_close(h.latency_s, want_lat, 1e-12)) return false;
    if (!rel_close(h.bandwidth_s, want_bw, 1e-12)) return false;
  }
  return true;
}

bool check_extremum_location() {
  const PlatformPreset& ex = find_preset("exascale");
  const ModelProblem prob = make_model_problem(ex.n, ex.p, ex.b, ex.B);
  if (regime_check(prob, ex.params) != CostRegime::interior_minimum) return false;
  std::vector<double> cands;
  for (double g = 1.0; g <= static_cast<double>(ex.p); g *= 2.0) cands.push_back(g);
  const BcastCostModel model = bcast_cost_model(BroadcastAlg::van_de_geijn);
  if (optimal_groups(prob, ex.params, model, cands).first != 1024.0) return false;
  for (double g : {2.0, 64.0, 1000.0})
    if (hsumma_cost_derivative_sign(prob, ex.params, g) != -1) return false;
  for (double g : {1100.0, 65536.0, 1000000.0})
    if (hsumma_cost_derivative_sign(prob, ex.params, g) != 1) return false;
  return true;
}

bool check_regime_presets() {
  const PlatformPreset& bgp = find_preset("bgp");
  if (regime_check(make_model_problem(bgp.n, bgp.p, bgp.b, bgp.B), bgp.params) !=
      CostRegime::interior_minimum)
    return false;
  const PlatformPreset& g5k = find_preset("grid5000");
  if (regime_check(make_model_problem(g5k.n, g5k.p, g5k.b, g5k.B), g5k.params) !=
      CostRegime::interior_minimum)
    return false;
  return true;
}

bool run_oracle_case(int n, const GridSpec& grid, int groups_side, int b, int B,
                     BroadcastAlg alg, int pivot_skew, double* rel_err) {
  const GroupedGridSpec grouping = make_grouped_grid(grid, groups_side, groups_side);
  const BlockLayout layout = make_block_layout(n, b, grid);
  Matrix A(n, n), Bm(n, n);
  fill_uniform(A, 11);
  fill_uniform(Bm, 11 + kSeedStride);
  SimConfig cfg;
  cfg.n = n;
  cfg.grid = grouping;
  cfg.block_inner = b;
  cfg.block_outer = B;
  cfg.alg = alg;
  cfg.params = {1e-5, 1e-9, 0.0};
  cfg.record_events = false;
  cfg.pivot_skew = pivot_skew;
  auto [dc, metrics] = run_hsumma(scatter_matrix(A, layout), scatter_matrix(Bm, layout), cfg);
  *rel_err = relative_frobenius_error(gather_matrix(dc), reference_multiply(A, Bm));
  return *rel_err <= kVerifyTolerance;
}

bool check_oracle_equivalence() {
  for (BroadcastAlg alg :
       {BroadcastAlg::flat, BroadcastAlg::binomial, BroadcastAlg::van_de_geijn}) {
    for (int side : {1, 2, 4}) {
      const GridSpec grid = make_grid(side, side);
      const int n = 16;
      const int tile = n / side;
      for (int b : {1, 2}) {
        for (int B = b; B <= tile; B *= 2) {
          if (B % b != 0) continue;
          for (int gs : {1, 2}) {
            if (side % gs != 0) continue;
            double err = NAN;
            if (!run_oracle_case(n, grid, gs, b, B, alg, 0, &err)) return false;
          }
        }
      }
    }
  }
  return true;
}

bool check_pivot_mutation_detected() {
  const GridSpec grid = make_grid(2, 2);
  double err = NAN;
  // A skewed pivot must produce a visibly wrong product.
  if (run_oracle_case(16, grid, 2, 2, 4, BroadcastAlg::binomial, 1, &err)) return false;
  return err > 1e-3;
}

bool check_sim_model_agreement() {
  for (BroadcastAlg alg : {BroadcastAlg::binomial, BroadcastAlg::van_de_geijn}) {
    const GridSpec grid = make_grid(4, 4);
    const Resolved r{64, 16, 16, 16, {1e-4, 1e-9, 0.0}, alg, grid, 2, 2, 1};
    const SimMetrics m = run_simulation(r, false, false).metrics;
    const CostBreakdown c = hsumma_comm_cost(make_model_problem(64, 16, 16, 16), r.params,
                                             bcast_cost_model(alg), 4.0);
    if (measured_vs_model(m, c).comm_rel_dev > 0.01) return false;
  }
  return true;
}

bool check_g1_collapse_events() {
  const GridSpec grid = make_grid(4, 4);
  const BlockLayout layout = make_block_layout(32, 4, grid);
  Matrix A(32, 32), B(32, 32);
  fill_uniform(A, 3);
  fill_uniform(B, 3 + kSeedStride);
  const DistMatrix da = scatter_matrix(A, layout), db = scatter_matrix(B, layout);
  SimConfig cfg;
  cfg.n = 32;
  cfg.grid = make_grouped_grid(grid, 1, 1);
  cfg.block_inner = 4;
  cfg.block_outer = 4;
  cfg.alg = BroadcastAlg::van_de_geijn;
  cfg.params = {1e-4, 1e-9, 1e-10};
  auto [c1, m1] = run_summa(da, db, cfg);
  auto [c2, m2] = run_hsumma(da, db, cfg);
  return m1.makespan_s == m2.makespan_s && m1.comm_time_s == m2.comm_time_s &&
         m1.msg_count == m2.msg_count && m1.volume_elems == m2.volume_elems &&
         m1.events == m2.events;
}

int cmd_validate(const std::string& out_path) {
  struct Check {
    const char* name;
    bool (*fn)();
  };
  const Check checks[] = {
      {"schedule-formula-binomial", [] { return check_schedule_formula(BroadcastAlg::binomial); }},
      {"schedule-formula-van-de-geijn",
       [] { return check_schedule_formula(BroadcastAlg::van_de_geijn); }},
      {"schedule-replay-nonpow2", check_replay_nonpow2},
      {"schedule-data-completeness", check_data_completeness},
      {"cost-degeneracy-g1-gp", check_cost_degeneracy},
      {"optimal-split-closed-form", check_sqrtp_closed_form},
      {"extremum-location", check_extremum_location},
      {"regime-presets", check_regime_presets},
      {"oracle-equivalence", check_oracle_equivalence},
      {"pivot-mutation-detected", check_pivot_mutation_detected},
      {"sim-model-agreement", check_sim_model_agreement},
      {"g1-collapse-events", check_g1_collapse_events},
  };

  Output out(out_path);
  out.stream() << "check,status\n";
  bool all_ok = true;
  for (const Check& c : checks) {
    const bool ok = c.fn();
    all_ok = all_ok && ok;
    out.stream() << c.name << ',' << (ok ? "pass" : "fail") << "\n";
    std::cerr << (ok ? "  ok   " : "  FAIL ") << c.name << "\n";
  }
  std::cerr << (all_ok ? "all checks passed\n" : "some checks FAILED\n");
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale laboratory for broadcast-based parallel matrix multiplication",
               "hsumma"};
  app.require_subcommand(1);

  CommonOpts o_sim, o_cost, o_sg, o_sp;
  bool sim_summa = false, cost_summa = false;
  double cost_groups = 1.0;
  std::string sg_mode = "model", sg_glist;
  std::string sp_mode = "model", sp_plist, sp_grule = "best";
  std::string px_out = "-", val_out = "-";

  CLI::App* sim = app.add_subcommand("simulate", "Run one simulated multiplication");
  add_common_options(sim, o_sim, true);
  sim->add_flag("--summa", sim_summa, "Run the flat algorithm (grouping ignored)")
      ->envname("HSUMMA_SUMMA");

  CLI::App* cost = app.add_subcommand("cost", "Evaluate the closed-form cost model once");
  add_common_options(cost, o_cost, false);
  cost->add_option("--G", cost_groups, "Group count (real-valued, in [1, p])")
      ->envname("HSUMMA_G");
  cost->add_flag("--summa", cost_summa, "Evaluate the flat (single-level) cost")
      ->envname("HSUMMA_SUMMA");

  CLI::App* sg = app.add_subcommand("sweep-groups", "Sweep the group count G");
  add_common_options(sg, o_sg, true);
  sg->add_option("--mode", sg_mode, "model, simulate or both")->envname("HSUMMA_MODE");
  sg->add_option("--G-list", sg_glist, "Comma-separated G values (default: powers of 4)")
      ->envname("HSUMMA_G_LIST");

  CLI::App* sp = app.add_subcommand("sweep-procs", "Sweep the processor count");
  add_common_options(sp, o_sp, true);
  sp->add_option("--mode", sp_mode, "model or simulate")->envname("HSUMMA_MODE");
  sp->add_option("--p-list", sp_plist, "Comma-separated processor counts (squares)")
      ->envname("HSUMMA_P_LIST");
  sp->add_option("--G-rule", sp_grule, "Group count rule: 1, sqrt or best")
      ->envname("HSUMMA_G_RULE");

  CLI::App* px = app.add_subcommand("predict-exascale",
                                    "Emit the exascale prediction curve over G");
  px->add_option("--out", px_out, "Output CSV path, '-' for stdout")->envname("HSUMMA_OUT");

  CLI::App* val = app.add_subcommand("validate", "Run the built-in invariant suite");
  val->add_option("--out", val_out, "Output CSV path, '-' for stdout")->envname("HSUMMA_OUT");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config_args(std::move(args));
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sim) return cmd_simulate(o_sim, sim_summa);
    if (*cost) return cmd_cost(o_cost, cost_groups, cost_summa);
    if (*sg) return cmd_sweep_groups(o_sg, sg_mode, sg_glist);
    if (*sp) return cmd_sweep_procs(o_sp, sp_mode, sp_plist, sp_grule);
    if (*px) return cmd_predict_exascale(px_out);
    if (*val) return cmd_validate(val_out);
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }
  return usage_error("no subcommand");
}
