#include "hsumma/cost_model.hpp"

#include <cmath>
#include <stdexcept>

namespace hsumma {

namespace {

bool is_perfect_square(std::int64_t p) {
  if (p < 0) return false;
  auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(p))));
  while (r > 0 && r * r > p) --r;
  while ((r + 1) * (r + 1) <= p) ++r;
  return r * r == p;
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

double compute_seconds(const ModelProblem& prob, const HockneyParams& params) {
  const double n = static_cast<double>(prob.n);
  // One rank performs n^3 / p multiply-add pairs in total.
  return n * n * n / static_cast<double>(prob.p) * params.gamma;
}

// Latency term of one broadcast level: every step issues a row and a column
// broadcast over q ranks, hence the factor 2.
double level_latency(double steps, double q, const BcastCostModel& model, double alpha) {
  return 2.0 * steps * model.latency_multiplier(q) * alpha;
}

// Bandwidth term of one level; across all steps a rank receives its n^2/sqrt(p)
// share of A and of B once, scaled by the algorithm's W(q).
double level_bandwidth(double panel_total, double q, const BcastCostModel& model,
                       double beta) {
  return 2.0 * panel_total * model.bandwidth_multiplier(q) * beta;
}

void validate_problem(const ModelProblem& prob) {
  if (prob.n < 1 || prob.p < 1 || prob.b < 1 || prob.B < 1)
    throw std::invalid_argument("cost model: n, p, b, B must be >= 1");
  if (prob.n % prob.b != 0 || prob.n % prob.B != 0)
    throw std::invalid_argument("cost model: block sizes must divide n");
  if (prob.b > prob.B)
    throw std::invalid_argument("cost model: inner block exceeds outer block");
}

void require_square(const ModelProblem& prob) {
  if (!is_perfect_square(prob.p))
    throw std::invalid_argument("cost model: p must be a perfect square");
}

}  // namespace

ModelProblem make_model_problem(std::int64_t n, std::int64_t p, std::int64_t b,
                                std::int64_t B) {
  ModelProblem prob{n, p, b, B};
  validate_problem(prob);
  return prob;
}

BcastCostModel bcast_cost_model(BroadcastAlg alg) {
  switch (alg) {
    case BroadcastAlg::flat:
      return {"flat", [](double q) { return q - 1.0; }, [](double q) { return q - 1.0; }};
    case BroadcastAlg::binomial:
      return {"binomial", [](double q) { return std::log2(q); },
              [](double q) { return std::log2(q); }};
    case BroadcastAlg::van_de_geijn:
      return {"van-de-geijn", [](double q) { return std::log2(q) + q - 1.0; },
              [](double q) { return 2.0 * (q - 1.0) / q; }};
  }
  throw std::invalid_argument("bcast_cost_model: unknown algorithm");
}

const char* to_string(CostRegime regime) {
  switch (regime) {
    case CostRegime::interior_minimum: return "interior-minimum";
    case CostRegime::interior_maximum: return "interior-maximum";
    case CostRegime::degenerate: return "degenerate";
  }
  return "?";
}

CostBreakdown summa_comm_cost(const ModelProblem& prob, const HockneyParams& params,
                              const BcastCostModel& model) {
  validate_problem(prob);
  require_square(prob);
  const double n = static_cast<double>(prob.n);
  const double q = std::sqrt(static_cast<double>(prob.p));
  const double steps = n / static_cast<double>(prob.b);
  const double panel_total = n * n / std::sqrt(static_cast<double>(prob.p));

  CostBreakdown out;
  out.latency_within_s = level_latency(steps, q, model, params.alpha);
  out.latency_between_s = 0.0;
  out.bandwidth_within_s = level_bandwidth(panel_total, q, model, params.beta);
  out.bandwidth_between_s = 0.0;
  out.latency_s = out.latency_between_s + out.latency_within_s;
  out.bandwidth_s = out.bandwidth_between_s + out.bandwidth_within_s;
  out.compute_s = compute_seconds(prob, params);
  return out;
}

CostBreakdown hsumma_comm_cost(const ModelProblem& prob, const HockneyParams& params,
                               const BcastCostModel& model, double groups) {
  validate_problem(prob);
  require_square(prob);
  if (!(groups >= 1.0 && groups <= static_cast<double>(prob.p)))
    throw std::invalid_argument("hsumma_comm_cost: groups must lie in [1, p]");
  const double n = static_cast<double>(prob.n);
  const double q_between = std::sqrt(groups);
  const double q_within = std::sqrt(static_cast<double>(prob.p) / groups);
  const double steps_between = n / static_cast<double>(prob.B);
  const double steps_within = n / static_cast<double>(prob.b);
  const double panel_total = n * n / std::sqrt(static_cast<double>(prob.p));

  CostBreakdown out;
  out.latency_within_s = level_latency(steps_within, q_within, model, params.alpha);
  out.latency_between_s = level_latency(steps_between, q_between, model, params.alpha);
  out.bandwidth_within_s = level_bandwidth(panel_total, q_within, model, params.beta);
  out.bandwidth_between_s = level_bandwidth(panel_total, q_between, model, params.beta);
  out.latency_s = out.latency_between_s + out.latency_within_s;
  out.bandwidth_s = out.bandwidth_between_s + out.bandwidth_within_s;
  out.compute_s = compute_seconds(prob, params);
  return out;
}

int hsumma_cost_derivative_sign(const ModelProblem& prob, const HockneyParams& params,
                                double groups) {
  validate_problem(prob);
  if (prob.b != prob.B)
    throw std::invalid_argument("hsumma_cost_derivative_sign: requires b == B");
  if (!(groups > 1.0 && groups < static_cast<double>(prob.p)))
    throw std::invalid_argument(
        "hsumma_cost_derivative_sign: groups must lie in the open interval (1, p)");
  const double n = static_cast<double>(prob.n);
  const double p = static_cast<double>(prob.p);
  const double shape = groups - std::sqrt(p);
  const double balance =
      n * params.alpha / static_cast<double>(prob.b) - 2.0 * n * n * params.beta / p;
  return sign_of(shape) * sign_of(balance);
}

CostRegime regime_check(const ModelProblem& prob, const HockneyParams& params) {
  validate_problem(prob);
  // alpha/beta against 2nb/p, cross-multiplied so beta = 0 stays defined.
  const double lhs = params.alpha;
  const double rhs = 2.0 * static_cast<double>(prob.n) * static_cast<double>(prob.b) /
                     static_cast<double>(prob.p) * params.beta;
  if (lhs > rhs) return CostRegime::interior_minimum;
  if (lhs < rhs) return CostRegime::interior_maximum;
  return CostRegime::degenerate;
}

std::pair<double, CostBreakdown> optimal_groups(const ModelProblem& prob,
                                                const HockneyParams& params,
                                                const BcastCostModel& model,
                                                const std::vector<double>& candidates) {
  if (candidates.empty())
    throw std::invalid_argument("optimal_groups: empty candidate list");
  const double root_p = std::sqrt(static_cast<double>(prob.p));
  bool have = false;
  double best_g = 0.0;
  CostBreakdown best{};
  for (double g : candidates) {
    CostBreakdown cand = hsumma_comm_cost(prob, params, model, g);
    if (!have) {
      have = true;
      best_g = g;
      best = cand;
      continue;
    }
    const double t = cand.total_s();
    const double bt = best.total_s();
    const bool better =
        t < bt ||
        (t == bt && (std::abs(g - root_p) < std::abs(best_g - root_p) ||
                     (std::abs(g - root_p) == std::abs(best_g - root_p) && g < best_g)));
    if (better) {
      best_g = g;
      best = cand;
    }
  }
  return {best_g, best};
}

double predict_execution(const ModelProblem& prob, const HockneyParams& params,
                         const BcastCostModel& model, double groups) {
  return hsumma_comm_cost(prob, params, model, groups).total_s();
}

}  // namespace hsumma
