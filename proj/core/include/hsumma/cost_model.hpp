#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hsumma/broadcast.hpp"
#include "hsumma/hockney.hpp"

namespace hsumma {

// Closed-form problem instance: n x n matrices on p processors, inner panel
// width b and outer (between-group) panel width B.  The grid is assumed
// square (sqrt(p) x sqrt(p)) by every cost function that needs a grid shape.
struct ModelProblem {
  std::int64_t n = 0;
  std::int64_t p = 1;
  std::int64_t b = 1;
  std::int64_t B = 1;
};

ModelProblem make_model_problem(std::int64_t n, std::int64_t p, std::int64_t b,
                                std::int64_t B);

// Cost of one broadcast over q ranks as latency_multiplier(q) * alpha +
// m * bandwidth_multiplier(q) * beta.  Both multipliers are 0 at q = 1.
struct BcastCostModel {
  std::string name;
  std::function<double(double)> latency_multiplier;    // L(q)
  std::function<double(double)> bandwidth_multiplier;  // W(q)
};

// flat:          L(q) = W(q) = q - 1
// binomial:      L(q) = W(q) = log2(q)
// van_de_geijn:  L(q) = log2(q) + q - 1,  W(q) = 2 (q - 1) / q
BcastCostModel bcast_cost_model(BroadcastAlg alg);

// Predicted execution time split into alpha, beta and gamma terms, with the
// communication terms further split by broadcast level (within a group vs
// between groups).  total_s() is the sum of the three parts by construction.
struct CostBreakdown {
  double latency_s = 0.0;
  double bandwidth_s = 0.0;
  double compute_s = 0.0;
  double latency_within_s = 0.0;
  double latency_between_s = 0.0;
  double bandwidth_within_s = 0.0;
  double bandwidth_between_s = 0.0;

  double total_s() const { return latency_s + bandwidth_s + compute_s; }
};

// Flat (single level) algorithm cost:
//   latency   = 2 (n/b) L(sqrt(p)) alpha
//   bandwidth = 2 (n^2 / sqrt(p)) W(sqrt(p)) beta
//   compute   = (n^3 / p) gamma
// Throws std::invalid_argument if p is not a perfect square or b does not
// divide n.
CostBreakdown summa_comm_cost(const ModelProblem& prob, const HockneyParams& params,
                              const BcastCostModel& model);

// Two-level algorithm cost with G groups:
//   latency   = 2 (n/B) L(sqrt(G)) alpha + 2 (n/b) L(sqrt(p/G)) alpha
//   bandwidth = 2 (n^2 / sqrt(p)) [W(sqrt(G)) + W(sqrt(p/G))] beta
//   compute   = (n^3 / p) gamma
// `groups` may be any real value in [1, p] so the cost curve can be evaluated
// continuously; integrality and divisibility only matter when a grouping is
// actually materialized.  G = 1 and G = p reproduce summa_comm_cost exactly
// (for G = p when b == B).
CostBreakdown hsumma_comm_cost(const ModelProblem& prob, const HockneyParams& params,
                               const BcastCostModel& model, double groups);

// Sign of the derivative d/dG of the van de Geijn two-level cost at G in the
// open interval (1, p), for b == B:
//   dT/dG = (G - sqrt(p)) / (G sqrt(G)) * (n alpha / b - 2 n^2 beta / p)
// Returns -1, 0 or +1.
int hsumma_cost_derivative_sign(const ModelProblem& prob, const HockneyParams& params,
                                double groups);

// Shape of the van de Geijn cost curve in G, decided by comparing alpha/beta
// against the threshold 2 n b / p.
enum class CostRegime {
  interior_minimum,  // alpha/beta above the threshold: minimum at G = sqrt(p)
  interior_maximum,  // alpha/beta below the threshold: maximum at G = sqrt(p)
  degenerate,        // alpha/beta equal to the threshold: cost flat in G
};

const char* to_string(CostRegime regime);
CostRegime regime_check(const ModelProblem& prob, const HockneyParams& params);

// Evaluates the two-level cost at every candidate group count and returns the
// best (G, breakdown).  Ties are broken towards the G closest to sqrt(p),
// then towards the smaller G.  Candidates must lie in [1, p]; admissibility
// for a concrete grouping (square G, divisibility of the grid) is the
// caller's concern so rectangular groupings can reuse this.  Throws
// std::invalid_argument on an empty candidate list.
std::pair<double, CostBreakdown> optimal_groups(const ModelProblem& prob,
                                                const HockneyParams& params,
                                                const BcastCostModel& model,
                                                const std::vector<double>& candidates);

// Total predicted seconds for the two-level algorithm with G groups; equals
// hsumma_comm_cost(...).total_s().  With gamma = 0 this is communication
// time alone.
double predict_execution(const ModelProblem& prob, const HockneyParams& params,
                         const BcastCostModel& model, double groups);

}  // namespace hsumma
