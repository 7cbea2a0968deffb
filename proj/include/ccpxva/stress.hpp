#pragma once

#include <cstdint>
#include <vector>

#include "ccpxva/xva.hpp"

namespace ccpxva {

struct QuantileReportRow {
    int member_id = 0;
    double q = 0.0;
    double ci_lo = 0.0;  // relative deviation, <= 0
    double ci_hi = 0.0;  // relative deviation, >= 0
    double p = 0.0;
    std::int64_t n_paths = 0;
};

// Empirical order-statistic quantile with a distribution-free binomial
// bracket confidence interval. Requires (1-p) * n >= 20.
QuantileReportRow extreme_quantile(std::vector<double> losses, double p,
                                   double ci_level = 0.95);

struct RstProbability {
    double probability = 0.0;
    double rel_err = 0.0;  // relative std-dev across batches; 0 flagged degenerate
    bool degenerate = false;
};

// Empirical P(loss >= threshold) with an across-batch error estimate.
RstProbability rst_probability(const MemberLossSample& sample, double threshold);

// Leave-one-out ES estimate after removing the tail scenario with loss
// `removed_loss` from a sample of size m whose ES at level alpha is `es`.
double leave_one_out_es(double es, std::int64_t m, double alpha, double removed_loss);

struct ScenarioDescriptor {
    int rank = 0;  // 1 = worst
    double total_loss = 0.0;
    int n_defaults = 0;
    double mu = 0.0;
    std::vector<int> defaulter_ids;
    std::vector<double> losses_over_collateral;
    double es_contribution = 0.0;  // delta_m' = ES - ES^{-m'}
};

// Ranks the captured worst scenarios of a member and attaches their
// contributions to the ES estimate built from `sample`.
std::vector<ScenarioDescriptor> ec_scenario_contributions(const MemberLossSample& sample,
                                                          const std::vector<ScenarioRecord>& worst,
                                                          double alpha, int top_k);

// Hypothetical network holding only the positions of one CCP service, with
// membership pruned accordingly; margins are meant to be resized on it.
ClearingNetwork restrict_to_ccp(const ClearingNetwork& net, int ccp_id);

}  // namespace ccpxva
