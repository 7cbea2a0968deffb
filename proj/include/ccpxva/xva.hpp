#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ccpxva/margining.hpp"
#include "ccpxva/network.hpp"
#include "ccpxva/simulation.hpp"

namespace ccpxva {

// Per path and CCP: CCP loss over collateral H, and the DFC mass of the
// surviving members (denominator of the mu allocation). mu of a surviving
// member is dfc / surviving_dfc; defaulted members carry mu = 0.
struct WaterfallResult {
    int n_paths = 0;
    int n_ccps = 0;
    std::vector<double> ccp_loss;       // [path * n_ccps + c], H >= 0
    std::vector<double> surviving_dfc;  // [path * n_ccps + c]

    double loss(int path, int ccp) const {
        return ccp_loss[static_cast<std::size_t>(path) * n_ccps + ccp];
    }
    double survivor_dfc(int path, int ccp) const {
        return surviving_dfc[static_cast<std::size_t>(path) * n_ccps + ccp];
    }
};

WaterfallResult waterfall(const ClearingNetwork& net, const ScenarioBatch& batch,
                          const MarginSchedule& schedule);

// mu_i on a path: J_i DFC_i / sum_{survivors} DFC.
double mu_share(const ClearingNetwork& net, const MarginSchedule& schedule,
                const WaterfallResult& wf, const ScenarioBatch& batch, int path,
                int member_index, int ccp_index);

// Shareholder counterparty-default loss C of `member_index` per path
// (meaningful on its survival paths): cleared client defaults, the allocated
// CCP losses, and bilateral counterparty defaults.
std::vector<double> member_loss(const ClearingNetwork& net, const ScenarioBatch& batch,
                                const MarginSchedule& schedule, const WaterfallResult& wf,
                                int member_index);

// Order-statistic ES estimator: mean of the top M - floor(alpha*M) values.
// `losses` need not be sorted; a copy is partially sorted internally.
double expected_shortfall(std::vector<double> losses, double alpha);
double expected_shortfall_sorted(std::span<const double> sorted_losses, double alpha);

struct BatchedEs {
    double es = 0.0;       // mean of per-batch ES
    double std_dev = 0.0;  // across batches
};
BatchedEs batched_expected_shortfall(const std::vector<std::vector<double>>& batch_losses,
                                     double alpha);

struct XvaBreakdown {
    int member_id = 0;
    double ccva = 0.0;
    double cmva = 0.0;
    double bcva = 0.0;
    double bmva = 0.0;
    double fva = 0.0;
    double ec = 0.0;
    double kva = 0.0;
    double ca = 0.0;   // ccva + cmva + bcva + bmva + fva
    double ftp = 0.0;  // ca + kva
    double var_level = 0.0;  // VaR underlying the ES estimate
    double ccva_std_err = 0.0;
    double ec_std_err = 0.0;
    std::int64_t n_paths_surviving = 0;
};

// Full breakdown for one reference member over explicit batches.
XvaBreakdown compute_xva(const ClearingNetwork& net, const MarginSchedule& schedule,
                         std::span<const ScenarioBatch> batches, int reference_member_id);

struct SimConfig {
    std::int64_t n_paths = 1'000'000;
    int n_batches = 50;
    std::uint64_t seed = 1;
    CopulaParams copula;
    int threads = 0;          // 0: CCP_XVA_THREADS env or hardware concurrency
    bool keep_losses = true;  // retain per-path losses (stress analytics)
    int scenario_member_id = -1;  // capture worst scenarios for this member
    int scenario_top_k = 0;
};

// Anatomy of one simulated tail scenario (reverse-stress reporting).
struct ScenarioRecord {
    double loss = 0.0;  // reference member's trading loss C on the path
    double mu = 0.0;
    std::vector<int> defaulter_ids;
    std::vector<double> losses_over_collateral;  // per defaulter, summed over CCPs
};

// Per-path losses of one member, grouped by batch (batch_counts sums to the
// number of surviving paths).
struct MemberLossSample {
    std::vector<float> losses;
    std::vector<std::int64_t> batch_counts;
};

struct EngineResult {
    MarginSchedule schedule;
    std::vector<XvaBreakdown> breakdowns;     // one per network member
    std::vector<MemberLossSample> losses;     // parallel to breakdowns; empty if not kept
    std::vector<ScenarioRecord> worst;        // for scenario_member_id, loss-descending
};

// Streams batches through the waterfall and loss computations for every
// member at once; deterministic for fixed (config, seed) at any thread count.
EngineResult run_engine(const ClearingNetwork& net, const SimConfig& config);

int resolve_thread_count(int requested);

}  // namespace ccpxva
