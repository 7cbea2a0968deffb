#include "ccpxva/stress.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ccpxva {

QuantileReportRow extreme_quantile(std::vector<double> losses, double p, double ci_level) {
    if (losses.empty()) throw std::invalid_argument("empty loss sample");
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("quantile level must be in (0,1)");
    const auto n = static_cast<std::int64_t>(losses.size());
    if ((1.0 - p) * static_cast<double>(n) < 20.0)
        throw std::invalid_argument("insufficient tail sample for quantile level");
    std::sort(losses.begin(), losses.end());

    QuantileReportRow row;
    row.p = p;
    row.n_paths = n;
    const auto idx = static_cast<std::int64_t>(std::ceil(p * static_cast<double>(n))) - 1;
    row.q = losses[std::clamp<std::int64_t>(idx, 0, n - 1)];

    // Distribution-free order-statistic bracket: find l, u such that
    // P(X_(l) <= q_p <= X_(u)) >= ci_level using the binomial CDF.
    const boost::math::binomial_distribution<double> bin(static_cast<double>(n), p);
    const double tail = (1.0 - ci_level) / 2.0;
    std::int64_t lo = idx, hi = idx;
    auto coverage = [&](std::int64_t l, std::int64_t u) {
        // P(l <= #{X_i <= q_p} < u+1) = F(u) - F(l-1), counts in [0, n].
        const double fu = boost::math::cdf(bin, static_cast<double>(u));
        const double fl = l > 0 ? boost::math::cdf(bin, static_cast<double>(l - 1)) : 0.0;
        return fu - fl;
    };
    while (lo > 0 &&
           boost::math::cdf(bin, static_cast<double>(lo - 1)) > tail)
        --lo;
    while (hi < n - 1 &&
           boost::math::cdf(boost::math::complement(bin, static_cast<double>(hi))) > tail)
        ++hi;
    // Widen once more if joint coverage still falls short.
    while (coverage(lo, hi) < ci_level && (lo > 0 || hi < n - 1)) {
        if (lo > 0) --lo;
        if (hi < n - 1) ++hi;
    }
    if (row.q != 0.0) {
        row.ci_lo = losses[lo] / row.q - 1.0;
        row.ci_hi = losses[hi] / row.q - 1.0;
    } else {
        row.ci_lo = losses[lo] - row.q;
        row.ci_hi = losses[hi] - row.q;
    }
    // Enforce sign convention under q < 0 or ties.
    if (row.ci_lo > 0.0 && row.ci_hi < 0.0) std::swap(row.ci_lo, row.ci_hi);
    row.ci_lo = std::min(row.ci_lo, 0.0);
    row.ci_hi = std::max(row.ci_hi, 0.0);
    return row;
}

RstProbability rst_probability(const MemberLossSample& sample, double threshold) {
    if (sample.losses.empty()) throw std::invalid_argument("empty loss sample");
    RstProbability out;
    std::int64_t exceed_total = 0;
    std::vector<double> batch_probs;
    std::size_t offset = 0;
    for (std::int64_t count : sample.batch_counts) {
        std::int64_t exceed = 0;
        for (std::int64_t i = 0; i < count; ++i)
            if (sample.losses[offset + i] > threshold) ++exceed;
        exceed_total += exceed;
        if (count > 0)
            batch_probs.push_back(static_cast<double>(exceed) / static_cast<double>(count));
        offset += count;
    }
    const auto n = static_cast<double>(sample.losses.size());
    out.probability = static_cast<double>(exceed_total) / n;
    out.degenerate = exceed_total < 10;
    if (batch_probs.size() > 1 && out.probability > 0.0) {
        const double mean = std::accumulate(batch_probs.begin(), batch_probs.end(), 0.0) /
                            static_cast<double>(batch_probs.size());
        double acc = 0.0;
        for (double q : batch_probs) acc += (q - mean) * (q - mean);
        const double sd = std::sqrt(acc / static_cast<double>(batch_probs.size() - 1));
        out.rel_err = sd / std::sqrt(static_cast<double>(batch_probs.size())) / out.probability;
    }
    return out;
}

double leave_one_out_es(double es, std::int64_t m, double alpha, double removed_loss) {
    if (m < 2) throw std::invalid_argument("need at least two paths");
    const auto cut_m = static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(m)));
    const auto cut_m1 =
        static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(m - 1)));
    const std::int64_t k = m - cut_m;
    const std::int64_t k1 = (m - 1) - cut_m1;
    if (k1 < 1) throw std::invalid_argument("tail too small after removal");
    return (static_cast<double>(k) * es - removed_loss) / static_cast<double>(k1);
}

std::vector<ScenarioDescriptor> ec_scenario_contributions(const MemberLossSample& sample,
                                                          const std::vector<ScenarioRecord>& worst,
                                                          double alpha, int top_k) {
    const auto m = static_cast<std::int64_t>(sample.losses.size());
    if (m < 2) throw std::invalid_argument("empty loss sample");

    std::vector<double> sorted(sample.losses.begin(), sample.losses.end());
    std::sort(sorted.begin(), sorted.end());
    const double es = expected_shortfall_sorted(sorted, alpha);

    std::vector<ScenarioDescriptor> out;
    const int n = std::min<int>(top_k, static_cast<int>(worst.size()));
    out.reserve(n);
    for (int r = 0; r < n; ++r) {
        const auto& rec = worst[r];
        ScenarioDescriptor d;
        d.rank = r + 1;
        d.total_loss = rec.loss;
        d.n_defaults = static_cast<int>(rec.defaulter_ids.size());
        d.mu = rec.mu;
        d.defaulter_ids = rec.defaulter_ids;
        d.losses_over_collateral = rec.losses_over_collateral;
        d.es_contribution = es - leave_one_out_es(es, m, alpha, rec.loss);
        out.push_back(std::move(d));
    }
    return out;
}

ClearingNetwork restrict_to_ccp(const ClearingNetwork& net, int ccp_id) {
    const int c = net.ccp_index(ccp_id);
    if (c < 0) throw std::out_of_range("unknown CCP id");
    ClearingNetwork out;
    out.config = net.config;
    out.ccps.push_back(net.ccps[c]);
    out.ccps[0].member_ids.clear();
    for (const auto& m : net.members) {
        const Position* pos = m.position_on(ccp_id);
        if (!pos) continue;
        Member copy;
        copy.id = m.id;
        copy.annual_default_prob = m.annual_default_prob;
        copy.positions.push_back(*pos);
        if (auto it = m.volatility_per_ccp.find(ccp_id); it != m.volatility_per_ccp.end())
            copy.volatility_per_ccp[ccp_id] = it->second;
        copy.bilateral_netting_sets = m.bilateral_netting_sets;
        out.members.push_back(std::move(copy));
        out.ccps[0].member_ids.push_back(m.id);
    }
    return out;
}

}  // namespace ccpxva
