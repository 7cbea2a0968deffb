#include "ccpxva/porting.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace ccpxva {

namespace {

// Per-member cost components that enter the porting deltas.
struct CostRow {
    double cmva = 0.0, ccva = 0.0, kva = 0.0, bcva = 0.0, bmva = 0.0, fva = 0.0;
};

std::unordered_map<int, CostRow> cost_table(const ClearingNetwork& net,
                                            const SimConfig& config) {
    SimConfig cfg = config;
    cfg.keep_losses = false;
    cfg.scenario_member_id = -1;
    cfg.scenario_top_k = 0;
    const EngineResult res = run_engine(net, cfg);
    std::unordered_map<int, CostRow> table;
    table.reserve(res.breakdowns.size());
    for (const auto& bd : res.breakdowns)
        table[bd.member_id] = {bd.cmva, bd.ccva, bd.kva, bd.bcva, bd.bmva, bd.fva};
    return table;
}

FtpQuote aggregate_quote(const ClearingNetwork& ported, const std::map<int, int>& assignment,
                         const std::unordered_map<int, CostRow>& baseline,
                         const std::unordered_map<int, CostRow>& after) {
    FtpQuote q;
    q.assignment = assignment;
    for (const auto& m : ported.members) {
        const CostRow& pre = baseline.at(m.id);
        const CostRow& post = after.at(m.id);
        const double d_cmva = post.cmva - pre.cmva;
        const double d_ccva = post.ccva - pre.ccva;
        const double d_kva = post.kva - pre.kva;
        q.delta_cmva += d_cmva;
        q.delta_ccva += d_ccva;
        q.delta_kva += d_kva;
        q.delta_bcva += post.bcva - pre.bcva;
        q.delta_bmva += post.bmva - pre.bmva;
        q.delta_fva += post.fva - pre.fva;
        const bool is_taker = std::any_of(assignment.begin(), assignment.end(),
                                          [&](const auto& kv) { return kv.second == m.id; });
        if (is_taker) {
            q.self_cmva += d_cmva;
            q.self_ccva += d_ccva;
            q.self_kva += d_kva;
        }
    }
    q.ftp_total = q.delta_cmva + q.delta_ccva + q.delta_kva + q.delta_bcva + q.delta_bmva +
                  q.delta_fva;
    return q;
}

}  // namespace

ClearingNetwork apply_porting(const ClearingNetwork& net, const std::set<int>& defaulted,
                              const std::map<int, int>& assignment) {
    for (const auto& [d, taker] : assignment) {
        if (!defaulted.count(d))
            throw std::invalid_argument("assignment for non-defaulted member " +
                                        std::to_string(d));
        if (defaulted.count(taker))
            throw std::invalid_argument("taker " + std::to_string(taker) + " is defaulted");
        if (net.member_index(taker) < 0)
            throw std::out_of_range("unknown taker " + std::to_string(taker));
    }
    for (int d : defaulted) {
        if (net.member_index(d) < 0)
            throw std::out_of_range("unknown defaulted member " + std::to_string(d));
        if (!assignment.count(d))
            throw std::invalid_argument("no taker assigned for member " + std::to_string(d));
    }

    ClearingNetwork out;
    out.config = net.config;
    out.ccps = net.ccps;
    for (const auto& m : net.members)
        if (!defaulted.count(m.id)) out.members.push_back(m);

    for (const auto& [d, taker] : assignment) {
        const Member& src = net.members[net.member_index(d)];
        Member& dst = out.members[out.member_index(taker)];
        for (const auto& pos : src.positions) {
            Position* existing = nullptr;
            for (auto& p : dst.positions)
                if (p.ccp_id == pos.ccp_id) existing = &p;
            if (existing) {
                existing->client_nominal += pos.client_nominal;
            } else if (pos.client_nominal != 0.0) {
                Position moved;
                moved.ccp_id = pos.ccp_id;
                moved.client_nominal = pos.client_nominal;
                dst.positions.push_back(moved);
                if (auto it = src.volatility_per_ccp.find(pos.ccp_id);
                    it != src.volatility_per_ccp.end() &&
                    !dst.volatility_per_ccp.count(pos.ccp_id))
                    dst.volatility_per_ccp[pos.ccp_id] = it->second;
            }
        }
    }

    for (auto& c : out.ccps) {
        std::erase_if(c.member_ids, [&](int id) { return defaulted.count(id) > 0; });
        for (const auto& [d, taker] : assignment) {
            const Member& src = net.members[net.member_index(d)];
            if (src.position_on(c.id) &&
                std::find(c.member_ids.begin(), c.member_ids.end(), taker) ==
                    c.member_ids.end() &&
                out.members[out.member_index(taker)].position_on(c.id))
                c.member_ids.push_back(taker);
        }
    }
    return out;
}

FtpQuote ftp_of_assignment(const ClearingNetwork& net, const std::set<int>& defaulted,
                           const std::map<int, int>& assignment, const SimConfig& config) {
    const auto baseline = cost_table(net, config);
    const ClearingNetwork ported = apply_porting(net, defaulted, assignment);
    const auto after = cost_table(ported, config);
    return aggregate_quote(ported, assignment, baseline, after);
}

std::vector<FtpQuote> optimize_porting(const ClearingNetwork& net,
                                       const std::set<int>& defaulted,
                                       const SimConfig& config) {
    std::vector<int> survivors;
    for (const auto& m : net.members)
        if (!defaulted.count(m.id)) survivors.push_back(m.id);
    if (survivors.empty()) throw std::invalid_argument("no surviving members");

    // One taker per defaulted portfolio: |survivors|^k candidate assignments.
    std::vector<int> order(defaulted.begin(), defaulted.end());
    std::vector<std::map<int, int>> assignments;
    std::map<int, int> current;
    auto recurse = [&](auto&& self, std::size_t depth) -> void {
        if (depth == order.size()) {
            assignments.push_back(current);
            return;
        }
        for (int taker : survivors) {
            current[order[depth]] = taker;
            self(self, depth + 1);
        }
    };
    recurse(recurse, 0);

    const auto baseline = cost_table(net, config);
    std::vector<FtpQuote> quotes;
    quotes.reserve(assignments.size());
    for (const auto& assignment : assignments) {
        const ClearingNetwork ported = apply_porting(net, defaulted, assignment);
        quotes.push_back(
            aggregate_quote(ported, assignment, baseline, cost_table(ported, config)));
    }

    std::sort(quotes.begin(), quotes.end(), [](const FtpQuote& a, const FtpQuote& b) {
        if (a.ftp_total != b.ftp_total) return a.ftp_total < b.ftp_total;
        return a.assignment < b.assignment;
    });
    return quotes;
}

}  // namespace ccpxva
