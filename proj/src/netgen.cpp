#include "ccpxva/netgen.hpp"

#include <cmath>
#include <stdexcept>

#include "ccpxva/margining.hpp"

namespace ccpxva {

namespace {

// Signed nominal ladder for one CCP: exponential magnitudes by rank,
// alternating signs, smallest member adjusted so the book clears to zero.
std::vector<double> nominal_ladder(int n, double total_df, double top5_share) {
    const auto [a, b] = fit_exponential_nominals(n, total_df, top5_share);
    std::vector<double> out(n);
    double sum = 0.0;
    for (int r = 0; r < n; ++r) {
        const double mag = a * std::exp(-b * (r + 1));
        out[r] = (r % 2 == 0) ? mag : -mag;
        if (r < n - 1) sum += out[r];
    }
    out[n - 1] = -sum;
    return out;
}

double default_prob_for(int id) { return 0.005 + 0.001 * (id % 16); }
double volatility_for(int id) { return 0.20 + 0.01 * (id % 11); }

}  // namespace

ClearingNetwork build_two_ccp_network(const TwoCcpSpec& spec) {
    if (spec.n_common < 0 || spec.n_common > spec.n_members_ccp2 ||
        spec.n_common > spec.n_members_ccp1)
        throw std::invalid_argument("common member count exceeds a CCP's membership");

    const int n1 = spec.n_members_ccp1;
    const int n2 = spec.n_members_ccp2;
    const auto ladder1 = nominal_ladder(n1, spec.total_df_ccp1, spec.top5_share_ccp1);
    const auto ladder2 = nominal_ladder(n2, spec.total_df_ccp2, spec.top5_share_ccp2);

    ClearingNetwork net;
    CcpService ccp1;
    ccp1.id = 0;
    ccp1.disclosure = Disclosure{spec.total_df_ccp1, spec.top5_share_ccp1};
    CcpService ccp2;
    ccp2.id = 1;
    ccp2.disclosure = Disclosure{spec.total_df_ccp2, spec.top5_share_ccp2};

    // Common members sit on both CCPs: every fifth CCP1 member starting at
    // id 3, taking the top CCP2 ranks. Their CCP2 sign is flipped so the
    // cross-CCP books offset rather than pile up.
    const int stride = spec.n_common > 0 ? std::max(1, (n1 - 3) / spec.n_common) : 1;
    std::vector<int> common_rank_on_ccp2(n1, -1);
    for (int k = 0; k < spec.n_common; ++k) {
        const int id = 3 + stride * k;
        if (id >= n1) throw std::invalid_argument("cannot place common members");
        common_rank_on_ccp2[id] = k;
    }

    for (int id = 0; id < n1; ++id) {
        Member m;
        m.id = id;
        m.annual_default_prob = default_prob_for(id);
        Position p1;
        p1.ccp_id = ccp1.id;
        p1.client_nominal = ladder1[id];
        m.positions.push_back(p1);
        m.volatility_per_ccp[ccp1.id] = volatility_for(id);
        ccp1.member_ids.push_back(id);
        if (const int r2 = common_rank_on_ccp2[id]; r2 >= 0) {
            Position p2;
            p2.ccp_id = ccp2.id;
            p2.client_nominal = -ladder2[r2];
            m.positions.push_back(p2);
            m.volatility_per_ccp[ccp2.id] = volatility_for(id);
            ccp2.member_ids.push_back(id);
        }
        net.members.push_back(std::move(m));
    }

    for (int k = spec.n_common; k < n2; ++k) {
        Member m;
        m.id = n1 + (k - spec.n_common);
        m.annual_default_prob = default_prob_for(m.id);
        Position p2;
        p2.ccp_id = ccp2.id;
        // Flip all CCP2 signs so the common-member flips above still clear.
        p2.client_nominal = -ladder2[k];
        m.positions.push_back(p2);
        m.volatility_per_ccp[ccp2.id] = volatility_for(m.id);
        ccp2.member_ids.push_back(m.id);
        net.members.push_back(std::move(m));
    }

    net.ccps.push_back(std::move(ccp1));
    net.ccps.push_back(std::move(ccp2));
    return net;
}

}  // namespace ccpxva
