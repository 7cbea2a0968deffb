#pragma once

#include "ccpxva/network.hpp"

namespace ccpxva {

struct TwoCcpSpec {
    int n_members_ccp1 = 123;
    int n_members_ccp2 = 56;
    int n_common = 24;
    double total_df_ccp1 = 200.0;
    double total_df_ccp2 = 100.0;
    double top5_share_ccp1 = 0.25;
    double top5_share_ccp2 = 0.61;
};

// Builds a two-CCP network with exponential nominal profiles fitted to the
// disclosure inputs, a block of common members, alternating position signs
// and per-CCP zero nominal sums.
ClearingNetwork build_two_ccp_network(const TwoCcpSpec& spec);

}  // namespace ccpxva
