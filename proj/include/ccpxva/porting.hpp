#pragma once

#include <map>
#include <set>
#include <vector>

#include "ccpxva/xva.hpp"

namespace ccpxva {

// Aggregate incremental XVA cost of one candidate porting assignment.
struct FtpQuote {
    std::map<int, int> assignment;  // defaulted member id -> taker id
    double delta_cmva = 0.0;
    double delta_ccva = 0.0;
    double delta_kva = 0.0;
    double delta_bcva = 0.0;
    double delta_bmva = 0.0;
    double delta_fva = 0.0;
    // Same deltas restricted to the takers themselves.
    double self_cmva = 0.0;
    double self_ccva = 0.0;
    double self_kva = 0.0;
    double ftp_total = 0.0;
};

// Moves each defaulted member's client positions onto its taker, removes the
// defaulted members, and leaves margins to be recomputed on the new network.
ClearingNetwork apply_porting(const ClearingNetwork& net, const std::set<int>& defaulted,
                              const std::map<int, int>& assignment);

FtpQuote ftp_of_assignment(const ClearingNetwork& net, const std::set<int>& defaulted,
                           const std::map<int, int>& assignment, const SimConfig& config);

// Enumerates every one-taker-per-portfolio assignment among survivors and
// returns quotes sorted by ftp_total ascending (ties by taker id).
std::vector<FtpQuote> optimize_porting(const ClearingNetwork& net,
                                       const std::set<int>& defaulted, const SimConfig& config);

}  // namespace ccpxva
