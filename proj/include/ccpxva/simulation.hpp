#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccpxva/network.hpp"

namespace ccpxva {

struct CopulaParams {
    double rho_cr = 0.3;   // credit factor correlation
    double rho_mkt = 0.2;  // market factor correlation
    std::vector<double> rho_wwr = {0.2};  // per member; a single entry is broadcast
    int nu = 3;

    double rho_wwr_for(std::size_t member_index) const;
};

// ok iff sqrt(1-rho_cr) sqrt(1-rho_mkt) >= rho_wwr_i for every member.
std::optional<std::string> check_admissibility(const CopulaParams& params,
                                               std::size_t n_members);

// One block of Monte-Carlo paths. Members are indexed by their position in
// ClearingNetwork::members, CCPs by their position in ClearingNetwork::ccps,
// bilateral sets by flattening members' bilateral_netting_sets in order.
struct ScenarioBatch {
    std::uint32_t batch_id = 0;
    int n_paths = 0;
    int n_members = 0;
    int n_ccps = 0;
    int n_bilateral = 0;
    std::uint64_t seed = 0;

    std::vector<std::uint8_t> survival;  // [path * n_members + i], J_i
    std::vector<double> delta_p;         // [(path * n_members + i) * n_ccps + c], client account
    std::vector<double> delta_p_house;   // same layout; empty when all house nominals are 0
    std::vector<std::uint8_t> bilateral_survival;  // [path * n_bilateral + b]
    std::vector<double> bilateral_delta_p;         // [path * n_bilateral + b]
    // Cleared-client survival, same layout as delta_p; empty when every
    // declared client is risk-free.
    std::vector<std::uint8_t> client_survival;

    bool client_survives(int path, int member_index, int ccp_index) const {
        if (client_survival.empty()) return true;
        return client_survival[(static_cast<std::size_t>(path) * n_members + member_index) *
                                   n_ccps +
                               ccp_index] != 0;
    }
    bool survives(int path, int member_index) const {
        return survival[static_cast<std::size_t>(path) * n_members + member_index] != 0;
    }
    double dp(int path, int member_index, int ccp_index) const {
        return delta_p[(static_cast<std::size_t>(path) * n_members + member_index) * n_ccps +
                       ccp_index];
    }
    double dp_house(int path, int member_index, int ccp_index) const {
        if (delta_p_house.empty()) return 0.0;
        return delta_p_house[(static_cast<std::size_t>(path) * n_members + member_index) *
                                 n_ccps +
                             ccp_index];
    }
};

// Samples survival indicators and liquidation-period portfolio variations
// from the Student-t credit/market copula. Reproducible for fixed
// (seed, batch_id) regardless of scheduling.
ScenarioBatch sample_batch(const ClearingNetwork& net, const CopulaParams& params, int n_paths,
                           std::uint64_t seed, std::uint32_t batch_id);

// Little-endian dump of a batch for replay/debugging (layout in the docs).
void dump_batch(const ScenarioBatch& batch, const std::string& path);
ScenarioBatch read_batch_dump(const std::string& path);

}  // namespace ccpxva
