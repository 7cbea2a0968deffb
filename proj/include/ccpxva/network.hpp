#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ccpxva {

// One bilateral netting set of a member with an (off-network) counterparty.
// Mark-to-market of the set is normalized to zero, so `vm_posted` is the net
// variation margin the member has posted to the counterparty (a funding need)
// and `nominal` drives the one-period value slippage.
struct BilateralSet {
    double counterparty_default_prob = 0.0;  // annual
    double nominal = 0.0;                    // signed
    double volatility = 0.0;                 // annualized, relative
    double vm_posted = 0.0;
    double im_received = 0.0;
    double im_posted = 0.0;
};

struct Position {
    int ccp_id = 0;
    double client_nominal = 0.0;  // signed
    double house_nominal = 0.0;   // signed
    double client_default_prob = 0.0;  // annual; 0 means a risk-free client
};

struct Member {
    int id = 0;
    double annual_default_prob = 0.0;  // in (0,1)
    std::vector<Position> positions;
    std::map<int, double> volatility_per_ccp;  // annualized, in (0,1)
    std::vector<BilateralSet> bilateral_netting_sets;

    const Position* position_on(int ccp_id) const;
    double volatility_on(int ccp_id) const;
};

// Quarterly public disclosure figures used to fit nominal profiles.
struct Disclosure {
    double total_default_fund = 0.0;
    double top5_share = 0.0;  // fraction of DF held by the 5 largest members
};

struct CcpService {
    int id = 0;
    std::vector<int> member_ids;
    double im_confidence = 0.95;     // alpha
    double sloim_confidence = 0.97;  // alpha' > alpha
    double mpor_days = 2.0;          // Delta_s, business days
    double liquidation_days = 5.0;   // Delta_l > Delta_s, business days
    int degrees_of_freedom = 3;      // nu
    std::optional<Disclosure> disclosure;
};

struct NetworkConfig {
    double horizon_years = 5.0;       // T
    double hurdle_rate = 0.10;        // h
    double ec_quantile = 0.9975;      // alpha for EC
    double funding_blend_ratio = 0.25;  // gamma_tilde / gamma
};

struct ClearingNetwork {
    std::vector<Member> members;
    std::vector<CcpService> ccps;
    NetworkConfig config;

    int member_index(int member_id) const;  // -1 if absent
    int ccp_index(int ccp_id) const;
    const Member& member(int member_id) const;
    const CcpService& ccp(int ccp_id) const;
};

struct Violation {
    std::string what;
};

// Structural checks: per-CCP nominal sums, resolvable references,
// bilateral sums mirroring the house account. Violations are data.
std::vector<Violation> validate_network(const ClearingNetwork& net);

// Constant-hazard compounding of an annual default probability to horizon T.
double horizon_default_prob(double annual_default_prob, double horizon_years);
double horizon_default_prob(const Member& member, double horizon_years);

ClearingNetwork network_from_json(const nlohmann::json& doc);
nlohmann::json network_to_json(const ClearingNetwork& net);
ClearingNetwork load_network(const std::string& path);
void save_network(const ClearingNetwork& net, const std::string& path);

// The 20-member single-CCP study network, used by tests and as a demo input.
ClearingNetwork single_ccp_demo_network();

}  // namespace ccpxva
