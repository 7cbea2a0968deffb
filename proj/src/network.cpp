#include "ccpxva/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ccpxva {

const Position* Member::position_on(int ccp_id) const {
    for (const auto& p : positions)
        if (p.ccp_id == ccp_id) return &p;
    return nullptr;
}

double Member::volatility_on(int ccp_id) const {
    const auto it = volatility_per_ccp.find(ccp_id);
    if (it == volatility_per_ccp.end())
        throw std::invalid_argument("member " + std::to_string(id) +
                                    " has no volatility for ccp " + std::to_string(ccp_id));
    return it->second;
}

int ClearingNetwork::member_index(int member_id) const {
    for (std::size_t i = 0; i < members.size(); ++i)
        if (members[i].id == member_id) return static_cast<int>(i);
    return -1;
}

int ClearingNetwork::ccp_index(int ccp_id) const {
    for (std::size_t i = 0; i < ccps.size(); ++i)
        if (ccps[i].id == ccp_id) return static_cast<int>(i);
    return -1;
}

const Member& ClearingNetwork::member(int member_id) const {
    const int idx = member_index(member_id);
    if (idx < 0) throw std::out_of_range("unknown member id " + std::to_string(member_id));
    return members[idx];
}

const CcpService& ClearingNetwork::ccp(int ccp_id) const {
    const int idx = ccp_index(ccp_id);
    if (idx < 0) throw std::out_of_range("unknown ccp id " + std::to_string(ccp_id));
    return ccps[idx];
}

namespace {

std::string format_number(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

std::vector<Violation> validate_network(const ClearingNetwork& net) {
    std::vector<Violation> out;

    if (net.config.horizon_years <= 0.0)
        out.push_back({"horizon T must be positive"});

    for (const auto& m : net.members) {
        if (!(m.annual_default_prob > 0.0 && m.annual_default_prob < 1.0))
            out.push_back({"member " + std::to_string(m.id) +
                           " annual default probability outside (0,1)"});
        for (const auto& [ccp_id, vol] : m.volatility_per_ccp)
            if (vol <= 0.0)
                out.push_back({"member " + std::to_string(m.id) +
                               " non-positive volatility on ccp " + std::to_string(ccp_id)});
        // at most one position per CCP service
        for (std::size_t a = 0; a < m.positions.size(); ++a)
            for (std::size_t b = a + 1; b < m.positions.size(); ++b)
                if (m.positions[a].ccp_id == m.positions[b].ccp_id)
                    out.push_back({"member " + std::to_string(m.id) +
                                   " appears more than once on ccp " +
                                   std::to_string(m.positions[a].ccp_id)});
        for (const auto& p : m.positions)
            if (net.ccp_index(p.ccp_id) < 0)
                out.push_back({"member " + std::to_string(m.id) + " references unknown ccp " +
                               std::to_string(p.ccp_id)});
        for (const auto& b : m.bilateral_netting_sets)
            if (b.im_received < 0.0 || b.im_posted < 0.0 || b.vm_posted < 0.0)
                out.push_back({"member " + std::to_string(m.id) +
                               " bilateral set with negative margin"});
        // Bilateral sets mirror the house account: sum_b P_b = P0_house per CCP-less view.
        if (!m.bilateral_netting_sets.empty()) {
            double bilateral_sum = 0.0;
            for (const auto& b : m.bilateral_netting_sets) bilateral_sum += b.nominal;
            double house_sum = 0.0;
            for (const auto& p : m.positions) house_sum += p.house_nominal;
            const double scale = std::max(std::abs(bilateral_sum), std::abs(house_sum));
            if (std::abs(bilateral_sum - house_sum) > 1e-9 * std::max(scale, 1.0))
                out.push_back({"member " + std::to_string(m.id) +
                               " bilateral nominal sum " + format_number(bilateral_sum) +
                               " does not mirror house nominal " + format_number(house_sum)});
        }
    }

    for (const auto& c : net.ccps) {
        if (!(c.im_confidence > 0.5 && c.im_confidence < 1.0))
            out.push_back({"ccp " + std::to_string(c.id) + " IM confidence outside (1/2,1)"});
        if (c.sloim_confidence <= c.im_confidence)
            out.push_back({"ccp " + std::to_string(c.id) + " SLOIM confidence not above IM"});
        if (c.liquidation_days <= c.mpor_days)
            out.push_back({"ccp " + std::to_string(c.id) +
                           " liquidation period not above the MPoR"});
        for (int mid : c.member_ids)
            if (net.member_index(mid) < 0)
                out.push_back({"ccp " + std::to_string(c.id) + " references unknown member " +
                               std::to_string(mid)});

        double sum = 0.0, max_abs = 0.0;
        for (const auto& m : net.members) {
            if (const auto* p = m.position_on(c.id)) {
                sum += p->client_nominal + p->house_nominal;
                max_abs = std::max({max_abs, std::abs(p->client_nominal),
                                    std::abs(p->house_nominal)});
            }
        }
        if (std::abs(sum) > 1e-9 * std::max(max_abs, 1.0))
            out.push_back({"CCP " + std::to_string(c.id) + " nominal sum = " +
                           format_number(sum)});
    }

    return out;
}

double horizon_default_prob(double annual_default_prob, double horizon_years) {
    if (horizon_years <= 0.0) throw std::invalid_argument("horizon must be positive");
    return 1.0 - std::pow(1.0 - annual_default_prob, horizon_years);
}

double horizon_default_prob(const Member& member, double horizon_years) {
    return horizon_default_prob(member.annual_default_prob, horizon_years);
}

namespace {

using nlohmann::json;

Member parse_member(const json& j) {
    Member m;
    m.id = j.at("id").get<int>();
    m.annual_default_prob = j.at("annual_default_prob").get<double>();
    for (const auto& p : j.value("positions", json::array())) {
        Position pos;
        pos.ccp_id = p.at("ccp_id").get<int>();
        pos.client_nominal = p.value("client_nominal", 0.0);
        pos.house_nominal = p.value("house_nominal", 0.0);
        pos.client_default_prob = p.value("client_default_prob", 0.0);
        m.positions.push_back(pos);
    }
    if (j.contains("volatility_per_ccp"))
        for (const auto& [k, v] : j.at("volatility_per_ccp").items())
            m.volatility_per_ccp[std::stoi(k)] = v.get<double>();
    for (const auto& b : j.value("bilateral_netting_sets", json::array())) {
        BilateralSet bs;
        bs.counterparty_default_prob = b.at("counterparty_default_prob").get<double>();
        bs.nominal = b.at("nominal").get<double>();
        bs.volatility = b.at("volatility").get<double>();
        bs.vm_posted = b.value("vm_posted", 0.0);
        bs.im_received = b.value("im_received", 0.0);
        bs.im_posted = b.value("im_posted", 0.0);
        m.bilateral_netting_sets.push_back(bs);
    }
    return m;
}

CcpService parse_ccp(const json& j) {
    CcpService c;
    c.id = j.at("id").get<int>();
    c.member_ids = j.value("member_ids", std::vector<int>{});
    c.im_confidence = j.value("im_confidence", 0.95);
    c.sloim_confidence = j.value("sloim_confidence", 0.97);
    c.mpor_days = j.value("mpor_days", 2.0);
    c.liquidation_days = j.value("liquidation_days", 5.0);
    c.degrees_of_freedom = j.value("degrees_of_freedom", 3);
    if (j.contains("disclosure")) {
        Disclosure d;
        d.total_default_fund = j.at("disclosure").at("total_default_fund").get<double>();
        d.top5_share = j.at("disclosure").at("top5_share").get<double>();
        c.disclosure = d;
    }
    return c;
}

}  // namespace

ClearingNetwork network_from_json(const nlohmann::json& doc) {
    ClearingNetwork net;
    for (const auto& m : doc.at("members")) net.members.push_back(parse_member(m));
    for (const auto& c : doc.at("ccps")) net.ccps.push_back(parse_ccp(c));
    if (doc.contains("config")) {
        const auto& c = doc.at("config");
        net.config.horizon_years = c.value("horizon_years", 5.0);
        net.config.hurdle_rate = c.value("hurdle_rate", 0.10);
        net.config.ec_quantile = c.value("ec_quantile", 0.9975);
        net.config.funding_blend_ratio = c.value("funding_blend_ratio", 0.25);
    }
    // Fill in member_ids where omitted.
    for (auto& c : net.ccps) {
        if (!c.member_ids.empty()) continue;
        for (const auto& m : net.members)
            if (m.position_on(c.id)) c.member_ids.push_back(m.id);
    }
    return net;
}

nlohmann::json network_to_json(const ClearingNetwork& net) {
    json doc;
    doc["members"] = json::array();
    for (const auto& m : net.members) {
        json jm;
        jm["id"] = m.id;
        jm["annual_default_prob"] = m.annual_default_prob;
        jm["positions"] = json::array();
        for (const auto& p : m.positions) {
            json jp = {{"ccp_id", p.ccp_id},
                       {"client_nominal", p.client_nominal},
                       {"house_nominal", p.house_nominal}};
            if (p.client_default_prob > 0.0)
                jp["client_default_prob"] = p.client_default_prob;
            jm["positions"].push_back(jp);
        }
        json vols;
        for (const auto& [k, v] : m.volatility_per_ccp) vols[std::to_string(k)] = v;
        jm["volatility_per_ccp"] = vols;
        if (!m.bilateral_netting_sets.empty()) {
            jm["bilateral_netting_sets"] = json::array();
            for (const auto& b : m.bilateral_netting_sets)
                jm["bilateral_netting_sets"].push_back(
                    {{"counterparty_default_prob", b.counterparty_default_prob},
                     {"nominal", b.nominal},
                     {"volatility", b.volatility},
                     {"vm_posted", b.vm_posted},
                     {"im_received", b.im_received},
                     {"im_posted", b.im_posted}});
        }
        doc["members"].push_back(jm);
    }
    doc["ccps"] = json::array();
    for (const auto& c : net.ccps) {
        json jc;
        jc["id"] = c.id;
        jc["member_ids"] = c.member_ids;
        jc["im_confidence"] = c.im_confidence;
        jc["sloim_confidence"] = c.sloim_confidence;
        jc["mpor_days"] = c.mpor_days;
        jc["liquidation_days"] = c.liquidation_days;
        jc["degrees_of_freedom"] = c.degrees_of_freedom;
        if (c.disclosure)
            jc["disclosure"] = {{"total_default_fund", c.disclosure->total_default_fund},
                                {"top5_share", c.disclosure->top5_share}};
        doc["ccps"].push_back(jc);
    }
    doc["config"] = {{"horizon_years", net.config.horizon_years},
                     {"hurdle_rate", net.config.hurdle_rate},
                     {"ec_quantile", net.config.ec_quantile},
                     {"funding_blend_ratio", net.config.funding_blend_ratio}};
    return doc;
}

ClearingNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open network file: " + path);
    json doc = json::parse(in);
    return network_from_json(doc);
}

void save_network(const ClearingNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write network file: " + path);
    out << network_to_json(net).dump(2) << '\n';
}

ClearingNetwork single_ccp_demo_network() {
    // 20 members, one CCP service, one risk-free client each.
    const double dp[] = {0.5, 0.6, 0.7, 0.8, 0.9, 2.0, 1.9, 1.8, 1.7, 1.6,
                         1.5, 1.4, 1.3, 1.2, 1.1, 1.0, 0.9, 0.8, 0.7, 0.6};
    const double size[] = {-242, 184, 139, 105, -80, -61, -46, 35, 26, -20,
                           -15, -11, -9, -6, 5, -4, -3, 2, 2, -1};
    const double vol[] = {20, 21, 22, 23, 24, 25, 26, 27, 28, 29,
                          30, 31, 32, 33, 34, 35, 36, 37, 38, 39};

    ClearingNetwork net;
    CcpService ccp;
    ccp.id = 0;
    for (int i = 0; i < 20; ++i) {
        Member m;
        m.id = i;
        m.annual_default_prob = dp[i] / 100.0;
        m.positions.push_back({0, size[i], 0.0});
        m.volatility_per_ccp[0] = vol[i] / 100.0;
        net.members.push_back(m);
        ccp.member_ids.push_back(i);
    }
    net.ccps.push_back(ccp);
    return net;
}

}  // namespace ccpxva
