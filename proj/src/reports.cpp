#include "ccpxva/reports.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ccpxva {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

}  // namespace

void write_xva_csv(const std::string& path, const std::vector<XvaBreakdown>& rows) {
    auto out = open_out(path);
    out << "member_id,ccva,cmva,bcva,bmva,fva,ec,kva,ca,ftp,"
           "ccva_std_err,ec_std_err,n_paths_surviving\n";
    for (const auto& r : rows)
        out << r.member_id << ',' << num(r.ccva) << ',' << num(r.cmva) << ','
            << num(r.bcva) << ',' << num(r.bmva) << ',' << num(r.fva) << ','
            << num(r.ec) << ',' << num(r.kva) << ',' << num(r.ca) << ','
            << num(r.ftp) << ',' << num(r.ccva_std_err) << ',' << num(r.ec_std_err)
            << ',' << r.n_paths_surviving << '\n';
}

void write_stress_csv(const std::string& path, const std::vector<StressRow>& rows) {
    auto out = open_out(path);
    out << "member_id,p,quantile,ci_lo,ci_hi,rst_threshold,rst_probability,"
           "rst_rel_err,rst_degenerate,n_paths\n";
    for (const auto& r : rows)
        out << r.quantile.member_id << ',' << num(r.quantile.p) << ','
            << num(r.quantile.q) << ',' << num(r.quantile.ci_lo) << ','
            << num(r.quantile.ci_hi) << ',' << num(r.rst_threshold) << ','
            << num(r.rst.probability) << ',' << num(r.rst.rel_err) << ','
            << (r.rst.degenerate ? 1 : 0) << ',' << r.quantile.n_paths << '\n';
}

void write_scenarios_json(const std::string& path, int member_id,
                          const std::vector<ScenarioDescriptor>& scenarios) {
    nlohmann::json j;
    j["member_id"] = member_id;
    j["scenarios"] = nlohmann::json::array();
    for (const auto& s : scenarios) {
        nlohmann::json js;
        js["rank"] = s.rank;
        js["total_loss"] = s.total_loss;
        js["n_defaults"] = s.n_defaults;
        js["mu"] = s.mu;
        js["defaulter_ids"] = s.defaulter_ids;
        js["losses_over_collateral"] = s.losses_over_collateral;
        js["es_contribution"] = s.es_contribution;
        j["scenarios"].push_back(std::move(js));
    }
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_porting_csv(const std::string& path, const std::vector<FtpQuote>& quotes) {
    auto out = open_out(path);
    out << "assignment,delta_cmva,delta_ccva,delta_kva,delta_bcva,delta_bmva,"
           "delta_fva,self_cmva,self_ccva,self_kva,ftp_total\n";
    for (const auto& q : quotes) {
        std::string assign;
        for (const auto& [d, taker] : q.assignment) {
            if (!assign.empty()) assign += ';';
            assign += std::to_string(d) + "->" + std::to_string(taker);
        }
        out << assign << ',' << num(q.delta_cmva) << ',' << num(q.delta_ccva) << ','
            << num(q.delta_kva) << ',' << num(q.delta_bcva) << ',' << num(q.delta_bmva)
            << ',' << num(q.delta_fva) << ',' << num(q.self_cmva) << ','
            << num(q.self_ccva) << ',' << num(q.self_kva) << ',' << num(q.ftp_total)
            << '\n';
    }
}

void write_sensitivity_csv(const std::string& path, const std::vector<SensitivityRow>& rows) {
    auto out = open_out(path);
    out << "param,value,total_ccva,total_ec,total_kva\n";
    for (const auto& r : rows)
        out << r.param << ',' << num(r.value) << ',' << num(r.total_ccva) << ','
            << num(r.total_ec) << ',' << num(r.total_kva) << '\n';
}

}  // namespace ccpxva
