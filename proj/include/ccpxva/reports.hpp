#pragma once

#include <string>
#include <vector>

#include "ccpxva/porting.hpp"
#include "ccpxva/stress.hpp"
#include "ccpxva/xva.hpp"

namespace ccpxva {

// One stress-report line: extreme quantile plus the reverse-stress breach
// probability at threshold = rst_multiplier * quantile.
struct StressRow {
    QuantileReportRow quantile;
    double rst_threshold = 0.0;
    RstProbability rst;
};

struct SensitivityRow {
    std::string param;
    double value = 0.0;
    double total_ccva = 0.0;
    double total_ec = 0.0;
    double total_kva = 0.0;
};

// All writers produce byte-identical files for identical inputs.
void write_xva_csv(const std::string& path, const std::vector<XvaBreakdown>& rows);
void write_stress_csv(const std::string& path, const std::vector<StressRow>& rows);
void write_scenarios_json(const std::string& path, int member_id,
                          const std::vector<ScenarioDescriptor>& scenarios);
void write_porting_csv(const std::string& path, const std::vector<FtpQuote>& quotes);
void write_sensitivity_csv(const std::string& path, const std::vector<SensitivityRow>& rows);

}  // namespace ccpxva
