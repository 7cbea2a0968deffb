#pragma once

#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ccpxva/network.hpp"

namespace ccpxva {

inline constexpr double kBusinessDaysPerYear = 252.0;

// Student-t quantile, S_nu^{-1}(p).
double student_t_quantile(double p, int nu);
// Student-t CDF, S_nu(x).
double student_t_cdf(double x, int nu);

// |N| sigma sqrt(dt) S_nu^{-1}(alpha), dt in years.
double initial_margin(double nominal, double vol, double dt_years, double alpha, int nu);

// |N| sigma sqrt(dt) (S_nu^{-1}(alpha') - S_nu^{-1}(alpha)).
double sloim(double nominal, double vol, double dt_years, double alpha, double alpha_prime,
             int nu);

struct MemberMargin {
    double im = 0.0;        // client account
    double im_house = 0.0;  // house account
    double sloim = 0.0;
    double dfc = 0.0;
};

struct Cover2Result {
    double cover2 = 0.0;
    std::vector<double> dfc;  // same order as the input sloims
};

// cover2 = sum of the two largest sloims; dfc_i = sloim_i / sum_j sloim_j * cover2.
Cover2Result cover2_and_allocate(const std::vector<double>& sloims);

struct MarginSchedule {
    // margins[ccp_id][member_id]
    std::map<int, std::unordered_map<int, MemberMargin>> margins;
    std::map<int, double> cover2;

    const MemberMargin& at(int ccp_id, int member_id) const;
    // IM + IM_house + DFC summed over the member's CCP services.
    double total_funded(const ClearingNetwork& net, int member_id) const;
};

MarginSchedule compute_margins(const ClearingNetwork& net);

// Fits N_(i) = a exp(-b (i+1)) to a total default fund and the share of it
// held by the five largest members. Root-find on b, then scale a.
std::pair<double, double> fit_exponential_nominals(int n_members, double total_df,
                                                   double top5_df_share);

}  // namespace ccpxva
