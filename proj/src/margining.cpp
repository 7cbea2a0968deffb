#include "ccpxva/margining.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace ccpxva {

double student_t_quantile(double p, int nu) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile level outside (0,1)");
    if (nu < 1) throw std::domain_error("degrees of freedom must be >= 1");
    return boost::math::quantile(boost::math::students_t(nu), p);
}

double student_t_cdf(double x, int nu) {
    return boost::math::cdf(boost::math::students_t(nu), x);
}

double initial_margin(double nominal, double vol, double dt_years, double alpha, int nu) {
    if (!(alpha > 0.5 && alpha < 1.0)) throw std::domain_error("IM confidence outside (1/2,1)");
    if (dt_years <= 0.0) throw std::domain_error("margin period must be positive");
    return std::abs(nominal) * vol * std::sqrt(dt_years) * student_t_quantile(alpha, nu);
}

double sloim(double nominal, double vol, double dt_years, double alpha, double alpha_prime,
             int nu) {
    if (alpha_prime < alpha) throw std::domain_error("SLOIM confidence below IM confidence");
    return std::abs(nominal) * vol * std::sqrt(dt_years) *
           (student_t_quantile(alpha_prime, nu) - student_t_quantile(alpha, nu));
}

Cover2Result cover2_and_allocate(const std::vector<double>& sloims) {
    if (sloims.size() < 2) throw std::invalid_argument("Cover-2 needs at least 2 members");

    // Two largest, ties broken by (value desc, index asc).
    std::vector<std::size_t> order(sloims.size());
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + 2, order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (sloims[a] != sloims[b]) return sloims[a] > sloims[b];
                          return a < b;
                      });

    Cover2Result r;
    r.cover2 = sloims[order[0]] + sloims[order[1]];
    const double total = std::accumulate(sloims.begin(), sloims.end(), 0.0);
    r.dfc.resize(sloims.size(), 0.0);
    if (total > 0.0)
        for (std::size_t i = 0; i < sloims.size(); ++i)
            r.dfc[i] = sloims[i] / total * r.cover2;
    return r;
}

const MemberMargin& MarginSchedule::at(int ccp_id, int member_id) const {
    static const MemberMargin kZero{};
    const auto ccp_it = margins.find(ccp_id);
    if (ccp_it == margins.end()) return kZero;
    const auto it = ccp_it->second.find(member_id);
    return it == ccp_it->second.end() ? kZero : it->second;
}

double MarginSchedule::total_funded(const ClearingNetwork& net, int member_id) const {
    double total = 0.0;
    for (const auto& c : net.ccps) {
        const auto& mm = at(c.id, member_id);
        total += mm.im + mm.im_house + mm.dfc;
    }
    return total;
}

MarginSchedule compute_margins(const ClearingNetwork& net) {
    MarginSchedule schedule;
    for (const auto& c : net.ccps) {
        const double dt = c.mpor_days / kBusinessDaysPerYear;
        std::vector<int> ids;
        std::vector<double> sloims;
        auto& per_member = schedule.margins[c.id];
        for (const auto& m : net.members) {
            const auto* pos = m.position_on(c.id);
            if (!pos) continue;
            const double vol = m.volatility_on(c.id);
            MemberMargin mm;
            mm.im = initial_margin(pos->client_nominal, vol, dt, c.im_confidence,
                                   c.degrees_of_freedom);
            mm.im_house = initial_margin(pos->house_nominal, vol, dt, c.im_confidence,
                                         c.degrees_of_freedom);
            mm.sloim = sloim(pos->client_nominal, vol, dt, c.im_confidence,
                             c.sloim_confidence, c.degrees_of_freedom) +
                       sloim(pos->house_nominal, vol, dt, c.im_confidence,
                             c.sloim_confidence, c.degrees_of_freedom);
            per_member[m.id] = mm;
            ids.push_back(m.id);
            sloims.push_back(mm.sloim);
        }
        if (ids.size() >= 2) {
            const auto cover = cover2_and_allocate(sloims);
            schedule.cover2[c.id] = cover.cover2;
            for (std::size_t k = 0; k < ids.size(); ++k) per_member[ids[k]].dfc = cover.dfc[k];
        } else {
            schedule.cover2[c.id] = 0.0;
        }
    }
    return schedule;
}

std::pair<double, double> fit_exponential_nominals(int n_members, double total_df,
                                                   double top5_df_share) {
    if (n_members < 6) throw std::invalid_argument("need at least 6 members to fit");
    if (!(top5_df_share > 0.0 && top5_df_share < 1.0))
        throw std::invalid_argument("top-5 share outside (0,1)");
    if (top5_df_share <= 5.0 / n_members)
        throw std::invalid_argument("top-5 share flatter than the uniform profile");

    const auto share_of = [n_members](double b) {
        double top5 = 0.0, total = 0.0;
        for (int i = 0; i < n_members; ++i) {
            const double w = std::exp(-b * (i + 1));
            total += w;
            if (i < 5) top5 += w;
        }
        return top5 / total;
    };

    // share_of is increasing in b, from 5/n at b=0 to 1 as b grows.
    double lo = 0.0, hi = 1.0;
    while (share_of(hi) < top5_df_share) hi *= 2.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * std::max(hi, 1.0); ++it) {
        const double mid = 0.5 * (lo + hi);
        (share_of(mid) < top5_df_share ? lo : hi) = mid;
    }
    const double b = 0.5 * (lo + hi);

    double total_weight = 0.0;
    for (int i = 0; i < n_members; ++i) total_weight += std::exp(-b * (i + 1));
    return {total_df / total_weight, b};
}

}  // namespace ccpxva
