#include "ccpxva/xva.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace ccpxva {

namespace {

// Margins flattened to [member_index * n_ccps + ccp_index] for the hot loops.
struct FlatMargins {
    int n_members = 0;
    int n_ccps = 0;
    std::vector<double> im, im_house, dfc;
    std::vector<std::uint8_t> on_ccp;

    FlatMargins(const ClearingNetwork& net, const MarginSchedule& schedule)
        : n_members(static_cast<int>(net.members.size())),
          n_ccps(static_cast<int>(net.ccps.size())) {
        const std::size_t n = static_cast<std::size_t>(n_members) * n_ccps;
        im.assign(n, 0.0);
        im_house.assign(n, 0.0);
        dfc.assign(n, 0.0);
        on_ccp.assign(n, 0);
        for (int i = 0; i < n_members; ++i)
            for (int c = 0; c < n_ccps; ++c) {
                if (!net.members[i].position_on(net.ccps[c].id)) continue;
                const auto& mm = schedule.at(net.ccps[c].id, net.members[i].id);
                const std::size_t k = static_cast<std::size_t>(i) * n_ccps + c;
                im[k] = mm.im;
                im_house[k] = mm.im_house;
                dfc[k] = mm.dfc;
                on_ccp[k] = 1;
            }
    }
};

inline double pos_part(double x) { return x > 0.0 ? x : 0.0; }

// Defaulted member's loss to the CCP beyond collateral on one (path, ccp).
inline double loss_over_collateral(const ScenarioBatch& batch, const FlatMargins& fm, int path,
                                   int i, int c) {
    const std::size_t k = static_cast<std::size_t>(i) * fm.n_ccps + c;
    if (!fm.on_ccp[k]) return 0.0;
    return pos_part(pos_part(batch.dp(path, i, c) - fm.im[k]) +
                    pos_part(batch.dp_house(path, i, c) - fm.im_house[k]) - fm.dfc[k]);
}

void compute_waterfall_path(const ScenarioBatch& batch, const FlatMargins& fm, int path,
                            double* h_out, double* sdfc_out) {
    for (int c = 0; c < fm.n_ccps; ++c) {
        h_out[c] = 0.0;
        sdfc_out[c] = 0.0;
    }
    for (int i = 0; i < fm.n_members; ++i) {
        const bool alive = batch.survives(path, i);
        for (int c = 0; c < fm.n_ccps; ++c) {
            const std::size_t k = static_cast<std::size_t>(i) * fm.n_ccps + c;
            if (!fm.on_ccp[k]) continue;
            if (alive)
                sdfc_out[c] += fm.dfc[k];
            else
                h_out[c] += loss_over_collateral(batch, fm, path, i, c);
        }
    }
}

// Bilateral sets flattened across members: [first, last) slice per member.
struct BilateralIndex {
    std::vector<int> first;  // size n_members + 1
    explicit BilateralIndex(const ClearingNetwork& net) {
        first.reserve(net.members.size() + 1);
        int acc = 0;
        for (const auto& m : net.members) {
            first.push_back(acc);
            acc += static_cast<int>(m.bilateral_netting_sets.size());
        }
        first.push_back(acc);
    }
};

// Cleared (client defaults + allocated CCP losses) and bilateral loss parts
// of member `o` on one path; valid on its survival paths.
struct LossParts {
    double cleared = 0.0;
    double bilateral = 0.0;
};

LossParts member_loss_parts(const ClearingNetwork& net, const ScenarioBatch& batch,
                            const FlatMargins& fm, const BilateralIndex& bidx,
                            const double* h, const double* sdfc, int path, int o) {
    LossParts parts;
    for (int c = 0; c < fm.n_ccps; ++c) {
        const std::size_t k = static_cast<std::size_t>(o) * fm.n_ccps + c;
        if (!fm.on_ccp[k]) continue;
        if (h[c] > 0.0 && sdfc[c] > 0.0)
            parts.cleared += fm.dfc[k] / sdfc[c] * h[c];
        if (!batch.client_survival.empty() && !batch.client_survives(path, o, c))
            parts.cleared += pos_part(batch.dp(path, o, c) - fm.im[k]);
    }
    const auto& sets = net.members[o].bilateral_netting_sets;
    for (int b = bidx.first[o]; b < bidx.first[o + 1]; ++b) {
        const std::size_t k = static_cast<std::size_t>(path) * batch.n_bilateral + b;
        if (batch.bilateral_survival[k]) continue;
        const auto& bs = sets[b - bidx.first[o]];
        parts.bilateral +=
            pos_part(batch.bilateral_delta_p[k] + bs.vm_posted - bs.im_received);
    }
    return parts;
}

double sample_std_dev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / (xs.size() - 1));
}

}  // namespace

WaterfallResult waterfall(const ClearingNetwork& net, const ScenarioBatch& batch,
                          const MarginSchedule& schedule) {
    const FlatMargins fm(net, schedule);
    WaterfallResult wf;
    wf.n_paths = batch.n_paths;
    wf.n_ccps = batch.n_ccps;
    wf.ccp_loss.resize(static_cast<std::size_t>(batch.n_paths) * batch.n_ccps);
    wf.surviving_dfc.resize(wf.ccp_loss.size());
    for (int p = 0; p < batch.n_paths; ++p)
        compute_waterfall_path(batch, fm, p,
                               &wf.ccp_loss[static_cast<std::size_t>(p) * batch.n_ccps],
                               &wf.surviving_dfc[static_cast<std::size_t>(p) * batch.n_ccps]);
    return wf;
}

double mu_share(const ClearingNetwork& net, const MarginSchedule& schedule,
                const WaterfallResult& wf, const ScenarioBatch& batch, int path,
                int member_index, int ccp_index) {
    if (!batch.survives(path, member_index)) return 0.0;
    const auto& mm =
        schedule.at(net.ccps[ccp_index].id, net.members[member_index].id);
    const double denom = wf.survivor_dfc(path, ccp_index);
    return denom > 0.0 ? mm.dfc / denom : 0.0;
}

std::vector<double> member_loss(const ClearingNetwork& net, const ScenarioBatch& batch,
                                const MarginSchedule& schedule, const WaterfallResult& wf,
                                int member_index) {
    const FlatMargins fm(net, schedule);
    const BilateralIndex bidx(net);
    std::vector<double> out(batch.n_paths, 0.0);
    for (int p = 0; p < batch.n_paths; ++p) {
        if (!batch.survives(p, member_index)) continue;
        const auto parts = member_loss_parts(
            net, batch, fm, bidx, &wf.ccp_loss[static_cast<std::size_t>(p) * batch.n_ccps],
            &wf.surviving_dfc[static_cast<std::size_t>(p) * batch.n_ccps], p, member_index);
        out[p] = parts.cleared + parts.bilateral;
    }
    return out;
}

double expected_shortfall(std::vector<double> losses, double alpha) {
    const auto m = static_cast<std::int64_t>(losses.size());
    if (m < 1 || static_cast<double>(m) < 1.0 / (1.0 - alpha))
        throw std::invalid_argument("insufficient tail sample for expected shortfall");
    const auto cut = static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(m)));
    const std::int64_t k = m - cut;  // top k order statistics
    std::nth_element(losses.begin(), losses.begin() + cut, losses.end());
    const double sum = std::accumulate(losses.begin() + cut, losses.end(), 0.0);
    return sum / static_cast<double>(k);
}

double expected_shortfall_sorted(std::span<const double> sorted_losses, double alpha) {
    const auto m = static_cast<std::int64_t>(sorted_losses.size());
    if (m < 1 || static_cast<double>(m) < 1.0 / (1.0 - alpha))
        throw std::invalid_argument("insufficient tail sample for expected shortfall");
    const auto cut = static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(m)));
    double sum = 0.0;
    for (std::int64_t i = cut; i < m; ++i) sum += sorted_losses[i];
    return sum / static_cast<double>(m - cut);
}

BatchedEs batched_expected_shortfall(const std::vector<std::vector<double>>& batch_losses,
                                     double alpha) {
    std::vector<double> es;
    es.reserve(batch_losses.size());
    for (const auto& b : batch_losses) es.push_back(expected_shortfall(b, alpha));
    BatchedEs out;
    out.es = std::accumulate(es.begin(), es.end(), 0.0) / static_cast<double>(es.size());
    out.std_dev = sample_std_dev(es);
    return out;
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CCP_XVA_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

struct MemberBatchStats {
    std::int64_t count = 0;
    double sum_cleared = 0.0;
    double sum_bilateral = 0.0;
    double es = 0.0;   // ES of raw C on this batch
    double var = 0.0;  // matching VaR order statistic
};

struct BatchOutput {
    std::vector<MemberBatchStats> stats;        // per member
    std::vector<std::vector<float>> losses;     // per member, surviving paths (optional)
    std::vector<ScenarioRecord> worst;          // top-k for the scenario member (optional)
};

// Tail statistics of one member's batch losses (raw C, uncentered).
void tail_stats(std::vector<double>& losses, double alpha, MemberBatchStats& st) {
    const auto m = static_cast<std::int64_t>(losses.size());
    if (m < 1 || static_cast<double>(m) < 1.0 / (1.0 - alpha)) {
        st.es = 0.0;
        st.var = 0.0;
        return;
    }
    const auto cut = static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(m)));
    std::nth_element(losses.begin(), losses.begin() + cut, losses.end());
    st.var = losses[cut];
    st.es = std::accumulate(losses.begin() + cut, losses.end(), 0.0) /
            static_cast<double>(m - cut);
}

ScenarioRecord describe_scenario(const ClearingNetwork& net, const ScenarioBatch& batch,
                                 const FlatMargins& fm, const double* h, const double* sdfc,
                                 int path, int member_index, double loss) {
    ScenarioRecord rec;
    rec.loss = loss;
    for (int i = 0; i < fm.n_members; ++i) {
        if (batch.survives(path, i)) continue;
        rec.defaulter_ids.push_back(net.members[i].id);
        double loc = 0.0;
        for (int c = 0; c < fm.n_ccps; ++c) loc += loss_over_collateral(batch, fm, path, i, c);
        rec.losses_over_collateral.push_back(loc);
    }
    // Loss-weighted mu over the member's CCP services (plain mu when single).
    double mu_num = 0.0, mu_den = 0.0, mu_any = 0.0;
    for (int c = 0; c < fm.n_ccps; ++c) {
        const std::size_t k = static_cast<std::size_t>(member_index) * fm.n_ccps + c;
        if (!fm.on_ccp[k] || sdfc[c] <= 0.0) continue;
        const double mu_c = fm.dfc[k] / sdfc[c];
        mu_any = mu_c;
        mu_num += mu_c * h[c];
        mu_den += h[c];
    }
    rec.mu = mu_den > 0.0 ? mu_num / mu_den : mu_any;
    return rec;
}

BatchOutput process_batch(const ClearingNetwork& net, const FlatMargins& fm,
                          const BilateralIndex& bidx, const ScenarioBatch& batch,
                          const SimConfig& cfg, int scenario_index) {
    const int n_members = fm.n_members;
    BatchOutput out;
    out.stats.resize(n_members);
    std::vector<std::vector<double>> losses(n_members);
    for (auto& v : losses) v.reserve(batch.n_paths);

    std::vector<double> h(fm.n_ccps), sdfc(fm.n_ccps);
    for (int p = 0; p < batch.n_paths; ++p) {
        compute_waterfall_path(batch, fm, p, h.data(), sdfc.data());
        for (int o = 0; o < n_members; ++o) {
            if (!batch.survives(p, o)) continue;
            const auto parts = member_loss_parts(net, batch, fm, bidx, h.data(), sdfc.data(),
                                                 p, o);
            auto& st = out.stats[o];
            st.count += 1;
            st.sum_cleared += parts.cleared;
            st.sum_bilateral += parts.bilateral;
            const double total = parts.cleared + parts.bilateral;
            losses[o].push_back(total);
            if (o == scenario_index && cfg.scenario_top_k > 0) {
                // Keep a local top-k, smallest first.
                auto& worst = out.worst;
                if (static_cast<int>(worst.size()) < cfg.scenario_top_k ||
                    total > worst.front().loss) {
                    worst.push_back(
                        describe_scenario(net, batch, fm, h.data(), sdfc.data(), p, o, total));
                    std::sort(worst.begin(), worst.end(),
                              [](const auto& a, const auto& b) { return a.loss < b.loss; });
                    if (static_cast<int>(worst.size()) > cfg.scenario_top_k)
                        worst.erase(worst.begin());
                }
            }
        }
    }

    const double alpha = net.config.ec_quantile;
    if (cfg.keep_losses) out.losses.resize(n_members);
    for (int o = 0; o < n_members; ++o) {
        if (cfg.keep_losses) {
            // Copy in path order before tail_stats permutes its working vector.
            out.losses[o].assign(losses[o].begin(), losses[o].end());
        }
        tail_stats(losses[o], alpha, out.stats[o]);
    }
    return out;
}

}  // namespace

EngineResult run_engine(const ClearingNetwork& net, const SimConfig& config) {
    if (config.n_paths <= 0) throw std::invalid_argument("n_paths must be positive");
    if (config.n_batches <= 0) throw std::invalid_argument("n_batches must be positive");
    if (config.n_paths % config.n_batches != 0)
        throw std::invalid_argument("n_paths must be divisible by n_batches");
    if (const auto violation = check_admissibility(config.copula, net.members.size()))
        throw std::invalid_argument("inadmissible copula parameters: " + *violation);

    EngineResult result;
    result.schedule = compute_margins(net);
    const FlatMargins fm(net, result.schedule);
    const BilateralIndex bidx(net);
    const int n_members = static_cast<int>(net.members.size());
    const int paths_per_batch = static_cast<int>(config.n_paths / config.n_batches);
    const int scenario_index =
        config.scenario_member_id >= 0 ? net.member_index(config.scenario_member_id) : -1;

    std::vector<BatchOutput> outputs(config.n_batches);
    std::atomic<int> next_batch{0};
    const int n_threads = std::min(resolve_thread_count(config.threads), config.n_batches);
    auto worker = [&]() {
        for (;;) {
            const int b = next_batch.fetch_add(1);
            if (b >= config.n_batches) return;
            const auto batch = sample_batch(net, config.copula, paths_per_batch, config.seed,
                                            static_cast<std::uint32_t>(b));
            outputs[b] = process_batch(net, fm, bidx, batch, config, scenario_index);
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Reduce in batch order (determinism at any thread count).
    result.breakdowns.resize(n_members);
    if (config.keep_losses) result.losses.resize(n_members);
    const double T = net.config.horizon_years;
    const double h_rate = net.config.hurdle_rate;

    for (int o = 0; o < n_members; ++o) {
        const auto& m = net.members[o];
        std::int64_t count = 0;
        double sum_cleared = 0.0, sum_bilateral = 0.0;
        std::vector<double> batch_means, batch_es, batch_var;
        batch_means.reserve(outputs.size());
        for (const auto& out : outputs) {
            const auto& st = out.stats[o];
            count += st.count;
            sum_cleared += st.sum_cleared;
            sum_bilateral += st.sum_bilateral;
            if (st.count > 0) {
                batch_means.push_back((st.sum_cleared + st.sum_bilateral) /
                                      static_cast<double>(st.count));
                batch_es.push_back(st.es);
                batch_var.push_back(st.var);
            }
            if (config.keep_losses) {
                auto& sample = result.losses[o];
                sample.losses.insert(sample.losses.end(), out.losses[o].begin(),
                                     out.losses[o].end());
                sample.batch_counts.push_back(st.count);
            }
        }
        if (count == 0)
            throw std::runtime_error("no surviving paths for member " + std::to_string(m.id) +
                                     "; cannot estimate under the survival measure");

        XvaBreakdown bd;
        bd.member_id = m.id;
        bd.n_paths_surviving = count;
        bd.ccva = sum_cleared / static_cast<double>(count);
        bd.bcva = sum_bilateral / static_cast<double>(count);

        const double gamma = horizon_default_prob(m, T);
        const double gamma_tilde = net.config.funding_blend_ratio * gamma;
        bd.cmva = gamma_tilde * result.schedule.total_funded(net, m.id);
        double im_posted_bilateral = 0.0, vm_funding_need = 0.0;
        for (const auto& bs : m.bilateral_netting_sets) {
            im_posted_bilateral += bs.im_posted;
            vm_funding_need += bs.vm_posted;
        }
        bd.bmva = gamma_tilde * im_posted_bilateral;

        const double cva = bd.ccva + bd.bcva;
        const double mean_es =
            std::accumulate(batch_es.begin(), batch_es.end(), 0.0) /
            static_cast<double>(batch_es.size());
        bd.ec = std::max(mean_es - cva, 0.0);
        bd.var_level = std::accumulate(batch_var.begin(), batch_var.end(), 0.0) /
                           static_cast<double>(batch_var.size()) -
                       cva;
        bd.kva = h_rate / (1.0 + h_rate) * bd.ec;
        bd.fva = gamma / (1.0 + gamma) *
                 pos_part(vm_funding_need - (bd.ccva + bd.cmva + bd.bcva + bd.bmva) - bd.ec);
        bd.ca = bd.ccva + bd.cmva + bd.bcva + bd.bmva + bd.fva;
        bd.ftp = bd.ca + bd.kva;

        const auto n_b = static_cast<double>(batch_means.size());
        bd.ccva_std_err = sample_std_dev(batch_means) / std::sqrt(n_b);
        bd.ec_std_err = sample_std_dev(batch_es) / std::sqrt(n_b);
        result.breakdowns[o] = bd;
    }

    if (scenario_index >= 0 && config.scenario_top_k > 0) {
        for (const auto& out : outputs)
            result.worst.insert(result.worst.end(), out.worst.begin(), out.worst.end());
        std::stable_sort(result.worst.begin(), result.worst.end(),
                         [](const auto& a, const auto& b) { return a.loss > b.loss; });
        if (static_cast<int>(result.worst.size()) > config.scenario_top_k)
            result.worst.resize(config.scenario_top_k);
    }

    return result;
}

XvaBreakdown compute_xva(const ClearingNetwork& net, const MarginSchedule& schedule,
                         std::span<const ScenarioBatch> batches, int reference_member_id) {
    const int o = net.member_index(reference_member_id);
    if (o < 0) throw std::out_of_range("unknown reference member");
    if (batches.empty()) throw std::invalid_argument("no batches");
    const FlatMargins fm(net, schedule);
    const BilateralIndex bidx(net);
    const auto& m = net.members[o];

    std::int64_t count = 0;
    double sum_cleared = 0.0, sum_bilateral = 0.0;
    std::vector<std::vector<double>> batch_losses;
    batch_losses.reserve(batches.size());
    std::vector<double> h(fm.n_ccps), sdfc(fm.n_ccps);
    for (const auto& batch : batches) {
        auto& losses = batch_losses.emplace_back();
        losses.reserve(batch.n_paths);
        for (int p = 0; p < batch.n_paths; ++p) {
            if (!batch.survives(p, o)) continue;
            compute_waterfall_path(batch, fm, p, h.data(), sdfc.data());
            const auto parts =
                member_loss_parts(net, batch, fm, bidx, h.data(), sdfc.data(), p, o);
            count += 1;
            sum_cleared += parts.cleared;
            sum_bilateral += parts.bilateral;
            losses.push_back(parts.cleared + parts.bilateral);
        }
    }
    if (count == 0)
        throw std::runtime_error("no surviving paths for member " + std::to_string(m.id) +
                                 "; cannot estimate under the survival measure");

    XvaBreakdown bd;
    bd.member_id = m.id;
    bd.n_paths_surviving = count;
    bd.ccva = sum_cleared / static_cast<double>(count);
    bd.bcva = sum_bilateral / static_cast<double>(count);

    const double gamma = horizon_default_prob(m, net.config.horizon_years);
    const double gamma_tilde = net.config.funding_blend_ratio * gamma;
    bd.cmva = gamma_tilde * schedule.total_funded(net, m.id);
    double im_posted_bilateral = 0.0, vm_funding_need = 0.0;
    for (const auto& bs : m.bilateral_netting_sets) {
        im_posted_bilateral += bs.im_posted;
        vm_funding_need += bs.vm_posted;
    }
    bd.bmva = gamma_tilde * im_posted_bilateral;

    const double cva = bd.ccva + bd.bcva;
    const auto es = batched_expected_shortfall(batch_losses, net.config.ec_quantile);
    bd.ec = std::max(es.es - cva, 0.0);
    bd.ec_std_err = es.std_dev / std::sqrt(static_cast<double>(batch_losses.size()));
    std::vector<double> means;
    for (const auto& bl : batch_losses)
        if (!bl.empty())
            means.push_back(std::accumulate(bl.begin(), bl.end(), 0.0) /
                            static_cast<double>(bl.size()));
    bd.ccva_std_err = sample_std_dev(means) / std::sqrt(static_cast<double>(means.size()));

    bd.kva = net.config.hurdle_rate / (1.0 + net.config.hurdle_rate) * bd.ec;
    bd.fva = gamma / (1.0 + gamma) *
             pos_part(vm_funding_need - (bd.ccva + bd.cmva + bd.bcva + bd.bmva) - bd.ec);
    bd.ca = bd.ccva + bd.cmva + bd.bcva + bd.bmva + bd.fva;
    bd.ftp = bd.ca + bd.kva;
    return bd;
}

}  // namespace ccpxva
