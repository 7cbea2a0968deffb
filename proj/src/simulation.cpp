#include "ccpxva/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "ccpxva/margining.hpp"
#include "ccpxva/rng.hpp"

namespace ccpxva {

double CopulaParams::rho_wwr_for(std::size_t member_index) const {
    if (rho_wwr.empty()) return 0.0;
    if (rho_wwr.size() == 1) return rho_wwr[0];
    return rho_wwr.at(member_index);
}

std::optional<std::string> check_admissibility(const CopulaParams& params,
                                               std::size_t n_members) {
    if (!(params.rho_cr >= 0.0 && params.rho_cr < 1.0))
        return "rho_cr outside [0,1)";
    if (!(params.rho_mkt >= 0.0 && params.rho_mkt < 1.0))
        return "rho_mkt outside [0,1)";
    if (params.nu < 1) return "degrees of freedom must be >= 1";
    const double bound = std::sqrt(1.0 - params.rho_cr) * std::sqrt(1.0 - params.rho_mkt);
    for (std::size_t i = 0; i < n_members; ++i) {
        const double wwr = params.rho_wwr_for(i);
        if (wwr < 0.0) return "rho_wwr must be nonnegative";
        if (wwr > bound) {
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "rho_wwr=%.6g exceeds sqrt(1-rho_cr)sqrt(1-rho_mkt)=%.6g", wwr,
                          bound);
            return std::string(buf);
        }
    }
    return std::nullopt;
}

namespace {

// Factor tag layout per (path, entity); each tag indexes one Philox block
// yielding a pair of normals.
constexpr std::uint32_t kTagGaussBase = 0;   // (X_i, T_i), (E_i, .)
constexpr std::uint32_t kTagChiCredit = 16;  // nu normals for Gamma_i^c
constexpr std::uint32_t kTagChiMarket = 48;  // nu normals for Gamma_i^m
constexpr std::uint32_t kBilateralEntityBase = 0x80000000u;
constexpr std::uint32_t kClientEntityBase = 0xC0000000u;

struct MemberLoadings {
    double cr_systemic, cr_common, cr_idio;     // on T, X_i, T_i
    double mkt_systemic, mkt_common, mkt_idio;  // on E, X_i, E_i
    double default_threshold;                   // t_nu quantile of F_i(T)
};

MemberLoadings make_loadings(const CopulaParams& p, double wwr, double horizon_dp) {
    MemberLoadings l{};
    const double cross = std::sqrt(1.0 - p.rho_cr) * std::sqrt(1.0 - p.rho_mkt);
    const double idio = std::sqrt(1.0 - wwr / cross);
    l.cr_systemic = std::sqrt(p.rho_cr);
    l.cr_common = -std::sqrt(wwr) * std::pow((1.0 - p.rho_cr) / (1.0 - p.rho_mkt), 0.25);
    l.cr_idio = std::sqrt(1.0 - p.rho_cr) * idio;
    l.mkt_systemic = std::sqrt(p.rho_mkt);
    l.mkt_common = std::sqrt(wwr) * std::pow((1.0 - p.rho_mkt) / (1.0 - p.rho_cr), 0.25);
    l.mkt_idio = std::sqrt(1.0 - p.rho_mkt) * idio;
    l.default_threshold = student_t_quantile(horizon_dp, p.nu);
    return l;
}

}  // namespace

ScenarioBatch sample_batch(const ClearingNetwork& net, const CopulaParams& params, int n_paths,
                           std::uint64_t seed, std::uint32_t batch_id) {
    if (n_paths <= 0) throw std::invalid_argument("n_paths must be positive");
    if (const auto violation = check_admissibility(params, net.members.size()))
        throw std::invalid_argument("inadmissible copula parameters: " + *violation);
    if (params.nu > 64) throw std::invalid_argument("nu too large for the factor layout");

    const int n_members = static_cast<int>(net.members.size());
    const int n_ccps = static_cast<int>(net.ccps.size());
    const double T = net.config.horizon_years;
    const int nu = params.nu;

    // Per-member loadings and per-(member, ccp) variation scales N sigma sqrt(dl).
    std::vector<MemberLoadings> loadings;
    std::vector<double> scale_client(static_cast<std::size_t>(n_members) * n_ccps, 0.0);
    std::vector<double> scale_house(scale_client.size(), 0.0);
    bool any_house = false;
    loadings.reserve(net.members.size());
    for (int i = 0; i < n_members; ++i) {
        const auto& m = net.members[i];
        loadings.push_back(make_loadings(params, params.rho_wwr_for(i),
                                         horizon_default_prob(m, T)));
        for (int c = 0; c < n_ccps; ++c) {
            const auto* pos = m.position_on(net.ccps[c].id);
            if (!pos) continue;
            const double dl = net.ccps[c].liquidation_days / kBusinessDaysPerYear;
            const double vol = m.volatility_on(net.ccps[c].id);
            // Stored variations are oriented as the CCP's claim on the
            // account: the member owes the mirror of its client book, so the
            // clearing-house exposure scales with minus the signed nominal.
            scale_client[static_cast<std::size_t>(i) * n_ccps + c] =
                -pos->client_nominal * vol * std::sqrt(dl);
            scale_house[static_cast<std::size_t>(i) * n_ccps + c] =
                -pos->house_nominal * vol * std::sqrt(dl);
            any_house = any_house || pos->house_nominal != 0.0;
        }
    }

    // Bilateral sets, flattened; they share the systemic factors with zero
    // wrong-way loading. Liquidation scale uses the first CCP's period (or 5d).
    struct BilateralSlot {
        double scale;
        double default_threshold;
    };
    std::vector<BilateralSlot> bilateral;
    const double bilateral_dl =
        (net.ccps.empty() ? 5.0 : net.ccps.front().liquidation_days) / kBusinessDaysPerYear;
    for (const auto& m : net.members)
        for (const auto& b : m.bilateral_netting_sets)
            bilateral.push_back(
                {b.nominal * b.volatility * std::sqrt(bilateral_dl),
                 student_t_quantile(horizon_default_prob(b.counterparty_default_prob, T), nu)});

    // Risky cleared clients: default thresholds per (member, ccp) slot.
    std::vector<double> client_threshold;
    bool any_risky_client = false;
    client_threshold.resize(static_cast<std::size_t>(n_members) * n_ccps, 0.0);
    for (int i = 0; i < n_members; ++i)
        for (int c = 0; c < n_ccps; ++c) {
            const auto* pos = net.members[i].position_on(net.ccps[c].id);
            if (pos && pos->client_default_prob > 0.0) {
                client_threshold[static_cast<std::size_t>(i) * n_ccps + c] =
                    student_t_quantile(horizon_default_prob(pos->client_default_prob, T), nu);
                any_risky_client = true;
            }
        }

    ScenarioBatch batch;
    batch.batch_id = batch_id;
    batch.n_paths = n_paths;
    batch.n_members = n_members;
    batch.n_ccps = n_ccps;
    batch.n_bilateral = static_cast<int>(bilateral.size());
    batch.seed = seed;
    batch.survival.resize(static_cast<std::size_t>(n_paths) * n_members);
    batch.delta_p.resize(static_cast<std::size_t>(n_paths) * n_members * n_ccps, 0.0);
    if (any_house)
        batch.delta_p_house.resize(batch.delta_p.size(), 0.0);
    batch.bilateral_survival.resize(static_cast<std::size_t>(n_paths) * bilateral.size());
    batch.bilateral_delta_p.resize(batch.bilateral_survival.size(), 0.0);
    if (any_risky_client)
        batch.client_survival.assign(batch.delta_p.size(), 1);

    const CounterRng rng(seed, batch_id);
    const double idio_cr_b = std::sqrt(1.0 - params.rho_cr);
    const double idio_mkt_b = std::sqrt(1.0 - params.rho_mkt);

    for (int p = 0; p < n_paths; ++p) {
        const auto path = static_cast<std::uint32_t>(p);
        const auto sys = rng.gauss2(path, CounterRng::kSystemic, kTagGaussBase);
        const double t_sys = sys[0];  // common credit factor
        const double e_sys = sys[1];  // common market factor

        for (int i = 0; i < n_members; ++i) {
            const auto entity = static_cast<std::uint32_t>(i);
            double g[4];
            rng.gauss_fill(path, entity, kTagGaussBase, g, 4);
            const double x_i = g[0], t_i = g[1], e_i = g[2];
            const double chi_cr = rng.chi_square(path, entity, kTagChiCredit, nu);
            const double chi_mkt = rng.chi_square(path, entity, kTagChiMarket, nu);
            const auto& l = loadings[i];

            const double credit_latent =
                std::sqrt(nu / chi_cr) *
                (l.cr_systemic * t_sys + l.cr_common * x_i + l.cr_idio * t_i);
            const double market_latent =
                std::sqrt(nu / chi_mkt) *
                (l.mkt_systemic * e_sys + l.mkt_common * x_i + l.mkt_idio * e_i);

            batch.survival[static_cast<std::size_t>(p) * n_members + i] =
                credit_latent > l.default_threshold ? 1 : 0;
            for (int c = 0; c < n_ccps; ++c) {
                const std::size_t k =
                    (static_cast<std::size_t>(p) * n_members + i) * n_ccps + c;
                batch.delta_p[k] = scale_client[static_cast<std::size_t>(i) * n_ccps + c] *
                                   market_latent;
                if (any_house)
                    batch.delta_p_house[k] =
                        scale_house[static_cast<std::size_t>(i) * n_ccps + c] * market_latent;
            }
        }

        if (any_risky_client) {
            for (int i = 0; i < n_members; ++i)
                for (int c = 0; c < n_ccps; ++c) {
                    const std::size_t slot = static_cast<std::size_t>(i) * n_ccps + c;
                    if (client_threshold[slot] == 0.0) continue;
                    const auto entity = kClientEntityBase + static_cast<std::uint32_t>(slot);
                    const auto g = rng.gauss2(path, entity, kTagGaussBase);
                    const double chi = rng.chi_square(path, entity, kTagChiCredit, nu);
                    const double latent =
                        std::sqrt(nu / chi) *
                        (std::sqrt(params.rho_cr) * t_sys + idio_cr_b * g[0]);
                    batch.client_survival[static_cast<std::size_t>(p) * n_members * n_ccps +
                                          slot] = latent > client_threshold[slot] ? 1 : 0;
                }
        }

        for (std::size_t b = 0; b < bilateral.size(); ++b) {
            const auto entity = kBilateralEntityBase + static_cast<std::uint32_t>(b);
            double g[2];
            rng.gauss_fill(path, entity, kTagGaussBase, g, 2);
            const double chi_cr = rng.chi_square(path, entity, kTagChiCredit, nu);
            const double chi_mkt = rng.chi_square(path, entity, kTagChiMarket, nu);
            const double credit_latent =
                std::sqrt(nu / chi_cr) * (std::sqrt(params.rho_cr) * t_sys + idio_cr_b * g[0]);
            const double market_latent =
                std::sqrt(nu / chi_mkt) *
                (std::sqrt(params.rho_mkt) * e_sys + idio_mkt_b * g[1]);
            const std::size_t k = static_cast<std::size_t>(p) * bilateral.size() + b;
            batch.bilateral_survival[k] =
                credit_latent > bilateral[b].default_threshold ? 1 : 0;
            batch.bilateral_delta_p[k] = bilateral[b].scale * market_latent;
        }
    }

    return batch;
}

namespace {

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void write_vec(std::ofstream& out, const std::vector<T>& v) {
    const std::uint64_t n = v.size();
    write_pod(out, n);
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

template <typename T>
void read_vec(std::ifstream& in, std::vector<T>& v) {
    std::uint64_t n = 0;
    read_pod(in, n);
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
}

constexpr std::uint32_t kDumpMagic = 0x43585642u;  // "BVXC" little-endian

}  // namespace

void dump_batch(const ScenarioBatch& batch, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write batch dump: " + path);
    write_pod(out, kDumpMagic);
    write_pod(out, batch.batch_id);
    write_pod(out, batch.n_paths);
    write_pod(out, batch.n_members);
    write_pod(out, batch.n_ccps);
    write_pod(out, batch.n_bilateral);
    write_pod(out, batch.seed);
    write_vec(out, batch.survival);
    write_vec(out, batch.delta_p);
    write_vec(out, batch.delta_p_house);
    write_vec(out, batch.bilateral_survival);
    write_vec(out, batch.bilateral_delta_p);
}

ScenarioBatch read_batch_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read batch dump: " + path);
    std::uint32_t magic = 0;
    read_pod(in, magic);
    if (magic != kDumpMagic) throw std::runtime_error("not a batch dump: " + path);
    ScenarioBatch batch;
    read_pod(in, batch.batch_id);
    read_pod(in, batch.n_paths);
    read_pod(in, batch.n_members);
    read_pod(in, batch.n_ccps);
    read_pod(in, batch.n_bilateral);
    read_pod(in, batch.seed);
    read_vec(in, batch.survival);
    read_vec(in, batch.delta_p);
    read_vec(in, batch.delta_p_house);
    read_vec(in, batch.bilateral_survival);
    read_vec(in, batch.bilateral_delta_p);
    if (!in) throw std::runtime_error("truncated batch dump: " + path);
    return batch;
}

}  // namespace ccpxva
