#pragma once

#include <array>
#include <cstdint>

namespace ccpxva {

// Philox-4x32-10 counter-based generator (Salmon et al., SC'11).
// Each (counter, key) pair yields 128 independent bits; there is no
// sequential state, so any (seed, batch, path, entity, tag) coordinate can be
// evaluated on any worker with identical results.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> generate(std::array<std::uint32_t, 4> ctr,
                                                 std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

double inverse_normal_cdf(double p);

// Keyed access to the factor draws of one batch. `entity` is a member index
// (or kSystemic for the common factors), `tag` enumerates the factor slots.
class CounterRng {
  public:
    static constexpr std::uint32_t kSystemic = 0xFFFFFFFFu;

    CounterRng(std::uint64_t seed, std::uint32_t batch_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          batch_(batch_id) {}

    // Two independent U(0,1) variates, strictly inside the open interval.
    std::array<double, 2> uniform2(std::uint32_t path, std::uint32_t entity,
                                   std::uint32_t tag) const {
        const auto words = Philox4x32::generate({path, entity, tag, batch_}, key_);
        return {to_unit(words[0], words[1]), to_unit(words[2], words[3])};
    }

    std::array<double, 2> gauss2(std::uint32_t path, std::uint32_t entity,
                                 std::uint32_t tag) const {
        const auto u = uniform2(path, entity, tag);
        return {inverse_normal_cdf(u[0]), inverse_normal_cdf(u[1])};
    }

    // Fills `out[0..n)` with standard normals, consuming tags tag, tag+1, ...
    void gauss_fill(std::uint32_t path, std::uint32_t entity, std::uint32_t tag, double* out,
                    int n) const {
        for (int k = 0; k < n; k += 2) {
            const auto g = gauss2(path, entity, tag + static_cast<std::uint32_t>(k / 2));
            out[k] = g[0];
            if (k + 1 < n) out[k + 1] = g[1];
        }
    }

    // chi^2_nu as a sum of nu squared normals (nu is a small integer here).
    double chi_square(std::uint32_t path, std::uint32_t entity, std::uint32_t tag, int nu) const {
        double acc = 0.0;
        for (int k = 0; k < nu; k += 2) {
            const auto g = gauss2(path, entity, tag + static_cast<std::uint32_t>(k / 2));
            acc += g[0] * g[0];
            if (k + 1 < nu) acc += g[1] * g[1];
        }
        return acc;
    }

  private:
    static double to_unit(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t batch_;
};

}  // namespace ccpxva
