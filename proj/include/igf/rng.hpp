#ifndef IGF_RNG_HPP
#define IGF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

#include "igf/errors.hpp"

namespace igf {

/// (seed, stream_id) fully determines every random draw of one replicate.
struct RngConfig {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

/// Independent sub-streams within one replicate, so that e.g. changing the
/// observation-noise stream never perturbs the signal path.
enum class RngRole : std::uint64_t {
    signal = 1,
    obs_noise = 2,
    bridge = 3,
    scenario = 4,
};

/// Counter-based generator: output i is a finalising hash of key + i, so a
/// stream is a pure function of (seed, stream_id, role) and supports random
/// access.  The finaliser is the splitmix64 mixing function.
class CounterRng {
public:
    CounterRng(RngConfig cfg, RngRole role)
        : key_(mix(mix(mix(cfg.seed) ^ cfg.stream_id) ^ static_cast<std::uint64_t>(role))) {}

    std::uint64_t next_u64() { return at(counter_++); }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the antithetic partner is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double a = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double exponential(double rate) {
        if (!(rate > 0.0)) throw InvalidInputError("exponential: rate must be positive");
        return -std::log(uniform()) / rate;
    }

    /// Index drawn proportionally to the (nonnegative, not necessarily
    /// normalised) weights.
    int categorical(const Eigen::VectorXd& weights) {
        const double total = weights.sum();
        if (!(total > 0.0)) throw InvalidInputError("categorical: weights must have positive mass");
        double u = uniform() * total;
        for (int i = 0; i < weights.size() - 1; ++i) {
            u -= weights[i];
            if (u <= 0.0) return i;
        }
        return static_cast<int>(weights.size()) - 1;
    }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::uint64_t at(std::uint64_t counter) const {
        return mix(key_ + counter * 0x9e3779b97f4a7c15ull);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace igf

#endif
