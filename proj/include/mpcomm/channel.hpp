#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpcomm/scenario.hpp"

namespace mpcomm {

/// Predicted radio-map slice along the trajectory: large-scale gain g, Gamma
/// shape kappa and the water-filling floor iota = noise / (beta(kappa) * g)
/// for every (BS n, RB k, slot t). n and k are 0-based, t is 1-based.
class ChannelProfile {
public:
    ChannelProfile() = default;
    /// Builds iota from gain, shape and noise. Throws std::invalid_argument
    /// on size mismatch or non-positive entries.
    ChannelProfile(int num_bs, int num_rb, int horizon, double noise_power_mw,
                   std::vector<double> gain, std::vector<double> shape, std::int64_t seed = 0);

    int num_bs() const { return num_bs_; }
    int num_rb() const { return num_rb_; }
    int horizon() const { return horizon_; }
    double noise_power_mw() const { return noise_; }
    std::int64_t seed() const { return seed_; }

    std::size_t index(int n, int k, int t) const {
        return (static_cast<std::size_t>(t - 1) * num_bs_ + n) * num_rb_ + k;
    }
    double gain(int n, int k, int t) const { return gain_[index(n, k, t)]; }
    double shape(int n, int k, int t) const { return shape_[index(n, k, t)]; }
    double iota(int n, int k, int t) const { return iota_[index(n, k, t)]; }

    const std::vector<double>& gains() const { return gain_; }
    const std::vector<double>& shapes() const { return shape_; }
    const std::vector<double>& iotas() const { return iota_; }

    bool operator==(const ChannelProfile&) const = default;

private:
    int num_bs_ = 0;
    int num_rb_ = 0;
    int horizon_ = 0;
    double noise_ = 0.0;
    std::int64_t seed_ = 0;
    std::vector<double> gain_;
    std::vector<double> shape_;
    std::vector<double> iota_;
};

/// Small-scale fading draws xi, same layout as ChannelProfile.
struct FadingSample {
    int num_bs = 0;
    int num_rb = 0;
    int horizon = 0;
    std::vector<double> realization;

    double at(int n, int k, int t) const {
        return realization[(static_cast<std::size_t>(t - 1) * num_bs + n) * num_rb + k];
    }
    bool operator==(const FadingSample&) const = default;
};

/// 3GPP UMi path loss in dB. Throws std::domain_error for distance <= 0.
double pathloss_db(double distance_m, double fc_ghz, bool is_los);

/// LOS probability (1 + 6 exp(-0.15 (elev - 6)))^-1 for elevation in degrees.
double los_probability(double elevation_deg);

/// Digamma via upward recurrence to x >= 6 and the asymptotic series.
/// Throws std::domain_error for x <= 0.
double digamma(double x);

/// Fading severity factor exp(psi(kappa)) / kappa, in (0, 1).
double beta(double kappa);

/// Deterministic lower bound on E[log2(1 + p g xi / noise)] for unit-mean
/// Gamma(kappa) fading: log2(1 + beta(kappa) p g / noise).
double capacity_lower_bound(double power, double gain, double kappa, double noise);

/// Shadowing track in dB along a path with exponential correlation
/// exp(-d / corr_dist) over cumulative arc distance. First-order Gauss-Markov.
template <class Rng>
std::vector<double> shadowing_track(const std::vector<Position>& path, double sigma_db,
                                    double corr_dist_m, Rng& rng);

ChannelProfile build_profile(const Scenario& scenario, std::int64_t seed);

/// Independent Gamma(kappa, 1/kappa) draw for every entry.
FadingSample sample_fading(const ChannelProfile& profile, std::int64_t seed);

/// Bit-exact binary dump: magic, dims, seed, noise, then gain and shape.
void save_profile(const ChannelProfile& profile, const std::string& path);
ChannelProfile load_profile(const std::string& path);

/// Deterministic 64-bit seed for a (master, stream) pair.
std::uint64_t mix_seed(std::int64_t master, std::uint64_t stream);

}  // namespace mpcomm

#include "mpcomm/detail/shadowing.hpp"
