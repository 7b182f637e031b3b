#include "mpcomm/channel.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

namespace mpcomm {

namespace {

constexpr char kProfileMagic[8] = {'M', 'P', 'C', 'P', 'R', 'O', 'F', '1'};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// RNG streams used by build_profile / sample_fading.
constexpr std::uint64_t kStreamGeometry = 1;
constexpr std::uint64_t kStreamKappa = 2;
constexpr std::uint64_t kStreamFading = 3;

}  // namespace

std::uint64_t mix_seed(std::int64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(static_cast<std::uint64_t>(master)) ^ (stream * 0xd1b54a32d192ed03ULL));
}

ChannelProfile::ChannelProfile(int num_bs, int num_rb, int horizon, double noise_power_mw,
                               std::vector<double> gain, std::vector<double> shape, std::int64_t seed)
    : num_bs_(num_bs),
      num_rb_(num_rb),
      horizon_(horizon),
      noise_(noise_power_mw),
      seed_(seed),
      gain_(std::move(gain)),
      shape_(std::move(shape)) {
    if (num_bs < 1 || num_rb < 1 || horizon < 1)
        throw std::invalid_argument("channel profile dimensions must be positive");
    const std::size_t size = static_cast<std::size_t>(num_bs) * num_rb * horizon;
    if (gain_.size() != size || shape_.size() != size)
        throw std::invalid_argument("channel profile tensor size does not match dimensions");
    if (!(noise_ > 0.0)) throw std::invalid_argument("noise power must be positive");
    iota_.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
        if (!(gain_[i] > 0.0) || !(shape_[i] > 0.0))
            throw std::invalid_argument("channel gains and shapes must be positive");
        iota_[i] = noise_ / (beta(shape_[i]) * gain_[i]);
        if (!std::isfinite(iota_[i])) throw std::invalid_argument("channel floor is not finite");
    }
}

double pathloss_db(double distance_m, double fc_ghz, bool is_los) {
    if (!(distance_m > 0.0)) throw std::domain_error("path loss needs a positive distance");
    if (!(fc_ghz > 0.0)) throw std::domain_error("path loss needs a positive carrier frequency");
    if (is_los) return 22.0 + 28.0 * std::log10(distance_m) + 20.0 * std::log10(fc_ghz);
    return 22.7 + 36.7 * std::log10(distance_m) + 26.0 * std::log10(fc_ghz);
}

double los_probability(double elevation_deg) {
    return 1.0 / (1.0 + 6.0 * std::exp(-0.15 * (elevation_deg - 6.0)));
}

double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma is evaluated for positive arguments only");
    double shift = 0.0;
    while (x < 6.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli-number tail: -sum B_2k / (2k x^2k), up to x^-14.
    const double tail =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                                inv2 * (1.0 / 240.0 -
                                        inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    return shift + std::log(x) - 0.5 * inv - tail;
}

double beta(double kappa) {
    if (!(kappa > 0.0)) throw std::domain_error("fading shape must be positive");
    return std::exp(digamma(kappa) - std::log(kappa));
}

double capacity_lower_bound(double power, double gain, double kappa, double noise) {
    if (power <= 0.0) return 0.0;
    return std::log2(1.0 + beta(kappa) * power * gain / noise);
}

ChannelProfile build_profile(const Scenario& scenario, std::int64_t seed) {
    scenario.validate();
    const int N = scenario.num_bs;
    const int K = scenario.num_rb;
    const int T = scenario.horizon;
    const std::size_t size = static_cast<std::size_t>(N) * K * T;
    std::vector<double> gain(size), shape(size);
    auto at = [&](int n, int k, int t) { return (static_cast<std::size_t>(t - 1) * N + n) * K + k; };

    std::mt19937_64 geo(mix_seed(seed, kStreamGeometry));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int n = 0; n < N; ++n) {
        const auto shadow = shadowing_track(scenario.uav_trajectory, scenario.shadowing_sigma_db,
                                            scenario.shadowing_corr_dist_m, geo);
        for (int t = 1; t <= T; ++t) {
            bool los = true;
            switch (scenario.los_model) {
                case LosModel::always_los: los = true; break;
                case LosModel::always_nlos: los = false; break;
                case LosModel::probabilistic:
                    los = unit(geo) < los_probability(scenario.elevation_deg(n, t));
                    break;
            }
            const double loss_db =
                pathloss_db(scenario.distance(n, t), scenario.carrier_freq_ghz, los) + shadow[t - 1];
            const double g = std::pow(10.0, -loss_db / 10.0);
            for (int k = 0; k < K; ++k) gain[at(n, k, t)] = g;
        }
    }

    std::mt19937_64 kap(mix_seed(seed, kStreamKappa));
    std::uniform_real_distribution<double> kappa(scenario.kappa_range[0], scenario.kappa_range[1]);
    auto draw_kappa = [&] {
        return scenario.kappa_range[0] == scenario.kappa_range[1] ? scenario.kappa_range[0] : kappa(kap);
    };
    for (int n = 0; n < N; ++n) {
        for (int k = 0; k < K; ++k) {
            double held = draw_kappa();
            for (int t = 1; t <= T; ++t) {
                if (scenario.kappa_per_slot && t > 1) held = draw_kappa();
                shape[at(n, k, t)] = held;
            }
        }
    }
    return ChannelProfile(N, K, T, scenario.noise_power_mw, std::move(gain), std::move(shape), seed);
}

FadingSample sample_fading(const ChannelProfile& profile, std::int64_t seed) {
    FadingSample out{profile.num_bs(), profile.num_rb(), profile.horizon(), {}};
    const auto& shapes = profile.shapes();
    out.realization.resize(shapes.size());
    std::mt19937_64 rng(mix_seed(seed, kStreamFading));
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        std::gamma_distribution<double> gamma(shapes[i], 1.0 / shapes[i]);
        double x = gamma(rng);
        // Gamma draws underflow to 0 only for tiny shapes; keep the sample positive.
        out.realization[i] = x > 0.0 ? x : std::numeric_limits<double>::min();
    }
    return out;
}

void save_profile(const ChannelProfile& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write profile file '" + path + "'");
    const std::int32_t dims[3] = {p.num_bs(), p.num_rb(), p.horizon()};
    const std::int64_t seed = p.seed();
    const double noise = p.noise_power_mw();
    out.write(kProfileMagic, sizeof kProfileMagic);
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(&seed), sizeof seed);
    out.write(reinterpret_cast<const char*>(&noise), sizeof noise);
    out.write(reinterpret_cast<const char*>(p.gains().data()),
              static_cast<std::streamsize>(p.gains().size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(p.shapes().data()),
              static_cast<std::streamsize>(p.shapes().size() * sizeof(double)));
    if (!out) throw std::ios_base::failure("write failed for '" + path + "'");
}

ChannelProfile load_profile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open profile file '" + path + "'");
    char magic[8];
    std::int32_t dims[3];
    std::int64_t seed = 0;
    double noise = 0.0;
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kProfileMagic, sizeof magic) != 0)
        throw std::runtime_error("'" + path + "' is not a channel profile dump");
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    in.read(reinterpret_cast<char*>(&seed), sizeof seed);
    in.read(reinterpret_cast<char*>(&noise), sizeof noise);
    if (!in || dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
        throw std::runtime_error("corrupt profile header in '" + path + "'");
    const std::size_t size = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    std::vector<double> gain(size), shape(size);
    in.read(reinterpret_cast<char*>(gain.data()), static_cast<std::streamsize>(size * sizeof(double)));
    in.read(reinterpret_cast<char*>(shape.data()), static_cast<std::streamsize>(size * sizeof(double)));
    if (!in) throw std::runtime_error("truncated profile body in '" + path + "'");
    return ChannelProfile(dims[0], dims[1], dims[2], noise, std::move(gain), std::move(shape), seed);
}

}  // namespace mpcomm
