#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "mpcomm/channel.hpp"
#include "mpcomm/scenario.hpp"

namespace testsupport {

/// Profile whose floors iota are drawn log-uniform in [lo, hi] and shapes
/// uniform in [1, 30]; gains are back-solved so iota comes out as drawn.
inline mpcomm::ChannelProfile random_profile(std::mt19937_64& rng, int N, int K, int T, double lo = 0.1,
                                             double hi = 10.0, double noise = 1.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> kap(1.0, 30.0);
    const std::size_t size = static_cast<std::size_t>(N) * K * T;
    std::vector<double> gain(size), shape(size);
    for (std::size_t i = 0; i < size; ++i) {
        shape[i] = kap(rng);
        const double iota = lo * std::pow(hi / lo, u(rng));
        gain[i] = noise / (mpcomm::beta(shape[i]) * iota);
    }
    return mpcomm::ChannelProfile(N, K, T, noise, std::move(gain), std::move(shape));
}

/// Profile with exactly the given floors (layout [t-1][n][k]), all shapes
/// large enough that beta is close to 1 but exact iota is honoured.
inline mpcomm::ChannelProfile profile_from_iota(int N, int K, int T, const std::vector<double>& iota,
                                                double noise = 1.0) {
    std::vector<double> gain(iota.size()), shape(iota.size(), 30.0);
    for (std::size_t i = 0; i < iota.size(); ++i) gain[i] = noise / (mpcomm::beta(shape[i]) * iota[i]);
    return mpcomm::ChannelProfile(N, K, T, noise, std::move(gain), std::move(shape));
}

/// Small synthetic scenario with a straight trajectory; only the fields the
/// planner reads are meaningful.
inline mpcomm::Scenario desk_scenario(int N, int K, int T, int tau, double vbar, double pbar) {
    mpcomm::Scenario s;
    s.horizon = T;
    s.num_bs = N;
    s.num_rb = K;
    s.aoi_bound = tau;
    s.payload_threshold = vbar;
    s.power_budget_mw = pbar;
    s.noise_power_mw = 1.0;
    for (int t = 0; t < T; ++t) s.uav_trajectory.push_back({6.0 * t, 0.0, 50.0});
    for (int n = 0; n < N; ++n) s.bs_positions.push_back({40.0 * n, 30.0, 0.0});
    return s;
}

inline bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0e-300, std::abs(a), std::abs(b)});
}

}  // namespace testsupport

#include <map>
#include <memory>
#include <optional>

#include "mpcomm/timing.hpp"

namespace testsupport {

/// Interval result carrying only an energy (no RBs); nullopt = infeasible.
inline std::shared_ptr<const mpcomm::IntervalResult> fake_result(int i, int j, std::optional<double> w) {
    mpcomm::IntervalResult r;
    if (w) {
        mpcomm::InnerSolution s;
        s.start = i;
        s.end = j;
        s.energy = *w;
        s.binary_energy = *w;
        r.solution = s;
    }
    return std::make_shared<const mpcomm::IntervalResult>(std::move(r));
}

/// Graph whose edge weights come from `weight(i, j)`.
template <class F>
mpcomm::TimingGraph weighted_graph(int T, int tau, F weight) {
    mpcomm::TimingGraph g(T, tau, 1);
    for (auto& e : g.edges()) e.result = fake_result(e.from, e.to, weight(e.from, e.to));
    return g;
}

}  // namespace testsupport
