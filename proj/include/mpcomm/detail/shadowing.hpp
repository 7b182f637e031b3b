#pragma once

#include <cmath>
#include <random>
#include <vector>

namespace mpcomm {

template <class Rng>
std::vector<double> shadowing_track(const std::vector<Position>& path, double sigma_db,
                                    double corr_dist_m, Rng& rng) {
    std::vector<double> out(path.size(), 0.0);
    if (path.empty() || sigma_db <= 0.0) return out;
    std::normal_distribution<double> normal(0.0, 1.0);
    out[0] = sigma_db * normal(rng);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const auto& a = path[i - 1];
        const auto& b = path[i];
        const double d = std::hypot(b[0] - a[0], b[1] - a[1], b[2] - a[2]);
        const double rho = std::exp(-d / corr_dist_m);
        out[i] = rho * out[i - 1] + std::sqrt(1.0 - rho * rho) * sigma_db * normal(rng);
    }
    return out;
}

}  // namespace mpcomm
