#include "doctest.h"

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "mpcomm/channel.hpp"
#include "mpcomm/oracle.hpp"
#include "support.hpp"

using namespace mpcomm;

TEST_CASE("path loss matches the UMi formulas") {
    CHECK(pathloss_db(100.0, 3.0, true) == doctest::Approx(22.0 + 56.0 + 20.0 * std::log10(3.0)).epsilon(1e-12));
    CHECK(pathloss_db(100.0, 3.0, true) == doctest::Approx(87.542).epsilon(1e-5));
    CHECK(pathloss_db(1.0, 1.0, true) == 22.0);
    CHECK(pathloss_db(100.0, 3.0, false) == doctest::Approx(22.7 + 73.4 + 26.0 * std::log10(3.0)).epsilon(1e-12));
    CHECK(std::abs(pathloss_db(100.0, 3.0, false) - 108.504) < 2e-3);
    CHECK_THROWS_AS(pathloss_db(0.0, 3.0, true), std::domain_error);
    CHECK_THROWS_AS(pathloss_db(-1.0, 3.0, false), std::domain_error);
}

TEST_CASE("LOS probability") {
    CHECK(los_probability(6.0) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    CHECK(los_probability(1e4) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(los_probability(90.0) > los_probability(10.0));
    double prev = 0.0;
    for (double e = -90.0; e <= 90.0; e += 0.5) {
        const double p = los_probability(e);
        CHECK(p > 0.0);
        CHECK(p < 1.0);
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("digamma agrees with an independent implementation") {
    for (double x = 1e-3; x <= 1e6; x *= 1.07) {
        const double ref = boost::math::digamma(x);
        CHECK(std::abs(digamma(x) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
    }
    CHECK_THROWS_AS(digamma(0.0), std::domain_error);
}

TEST_CASE("beta: Rayleigh, half-shape and strong-LOS values") {
    constexpr double euler = 0.57721566490153286061;
    CHECK(beta(1.0) == doctest::Approx(std::exp(-euler)).epsilon(1e-12));
    CHECK(beta(1.0) == doctest::Approx(0.5615).epsilon(1e-4));
    CHECK(beta(0.5) == doctest::Approx(2.0 * std::exp(-euler - 2.0 * std::numbers::ln2)).epsilon(1e-12));
    CHECK(beta(0.5) == doctest::Approx(0.2807).epsilon(1e-3));
    CHECK(beta(1e6) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(beta(0.0), std::domain_error);
    CHECK_THROWS_AS(beta(-2.0), std::domain_error);
}

TEST_CASE("beta is strictly increasing and inside (0, 1)") {
    double prev = 0.0;
    for (double k = kKappaFloor; k <= 1e6; k *= 1.01) {
        const double b = beta(k);
        CHECK(b > prev);
        CHECK(b < 1.0);
        prev = b;
    }
}

TEST_CASE("capacity lower bound") {
    CHECK(capacity_lower_bound(0.0, 1.0, 2.0, 1.0) == 0.0);
    // beta * snr = 1 gives exactly one bit
    const double kappa = 3.0;
    CHECK(capacity_lower_bound(1.0 / beta(kappa), 1.0, kappa, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lower bound sits below the Monte Carlo capacity and close to it") {
    const double snr = std::pow(10.0, 2.0);
    const auto mc = mc_expected_capacity(4.0, snr, 1000000, 11);
    const double bound = capacity_lower_bound(snr, 1.0, 4.0, 1.0);
    CHECK(bound <= mc.mean + 3.0 * mc.stderr_);
    CHECK(mc.mean - bound < 0.1);
}

TEST_CASE("Jensen property over the shape/SNR grid") {
    for (double kappa : {1.0, 2.0, 4.0, 8.0, 30.0}) {
        for (double db : {0.0, 10.0, 20.0, 30.0}) {
            const double snr = std::pow(10.0, db / 10.0);
            const auto mc = mc_expected_capacity(kappa, snr, 200000, 5);
            CHECK(capacity_lower_bound(snr, 1.0, kappa, 1.0) <= mc.mean + 3.0 * mc.stderr_);
        }
    }
    const auto tight = mc_expected_capacity(30.0, 1000.0, 200000, 5);
    CHECK(tight.mean - capacity_lower_bound(1000.0, 1.0, 30.0, 1.0) < 0.05);
}

TEST_CASE("profile: floors are consistent with gain, shape and noise") {
    const Scenario s = default_patrol_scenario(3, {.horizon = 12, .num_bs = 3, .num_rb = 4});
    const ChannelProfile p = build_profile(s, 3);
    for (std::size_t i = 0; i < p.iotas().size(); ++i) {
        const double expect = s.noise_power_mw / (beta(p.shapes()[i]) * p.gains()[i]);
        CHECK(testsupport::rel_close(p.iotas()[i], expect, 1e-12));
        CHECK(p.gains()[i] > 0.0);
        CHECK(p.shapes()[i] >= 1.0);
        CHECK(p.shapes()[i] <= 30.0);
        CHECK(std::isfinite(p.iotas()[i]));
    }
}

TEST_CASE("profile: same seed gives a bitwise-identical profile") {
    const Scenario s = default_patrol_scenario(4, {.horizon = 20});
    CHECK(build_profile(s, 9) == build_profile(s, 9));
    CHECK_FALSE(build_profile(s, 9) == build_profile(s, 10));
}

TEST_CASE("profile: shapes are held per (n, k) unless per-slot mode is on") {
    Scenario s = default_patrol_scenario(4, {.horizon = 6, .num_bs = 2, .num_rb = 3});
    const ChannelProfile held = build_profile(s, 1);
    for (int n = 0; n < 2; ++n)
        for (int k = 0; k < 3; ++k)
            for (int t = 2; t <= 6; ++t) CHECK(held.shape(n, k, t) == held.shape(n, k, 1));
    s.kappa_per_slot = true;
    const ChannelProfile varying = build_profile(s, 1);
    CHECK(varying.shape(0, 0, 1) != varying.shape(0, 0, 2));
}

TEST_CASE("profile: zero shadowing variance leaves pure path loss") {
    for (LosModel m : {LosModel::always_los, LosModel::always_nlos}) {
        Scenario s = default_patrol_scenario(5, {.horizon = 8, .num_bs = 2, .num_rb = 2});
        s.shadowing_sigma_db = 0.0;
        s.los_model = m;
        const ChannelProfile p = build_profile(s, 5);
        for (int t = 1; t <= 8; ++t)
            for (int n = 0; n < 2; ++n)
                for (int k = 0; k < 2; ++k) {
                    const double pl = pathloss_db(s.distance(n, t), 3.0, m == LosModel::always_los);
                    CHECK(testsupport::rel_close(p.gain(n, k, t), std::pow(10.0, -pl / 10.0), 1e-12));
                }
    }
}

TEST_CASE("profile: gains are shared across resource blocks") {
    const Scenario s = default_patrol_scenario(6, {.horizon = 8, .num_bs = 2, .num_rb = 4});
    const ChannelProfile p = build_profile(s, 6);
    for (int t = 1; t <= 8; ++t)
        for (int n = 0; n < 2; ++n)
            for (int k = 1; k < 4; ++k) CHECK(p.gain(n, k, t) == p.gain(n, 0, t));
}

TEST_CASE("profile: shadowing correlation at 5 m is e^-1") {
    Scenario s = testsupport::desk_scenario(1, 1, 2, 1, 1.0, 1.0);
    s.uav_trajectory = {{0.0, 0.0, 50.0}, {5.0, 0.0, 50.0}};
    s.bs_positions = {{0.0, 100.0, 0.0}};
    s.los_model = LosModel::always_los;
    s.shadowing_sigma_db = std::sqrt(8.0);
    const double pl1 = pathloss_db(s.distance(0, 1), 3.0, true);
    const double pl2 = pathloss_db(s.distance(0, 2), 3.0, true);
    const int draws = 10000;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < draws; ++i) {
        const ChannelProfile p = build_profile(s, 1000 + i);
        const double x = -10.0 * std::log10(p.gain(0, 0, 1)) - pl1;
        const double y = -10.0 * std::log10(p.gain(0, 0, 2)) - pl2;
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    CHECK(sxx / draws == doctest::Approx(8.0).epsilon(0.05));
    CHECK(sxy / std::sqrt(sxx * syy) == doctest::Approx(std::exp(-1.0)).epsilon(0.08));
}

TEST_CASE("fading: unit mean, 1/kappa variance, deterministic") {
    const std::vector<double> gain(1, 1.0), shape(1, 4.0);
    const ChannelProfile p(1, 1, 1, 1.0, gain, shape);
    const int draws = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double x = sample_fading(p, i).at(0, 0, 1);
        CHECK(x > 0.0);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / draws;
    CHECK(std::abs(mean - 1.0) <= 0.02);
    CHECK(std::abs(sq / draws - mean * mean - 0.25) <= 0.02);

    std::mt19937_64 rng(2);
    const ChannelProfile q = testsupport::random_profile(rng, 2, 3, 4);
    CHECK(sample_fading(q, 77) == sample_fading(q, 77));
}

TEST_CASE("profile dump round-trips bit-exactly") {
    const Scenario s = default_patrol_scenario(8, {.horizon = 10});
    const ChannelProfile p = build_profile(s, 8);
    const auto path = std::filesystem::temp_directory_path() / "mpcomm_profile_rt.bin";
    save_profile(p, path.string());
    CHECK(load_profile(path.string()) == p);
    std::filesystem::remove(path);
    CHECK_THROWS(load_profile(path.string()));
}
