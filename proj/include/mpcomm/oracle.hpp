#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mpcomm/channel.hpp"
#include "mpcomm/errors.hpp"
#include "mpcomm/inner.hpp"
#include "mpcomm/matching.hpp"
#include "mpcomm/scenario.hpp"

// Brute-force references. They share nothing with the solvers they check
// beyond water_fill arithmetic, and refuse instances above their budget.
namespace mpcomm {

struct OracleBudget {
    int max_bs = 3;
    int max_rb = 4;
    int max_horizon = 12;
    int max_aoi_bound = 4;
    int grid_points = 10000;
    std::int64_t mc_samples = 1000000;
};

/// Exact optimum by enumerating every binary matrix that satisfies both
/// capacity families. Among equal objectives the first one found wins.
BinaryAssignment oracle_matching(const AssignmentProblem& problem, const OracleBudget& budget = {});

/// Minimum relaxed energy of one interval from a geometric grid over the
/// water level, exhaustive matching at each grid point, and linear
/// interpolation between the two grid points bracketing the target.
/// std::nullopt when the target exceeds the all-caps rate.
std::optional<double> oracle_inner(const IntervalSpec& spec, const ChannelProfile& profile,
                                   const OracleBudget& budget = {});

struct OraclePlan {
    std::vector<int> instants;  // interval starts; the path ends at T+1
    double energy = 0.0;
    std::int64_t sequences = 0;  // feasible sequences enumerated
};

/// Interval weight for [i, j); std::nullopt marks an infeasible interval.
using IntervalWeight = std::function<std::optional<double>(int i, int j)>;

/// Depth-first enumeration of every sampling sequence with gaps in
/// [1, aoi_bound] over 1..horizon+1. Ties keep the lexicographically smallest
/// sequence. Throws NoFeasiblePlan when no sequence is feasible.
OraclePlan oracle_plan(int horizon, int aoi_bound, const IntervalWeight& weight, const OracleBudget& budget = {});

/// Same enumeration with oracle_inner as the interval weight.
OraclePlan oracle_plan(const Scenario& scenario, const ChannelProfile& profile, int rb_cap,
                       const OracleBudget& budget = {});

/// Minimum energy for every cap 1..K by full enumeration; nullopt marks an
/// infeasible cap.
std::vector<std::optional<double>> oracle_energy_by_cap(const Scenario& scenario, const ChannelProfile& profile,
                                                        const OracleBudget& budget = {});

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

/// Mean of log2(1 + snr * xi) over Gamma(kappa, 1/kappa) draws, with its
/// standard error.
McEstimate mc_expected_capacity(double kappa, double snr_linear, std::int64_t samples, std::int64_t seed,
                                const OracleBudget& budget = {});

}  // namespace mpcomm
