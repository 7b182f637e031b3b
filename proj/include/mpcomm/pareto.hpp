#pragma once

#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "mpcomm/channel.hpp"
#include "mpcomm/errors.hpp"
#include "mpcomm/scenario.hpp"
#include "mpcomm/timing.hpp"

namespace mpcomm {

struct FrontierPoint {
    int epsilon = 0;      // per-BS RB cap
    double energy = 0.0;  // minimum total energy under that cap
    SamplingPlan plan;
};

/// Points for every integer cap in [theta_lo, theta_hi]; energies strictly
/// decrease along the list.
struct ParetoFrontier {
    std::vector<FrontierPoint> points;
    int theta_lo = 0;
    int theta_hi = 0;
};

struct FrontierOptions {
    BuildOptions build{};
    /// Relative tolerance under which two energies count as equal.
    double equal_rel = 1e-9;
};

/// Scans caps 1, 2, ... for the first feasible one, then keeps adding caps
/// while the energy strictly decreases. Throws NoFeasiblePlan when even
/// cap = K has no feasible plan.
ParetoFrontier compute_frontier(const Scenario& scenario, const ChannelProfile& profile,
                                const FrontierOptions& options = {});

/// Frontier violations: ordering, strict decrease, dominated points.
std::vector<std::string> audit_frontier(const ParetoFrontier& frontier);

using ScalarMap = std::function<double(double)>;

/// Raised when a user map is not strictly increasing where it is used.
class MonotonicityError : public std::invalid_argument {
public:
    explicit MonotonicityError(const std::string& what) : std::invalid_argument(what) {}
};

struct MappedPoint {
    int epsilon = 0;
    double load = 0.0;    // g1(epsilon)
    double energy = 0.0;  // g2(E)
};

/// Checks that `g` is strictly increasing on [lo, hi] by evaluating it at
/// `samples` evenly spaced points; throws MonotonicityError otherwise.
void require_increasing(const ScalarMap& g, double lo, double hi, const std::string& name, int samples = 1001);

/// Pointwise image (g1(theta), g2(E)) of the frontier; no re-solving.
std::vector<MappedPoint> transform_frontier(const ParetoFrontier& frontier, const ScalarMap& g1,
                                            const ScalarMap& g2);

using Utility = std::function<double(double load, double energy)>;

/// (alpha |x - x0|^p + (1 - alpha) |y - y0|^p)^(1/p).
Utility weighted_lp(double alpha, double p, double load_target = 0.0, double energy_target = 0.0);

/// Index of the frontier point minimising utility(g1(theta), g2(E)); the
/// first one wins ties. Throws std::invalid_argument on an empty frontier.
std::size_t scalarize_select(const ParetoFrontier& frontier, const Utility& utility, const ScalarMap& g1 = {},
                             const ScalarMap& g2 = {});

/// Index of the lowest-energy point with g1(theta) <= budget. Throws
/// BudgetInfeasible if no point qualifies.
std::size_t budget_select(const ParetoFrontier& frontier, const ScalarMap& g1, double budget);

/// CSV "epsilon_theta,energy_linear,energy_dbm,num_samples,instants"; the
/// instants column is space separated. energy_dbm is the average power per
/// slot in dBm.
void write_frontier_csv(const ParetoFrontier& frontier, double slot_duration, std::ostream& out);

/// Reads a frontier CSV back; energies are the energy_linear column and
/// plans carry only their instants. Throws std::invalid_argument on
/// malformed input.
ParetoFrontier read_frontier_csv(std::istream& in);

}  // namespace mpcomm
