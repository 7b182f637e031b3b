#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpcomm/channel.hpp"
#include "mpcomm/matching.hpp"

namespace mpcomm {

/// One communication interval [start, end) in 1-based slots.
struct IntervalSpec {
    int start = 1;
    int end = 2;
    int rb_cap = 1;            // per-BS RB cap (epsilon_theta)
    double rate_target = 0.0;  // required sum of capacity lower bounds
    double power_cap = 1.0;    // per-slot sum power, mW

    int length() const { return end - start; }
};

struct WaterFill {
    double power;
    double rate;
};

/// Power [level - iota]+ and capacity-bound rate [log2(level / iota)]+.
WaterFill water_fill(double level, double iota);

/// Matching weight of RB (n, k) at a water level: p - ln2 * level * c.
double assignment_weight(double level, double iota);

/// Per-slot assignment problem at water `level`.
AssignmentProblem slot_problem(const ChannelProfile& profile, int t, double level, int rb_cap);

double slot_power(const ChannelProfile& profile, int t, double level, const BinaryAssignment& a);
double slot_rate(const ChannelProfile& profile, int t, double level, const BinaryAssignment& a);

LimitAssignments slot_limits(const ChannelProfile& profile, int t, double level, int rb_cap);

/// Convex combination of the left/right limit assignments at `level`.
double slot_extended_power(const ChannelProfile& profile, int t, double level, double mix, int rb_cap);
double slot_extended_rate(const ChannelProfile& profile, int t, double level, double mix, int rb_cap);

/// Per-slot cap: the lexicographically smallest (level, mix) at which the
/// extended power reaches the budget, plus the rate obtained there.
struct SlotCap {
    double level = 0.0;
    double mix = 1.0;  // 1 when the assignment is unique at `level`
    double rate = 0.0;
    double power = 0.0;
};

SlotCap solve_slot_cap(const ChannelProfile& profile, int t, int rb_cap, double power_cap);

/// Dense per-interval plan. Tensors are indexed [t - start][n][k].
struct InnerSolution {
    int start = 1;
    int end = 2;
    int num_bs = 0;
    int num_rb = 0;
    std::vector<std::uint8_t> assignment;  // exported binary plan
    std::vector<double> power;
    double energy = 0.0;           // optimum of the relaxed problem (mixed)
    double binary_energy = 0.0;    // energy of the exported binary plan
    bool binary_meets_target = true;
    double global_level = 0.0;     // dual variable lambda*
    std::vector<double> slot_levels;  // water level of the binary plan, per slot
    std::vector<double> cap_levels;   // per-slot cap levels
    std::vector<double> mix;          // per-slot mixing weight of the relaxed optimum
    std::vector<double> slot_energy;  // per-slot power of the relaxed optimum
    double expected_rate = 0.0;    // sum of capacity bounds of the binary plan
    double mixed_rate = 0.0;

    std::size_t index(int n, int k, int t) const {
        return (static_cast<std::size_t>(t - start) * num_bs + n) * num_rb + k;
    }
    bool active(int n, int k, int t) const { return assignment[index(n, k, t)] != 0; }
    double power_at(int n, int k, int t) const { return power[index(n, k, t)]; }
    double slot_power_sum(int t) const;
    /// max over BS of the RBs it serves in slot t.
    int slot_load(int t) const;
    int max_load() const;
};

struct InnerOptions {
    double rate_tol_rel = 1e-6;   // tol_r = rate_tol_rel * target
    double power_tol_rel = 1e-9;  // tol_p = power_tol_rel * power cap
    int max_iterations = 200;
};

struct IntervalResult {
    std::optional<InnerSolution> solution;
    double max_rate = 0.0;  // all slots at their caps

    bool feasible() const { return solution.has_value(); }
};

/// Minimum-energy resource allocation for one interval. Infeasible exactly when
/// the capped maximum rate is below the target.
IntervalResult solve_interval(const IntervalSpec& spec, const ChannelProfile& profile,
                              const InnerOptions& options = {});

/// Optimal water-filling on a fixed binary assignment (one selection per slot)
/// with per-slot power caps; the minimum-energy way to meet `target` with
/// those RBs. Returns false if even the capped levels fall short, in which
/// case the capped levels are kept.
bool fill_fixed_assignment(const ChannelProfile& profile, int start, const std::vector<BinaryAssignment>& selection,
                           double power_cap, double target, std::vector<double>& levels);

/// Checks every InnerSolution invariant against the profile; returns the
/// list of violations.
std::vector<std::string> check_solution(const InnerSolution& s, const IntervalSpec& spec,
                                        const ChannelProfile& profile);

}  // namespace mpcomm
