#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace mpcomm {

/// Per-slot RB assignment LP: minimise sum w[n][k] a[n][k] subject to each
/// RB serving at most one BS and each BS holding at most `bs_capacity` RBs.
struct AssignmentProblem {
    int num_bs = 0;
    int num_rb = 0;
    int bs_capacity = 1;
    std::vector<double> weights;  // row-major [n * num_rb + k]

    double weight(int n, int k) const { return weights[static_cast<std::size_t>(n) * num_rb + k]; }
};

struct BinaryAssignment {
    int num_bs = 0;
    int num_rb = 0;
    std::vector<std::uint8_t> select;  // row-major, 0/1
    double total_weight = 0.0;

    bool selected(int n, int k) const { return select[static_cast<std::size_t>(n) * num_rb + k] != 0; }
    int bs_load(int n) const;
    int rb_load(int k) const;
    int size() const;
    bool operator==(const BinaryAssignment& o) const { return num_bs == o.num_bs && num_rb == o.num_rb && select == o.select; }
};

/// True when every entry is 0/1 and both capacity families hold.
bool is_feasible(const BinaryAssignment& a, int bs_capacity);

/// Successive-shortest-path min-cost flow on source -> BS (cap eps) -> RB
/// (cap 1) -> sink. Only negative-weight BS-RB edges exist, and augmentation
/// stops as soon as the cheapest augmenting path is no longer negative, so the
/// result is an integral optimum of the LP relaxation. Ties resolve in a fixed
/// (node id, edge order) sequence, so repeated calls are bit-stable.
BinaryAssignment min_cost_b_matching(const AssignmentProblem& problem);

/// Called with every result of min_cost_b_matching, from whichever thread
/// produced it; nullptr disables. Used for auditing.
using MatchingObserver = void (*)(const AssignmentProblem&, const BinaryAssignment&);
void set_matching_observer(MatchingObserver observer);

/// Relative perturbation used for the left/right limits around a level.
double limit_perturbation(double level);

struct LimitAssignments {
    BinaryAssignment minus;  // optimal just below the level
    BinaryAssignment plus;   // optimal just above the level
};

/// Assignments optimal at level*(1 -/+ 1e-7) (absolute floor 1e-12); they
/// differ only when `level` is a critical point of the weight family.
LimitAssignments limit_assignments(double level, const std::function<AssignmentProblem(double)>& weight_fn);

}  // namespace mpcomm
