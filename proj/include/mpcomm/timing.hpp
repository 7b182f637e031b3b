#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "mpcomm/channel.hpp"
#include "mpcomm/errors.hpp"
#include "mpcomm/inner.hpp"
#include "mpcomm/scenario.hpp"

namespace mpcomm {

/// Memoised interval solves keyed by (start, end, rb_cap). One cache serves
/// one (profile, rate target, power cap) triple; it is safe to share between
/// threads.
class EdgeCache {
public:
    using Key = std::tuple<int, int, int>;
    std::shared_ptr<const IntervalResult> find(const Key& key) const;
    /// Inserts unless present; returns whichever entry ends up stored.
    std::shared_ptr<const IntervalResult> insert(const Key& key, std::shared_ptr<const IntervalResult> value);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<Key, std::shared_ptr<const IntervalResult>> entries_;
};

struct TimingEdge {
    int from = 0;
    int to = 0;
    std::shared_ptr<const IntervalResult> result;

    bool feasible() const { return result && result->feasible(); }
    /// Mixed-optimal interval energy; only valid when feasible().
    double weight() const { return result->solution->energy; }
};

/// DAG over nodes 1..T+1; node i stands for "sample at slot i", node T+1 for
/// the end of the horizon. Edge (i, j) exists for 1 <= j - i <= aoi_bound.
class TimingGraph {
public:
    TimingGraph(int horizon, int aoi_bound, int rb_cap);

    int horizon() const { return horizon_; }
    int num_nodes() const { return horizon_ + 1; }
    int aoi_bound() const { return aoi_bound_; }
    int rb_cap() const { return rb_cap_; }

    const std::vector<TimingEdge>& edges() const { return edges_; }
    std::vector<TimingEdge>& edges() { return edges_; }
    /// nullptr when (i, j) is not an edge of the graph.
    const TimingEdge* edge(int i, int j) const;
    TimingEdge* edge(int i, int j);
    std::size_t feasible_edges() const;

private:
    int horizon_;
    int aoi_bound_;
    int rb_cap_;
    std::vector<TimingEdge> edges_;  // ordered by (from, to)
};

struct BuildOptions {
    int jobs = 1;
    EdgeCache* cache = nullptr;
    /// Multiplies the payload threshold when solving (rate margin, >= 1).
    double rate_margin = 1.0;
    InnerOptions inner{};
};

/// Solves the interval problem on every edge. Infeasible intervals become
/// infeasible edges. Results do not depend on `jobs`.
TimingGraph build_graph(const Scenario& scenario, const ChannelProfile& profile, int rb_cap,
                        const BuildOptions& options = {});

/// Number of edges of a graph over T+1 nodes with maximum gap tau.
std::size_t edge_count(int horizon, int aoi_bound);

struct SamplingPlan {
    int horizon = 0;
    int rb_cap = 0;
    std::vector<int> instants;  // interval starts, instants.front() == 1
    std::vector<std::shared_ptr<const InnerSolution>> intervals;
    double total_energy = 0.0;   // sum of mixed interval energies
    double binary_energy = 0.0;  // sum of exported binary energies

    /// Interval boundaries: instants followed by horizon + 1.
    std::vector<int> path() const;
    /// Worst per-BS RB count over all slots of the exported plan.
    int max_load() const;
};

/// Minimum-weight path 1 -> T+1 by dynamic programming in node order. Ties go
/// to the earlier predecessor. Throws NoFeasiblePlan if T+1 is unreachable.
SamplingPlan shortest_path(const TimingGraph& graph);

/// Builds a plan from explicit interval solutions over a fixed instant list.
SamplingPlan make_plan(int horizon, int rb_cap, std::vector<int> instants,
                       std::vector<std::shared_ptr<const InnerSolution>> intervals);

/// Violations of the SamplingPlan invariants (gaps, coverage, totals).
std::vector<std::string> check_plan(const SamplingPlan& plan, int aoi_bound);

/// CSV with header "i,j,weight"; infeasible edges print INF.
void write_graph_csv(const TimingGraph& graph, std::ostream& out);

}  // namespace mpcomm
