#include "mpcomm/timing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "mpcomm/format.hpp"

namespace mpcomm {

std::shared_ptr<const IntervalResult> EdgeCache::find(const Key& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : it->second;
}

std::shared_ptr<const IntervalResult> EdgeCache::insert(const Key& key, std::shared_ptr<const IntervalResult> value) {
    std::lock_guard lock(mutex_);
    return entries_.try_emplace(key, std::move(value)).first->second;
}

std::size_t EdgeCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

TimingGraph::TimingGraph(int horizon, int aoi_bound, int rb_cap)
    : horizon_(horizon), aoi_bound_(aoi_bound), rb_cap_(rb_cap) {
    if (horizon < 1 || aoi_bound < 1 || rb_cap < 1) throw std::invalid_argument("graph parameters must be >= 1");
    for (int i = 1; i <= horizon; ++i)
        for (int j = i + 1; j <= std::min(horizon + 1, i + aoi_bound); ++j) edges_.push_back({i, j, nullptr});
}

namespace {

template <class Edges>
auto find_edge(Edges& edges, int i, int j) -> decltype(&edges.front()) {
    auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{i, j},
                               [](const TimingEdge& e, const std::pair<int, int>& key) {
                                   return std::pair{e.from, e.to} < key;
                               });
    return it != edges.end() && it->from == i && it->to == j ? &*it : nullptr;
}

}  // namespace

const TimingEdge* TimingGraph::edge(int i, int j) const { return find_edge(edges_, i, j); }

TimingEdge* TimingGraph::edge(int i, int j) { return find_edge(edges_, i, j); }

std::size_t TimingGraph::feasible_edges() const {
    return static_cast<std::size_t>(std::count_if(edges_.begin(), edges_.end(), [](const auto& e) { return e.feasible(); }));
}

std::size_t edge_count(int horizon, int aoi_bound) {
    std::size_t n = 0;
    for (int c = 1; c <= aoi_bound; ++c) n += static_cast<std::size_t>(std::max(0, horizon + 1 - c));
    return n;
}

TimingGraph build_graph(const Scenario& scenario, const ChannelProfile& profile, int rb_cap,
                        const BuildOptions& options) {
    if (profile.horizon() != scenario.horizon || profile.num_bs() != scenario.num_bs ||
        profile.num_rb() != scenario.num_rb)
        throw std::invalid_argument("profile dimensions do not match the scenario");
    if (rb_cap < 1) throw std::invalid_argument("RB cap must be >= 1");
    if (!(options.rate_margin >= 1.0)) throw std::invalid_argument("rate margin must be >= 1");

    TimingGraph g(scenario.horizon, scenario.aoi_bound, rb_cap);
    auto& edges = g.edges();
    const double target = scenario.payload_threshold * options.rate_margin;

    auto solve = [&](TimingEdge& e) {
        const EdgeCache::Key key{e.from, e.to, rb_cap};
        if (options.cache)
            if (auto hit = options.cache->find(key)) {
                e.result = hit;
                return;
            }
        auto res = std::make_shared<const IntervalResult>(
            solve_interval({e.from, e.to, rb_cap, target, scenario.power_budget_mw}, profile, options.inner));
        e.result = options.cache ? options.cache->insert(key, std::move(res)) : std::move(res);
    };

    const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(edges.size())));
    if (jobs == 1) {
        for (auto& e : edges) solve(e);
        return g;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < edges.size();) {
                try {
                    solve(edges[i]);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return g;
}

std::vector<int> SamplingPlan::path() const {
    std::vector<int> p = instants;
    p.push_back(horizon + 1);
    return p;
}

int SamplingPlan::max_load() const {
    int worst = 0;
    for (const auto& s : intervals) worst = std::max(worst, s->max_load());
    return worst;
}

SamplingPlan make_plan(int horizon, int rb_cap, std::vector<int> instants,
                       std::vector<std::shared_ptr<const InnerSolution>> intervals) {
    if (instants.size() != intervals.size()) throw std::invalid_argument("one interval solution per instant");
    SamplingPlan plan;
    plan.horizon = horizon;
    plan.rb_cap = rb_cap;
    plan.instants = std::move(instants);
    plan.intervals = std::move(intervals);
    for (const auto& s : plan.intervals) {
        plan.total_energy += s->energy;
        plan.binary_energy += s->binary_energy;
    }
    return plan;
}

SamplingPlan shortest_path(const TimingGraph& graph) {
    const int last = graph.num_nodes();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(last + 1, inf);
    std::vector<int> pred(last + 1, 0);
    dist[1] = 0.0;
    for (int j = 2; j <= last; ++j) {
        for (int i = std::max(1, j - graph.aoi_bound()); i < j; ++i) {
            const TimingEdge* e = graph.edge(i, j);
            if (!e || !e->feasible() || dist[i] == inf) continue;
            const double d = dist[i] + e->weight();
            if (d < dist[j]) {
                dist[j] = d;
                pred[j] = i;
            }
        }
    }
    if (dist[last] == inf) throw NoFeasiblePlan("no feasible sampling sequence reaches the end of the horizon");

    std::vector<int> nodes;
    for (int v = last; v != 1; v = pred[v]) nodes.push_back(pred[v]);
    std::reverse(nodes.begin(), nodes.end());
    std::vector<std::shared_ptr<const InnerSolution>> intervals;
    for (std::size_t m = 0; m < nodes.size(); ++m) {
        const int to = m + 1 < nodes.size() ? nodes[m + 1] : last;
        const TimingEdge* e = graph.edge(nodes[m], to);
        intervals.emplace_back(e->result, &*e->result->solution);
    }
    SamplingPlan plan = make_plan(graph.horizon(), graph.rb_cap(), std::move(nodes), std::move(intervals));
    return plan;
}

std::vector<std::string> check_plan(const SamplingPlan& plan, int aoi_bound) {
    std::vector<std::string> v;
    const auto p = plan.path();
    if (plan.instants.empty() || plan.instants.front() != 1) v.push_back("plan must start at slot 1");
    for (std::size_t m = 1; m < p.size(); ++m) {
        const int gap = p[m] - p[m - 1];
        if (gap < 1 || gap > aoi_bound)
            v.push_back("gap " + std::to_string(gap) + " between " + std::to_string(p[m - 1]) + " and " +
                        std::to_string(p[m]) + " is outside [1, " + std::to_string(aoi_bound) + "]");
    }
    if (plan.intervals.size() != plan.instants.size()) {
        v.push_back("interval count does not match instant count");
        return v;
    }
    double total = 0.0, binary = 0.0;
    for (std::size_t m = 0; m < plan.intervals.size(); ++m) {
        const auto& s = plan.intervals[m];
        if (!s || s->start != p[m] || s->end != p[m + 1]) v.push_back("interval " + std::to_string(m) + " bounds mismatch");
        if (!s) continue;
        if (s->max_load() > plan.rb_cap) v.push_back("interval " + std::to_string(m) + " exceeds the RB cap");
        total += s->energy;
        binary += s->binary_energy;
    }
    if (std::abs(total - plan.total_energy) > 1e-9 * std::max(1.0, total)) v.push_back("total energy mismatch");
    if (std::abs(binary - plan.binary_energy) > 1e-9 * std::max(1.0, binary)) v.push_back("binary energy mismatch");
    return v;
}

void write_graph_csv(const TimingGraph& graph, std::ostream& out) {
    out << "i,j,weight\n";
    for (const auto& e : graph.edges()) {
        out << e.from << ',' << e.to << ',';
        if (e.feasible()) out << fmt9(e.weight());
        else out << "INF";
        out << '\n';
    }
}

}  // namespace mpcomm
