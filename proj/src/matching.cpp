#include "mpcomm/matching.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace mpcomm {

int BinaryAssignment::bs_load(int n) const {
    int c = 0;
    for (int k = 0; k < num_rb; ++k) c += selected(n, k);
    return c;
}

int BinaryAssignment::rb_load(int k) const {
    int c = 0;
    for (int n = 0; n < num_bs; ++n) c += selected(n, k);
    return c;
}

int BinaryAssignment::size() const {
    int c = 0;
    for (auto s : select) c += s;
    return c;
}

bool is_feasible(const BinaryAssignment& a, int bs_capacity) {
    if (a.select.size() != static_cast<std::size_t>(a.num_bs) * a.num_rb) return false;
    for (auto s : a.select)
        if (s > 1) return false;
    for (int n = 0; n < a.num_bs; ++n)
        if (a.bs_load(n) > bs_capacity) return false;
    for (int k = 0; k < a.num_rb; ++k)
        if (a.rb_load(k) > 1) return false;
    return true;
}

namespace {

std::atomic<MatchingObserver> g_observer{nullptr};

// Lazy min-heap of (key, rb); stale entries are skipped by the caller's test.
using Entry = std::pair<double, int>;
using MinHeap = std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>>;

template <class Live>
const Entry* heap_top(MinHeap& h, Live live) {
    while (!h.empty() && !live(h.top().second)) h.pop();
    return h.empty() ? nullptr : &h.top();
}

}  // namespace

void set_matching_observer(MatchingObserver observer) { g_observer.store(observer); }

namespace {

// Successive shortest augmenting paths, contracted onto the BS nodes: every
// residual path alternates BS -> RB -> BS, so a path step "BS a takes an RB
// from BS b" costs min_k w(a,k) - w(b,k) over RBs k held by b, and the last
// step takes a free RB. Per-pair heaps keep each step cheap, so one
// augmentation costs O(N^3 + N^2 log K) rather than a pass over all N K edges.
BinaryAssignment solve_matching(const AssignmentProblem& p) {
    if (p.num_bs < 0 || p.num_rb < 0 || p.weights.size() != static_cast<std::size_t>(p.num_bs) * p.num_rb)
        throw std::invalid_argument("assignment weights do not match dimensions");
    if (p.bs_capacity < 1) throw std::invalid_argument("BS capacity must be >= 1");

    const int N = p.num_bs;
    const int K = p.num_rb;
    BinaryAssignment out{N, K, std::vector<std::uint8_t>(static_cast<std::size_t>(N) * K, 0), 0.0};

    double scale = 0.0;
    for (double w : p.weights) {
        if (!std::isfinite(w)) throw std::invalid_argument("assignment weights must be finite");
        if (w < 0.0) scale = std::max(scale, -w);
    }
    if (scale == 0.0) return out;  // nothing can lower the objective below 0

    std::vector<int> owner(K, -1), load(N, 0);
    std::vector<MinHeap> free_rb(N);
    for (int a = 0; a < N; ++a) {
        std::vector<Entry> items;
        for (int k = 0; k < K; ++k)
            if (p.weight(a, k) < 0.0) items.push_back({p.weight(a, k), k});
        free_rb[a] = MinHeap(std::greater<Entry>(), std::move(items));
    }
    // take[a * N + b]: RBs held by b that a could take, keyed by the cost change.
    std::vector<MinHeap> take(static_cast<std::size_t>(N) * N);
    auto acquire = [&](int b, int k) {
        owner[k] = b;
        for (int a = 0; a < N; ++a)
            if (a != b && p.weight(a, k) < 0.0)
                take[static_cast<std::size_t>(a) * N + b].push({p.weight(a, k) - p.weight(b, k), k});
    };

    const double stop_tol = 1e-13 * scale;
    const double relax_tol = 1e-15 * scale;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> step(static_cast<std::size_t>(N) * N), dist(N);
    std::vector<int> step_rb(step.size()), pred(N);

    const int max_flow = std::min(K, N * p.bs_capacity);
    for (int flow = 0; flow < max_flow; ++flow) {
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                const std::size_t i = static_cast<std::size_t>(a) * N + b;
                step[i] = inf;
                if (a == b) continue;
                if (const Entry* e = heap_top(take[i], [&](int k) { return owner[k] == b; })) {
                    step[i] = e->first;
                    step_rb[i] = e->second;
                }
            }
        for (int a = 0; a < N; ++a) {
            dist[a] = load[a] < p.bs_capacity ? 0.0 : inf;
            pred[a] = -1;
        }
        // Bellman-Ford over the N BS nodes; strict improvement keeps the
        // predecessor graph acyclic.
        for (int round = 0; round + 1 < N; ++round) {
            bool changed = false;
            for (int a = 0; a < N; ++a) {
                if (!std::isfinite(dist[a])) continue;
                for (int b = 0; b < N; ++b) {
                    const double s = step[static_cast<std::size_t>(a) * N + b];
                    if (std::isfinite(s) && dist[a] + s < dist[b] - relax_tol) {
                        dist[b] = dist[a] + s;
                        pred[b] = a;
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }
        int last = -1;
        double best = inf;
        for (int a = 0; a < N; ++a) {
            if (!std::isfinite(dist[a])) continue;
            const Entry* e = heap_top(free_rb[a], [&](int k) { return owner[k] < 0; });
            if (e && dist[a] + e->first < best) {
                best = dist[a] + e->first;
                last = a;
            }
        }
        if (last < 0 || best >= -stop_tol) break;

        // Walk back: `last` takes a free RB, each predecessor takes one RB
        // from its successor.
        const int fresh = free_rb[last].top().second;
        std::vector<std::pair<int, int>> moves{{last, fresh}};
        for (int b = last, guard = 0; pred[b] >= 0; b = pred[b]) {
            if (++guard > N) throw std::logic_error("cycle in augmenting path");
            const int a = pred[b];
            moves.push_back({a, step_rb[static_cast<std::size_t>(a) * N + b]});
        }
        ++load[moves.back().first];
        for (const auto& [bs, k] : moves) acquire(bs, k);
    }

    double total = 0.0;
    for (int k = 0; k < K; ++k) {
        if (owner[k] < 0) continue;
        out.select[static_cast<std::size_t>(owner[k]) * K + k] = 1;
        total += p.weight(owner[k], k);
    }
    out.total_weight = total;
    return out;
}

}  // namespace

BinaryAssignment min_cost_b_matching(const AssignmentProblem& p) {
    BinaryAssignment out = solve_matching(p);
    if (const auto obs = g_observer.load()) obs(p, out);
    return out;
}

double limit_perturbation(double level) { return std::max(1e-7 * std::abs(level), 1e-12); }

LimitAssignments limit_assignments(double level, const std::function<AssignmentProblem(double)>& weight_fn) {
    const double eps = limit_perturbation(level);
    return {min_cost_b_matching(weight_fn(level - eps)), min_cost_b_matching(weight_fn(level + eps))};
}

}  // namespace mpcomm
