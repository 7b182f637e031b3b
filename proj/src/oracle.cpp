#include "mpcomm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace mpcomm {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw OracleBudgetExceeded("oracle budget exceeded: " + what);
}

void check_dims(int num_bs, int num_rb, const OracleBudget& b) {
    require(num_bs <= b.max_bs, "N=" + std::to_string(num_bs) + " > " + std::to_string(b.max_bs));
    require(num_rb <= b.max_rb, "K=" + std::to_string(num_rb) + " > " + std::to_string(b.max_rb));
}

// Every binary N x K matrix with at most one BS per RB and at most `cap` RBs
// per BS, encoded as owner[k] in {-1, 0..N-1}.
std::vector<std::vector<int>> enumerate_assignments(int num_bs, int num_rb, int cap) {
    std::vector<std::vector<int>> out;
    std::vector<int> owner(num_rb, -1);
    std::vector<int> load(num_bs, 0);
    std::function<void(int)> dfs = [&](int k) {
        if (k == num_rb) {
            out.push_back(owner);
            return;
        }
        owner[k] = -1;
        dfs(k + 1);
        for (int n = 0; n < num_bs; ++n) {
            if (load[n] >= cap) continue;
            owner[k] = n;
            ++load[n];
            dfs(k + 1);
            --load[n];
        }
        owner[k] = -1;
    };
    dfs(0);
    return out;
}

struct SlotValue {
    double power = 0.0;
    double rate = 0.0;
};

// Brute-force best assignment of one slot at water level L; weight of RB
// (n, k) is p - L ln2 c with (p, c) from water-filling.
class SlotBrute {
public:
    SlotBrute(const ChannelProfile& profile, int t, int cap)
        : profile_(profile), t_(t), all_(enumerate_assignments(profile.num_bs(), profile.num_rb(), cap)) {}

    SlotValue at(double level) const {
        const int N = profile_.num_bs();
        const int K = profile_.num_rb();
        std::vector<double> w(static_cast<std::size_t>(N) * K), p(w.size()), c(w.size());
        for (int n = 0; n < N; ++n)
            for (int k = 0; k < K; ++k) {
                const WaterFill wf = water_fill(level, profile_.iota(n, k, t_));
                const std::size_t i = static_cast<std::size_t>(n) * K + k;
                p[i] = wf.power;
                c[i] = wf.rate;
                w[i] = wf.power - level * std::numbers::ln2 * wf.rate;
            }
        double best = 0.0;
        const std::vector<int>* arg = nullptr;
        for (const auto& owner : all_) {
            double s = 0.0;
            for (int k = 0; k < K; ++k)
                if (owner[k] >= 0) s += w[static_cast<std::size_t>(owner[k]) * K + k];
            if (s < best) {
                best = s;
                arg = &owner;
            }
        }
        SlotValue v;
        if (arg)
            for (int k = 0; k < K; ++k)
                if ((*arg)[k] >= 0) {
                    v.power += p[static_cast<std::size_t>((*arg)[k]) * K + k];
                    v.rate += c[static_cast<std::size_t>((*arg)[k]) * K + k];
                }
        return v;
    }

private:
    const ChannelProfile& profile_;
    int t_;
    std::vector<std::vector<int>> all_;
};

struct OracleCap {
    double level;
    double rate;   // rate at the cap, interpolated across a jump
    double power;  // equals the power cap up to bisection error
};

OracleCap oracle_cap(const SlotBrute& slot, double lo, double hi, double power_cap) {
    SlotValue vlo = slot.at(lo), vhi = slot.at(hi);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const SlotValue v = slot.at(mid);
        if (v.power >= power_cap) {
            hi = mid;
            vhi = v;
        } else {
            lo = mid;
            vlo = v;
        }
    }
    const double gap = vhi.power - vlo.power;
    const double f = gap > 0.0 ? std::clamp((power_cap - vlo.power) / gap, 0.0, 1.0) : 1.0;
    return {hi, vlo.rate + f * (vhi.rate - vlo.rate), vlo.power + f * gap};
}

}  // namespace

BinaryAssignment oracle_matching(const AssignmentProblem& p, const OracleBudget& budget) {
    check_dims(p.num_bs, p.num_rb, budget);
    BinaryAssignment out{p.num_bs, p.num_rb, std::vector<std::uint8_t>(static_cast<std::size_t>(p.num_bs) * p.num_rb, 0),
                         0.0};
    double best = 0.0;
    std::vector<int> arg(p.num_rb, -1);
    for (const auto& owner : enumerate_assignments(p.num_bs, p.num_rb, p.bs_capacity)) {
        double s = 0.0;
        for (int k = 0; k < p.num_rb; ++k)
            if (owner[k] >= 0) s += p.weight(owner[k], k);
        if (s < best) {
            best = s;
            arg = owner;
        }
    }
    for (int k = 0; k < p.num_rb; ++k)
        if (arg[k] >= 0) out.select[static_cast<std::size_t>(arg[k]) * p.num_rb + k] = 1;
    out.total_weight = best;
    return out;
}

std::optional<double> oracle_inner(const IntervalSpec& spec, const ChannelProfile& profile,
                                   const OracleBudget& budget) {
    check_dims(profile.num_bs(), profile.num_rb(), budget);
    require(spec.length() <= budget.max_aoi_bound, "interval length " + std::to_string(spec.length()));
    if (spec.rate_target <= 0.0) return 0.0;

    const int len = spec.length();
    std::vector<SlotBrute> slots;
    std::vector<OracleCap> caps;
    double floor = std::numeric_limits<double>::infinity();
    for (int i = 0; i < len; ++i) {
        const int t = spec.start + i;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int n = 0; n < profile.num_bs(); ++n)
            for (int k = 0; k < profile.num_rb(); ++k) {
                lo = std::min(lo, profile.iota(n, k, t));
                hi = std::max(hi, profile.iota(n, k, t));
            }
        floor = std::min(floor, lo);
        slots.emplace_back(profile, t, spec.rb_cap);
        caps.push_back(oracle_cap(slots.back(), lo, hi + spec.power_cap, spec.power_cap));
    }
    double top = 0.0, max_rate = 0.0;
    for (const auto& c : caps) {
        top = std::max(top, c.level);
        max_rate += c.rate;
    }
    if (max_rate < spec.rate_target) return std::nullopt;

    auto eval = [&](double level) {
        SlotValue total;
        for (int i = 0; i < len; ++i) {
            if (level >= caps[i].level) {
                total.power += caps[i].power;
                total.rate += caps[i].rate;
            } else {
                const SlotValue v = slots[i].at(level);
                total.power += v.power;
                total.rate += v.rate;
            }
        }
        return total;
    };

    const int G = std::max(2, budget.grid_points);
    const double ratio = std::log(top / floor);
    SlotValue prev = eval(floor);
    for (int g = 1; g < G; ++g) {
        const double level = g == G - 1 ? top : floor * std::exp(ratio * g / (G - 1));
        const SlotValue cur = eval(level);
        if (cur.rate >= spec.rate_target) {
            const double span = cur.rate - prev.rate;
            const double f = span > 0.0 ? (spec.rate_target - prev.rate) / span : 1.0;
            return prev.power + f * (cur.power - prev.power);
        }
        prev = cur;
    }
    // Only reachable through rounding in max_rate.
    return prev.power;
}

OraclePlan oracle_plan(int horizon, int aoi_bound, const IntervalWeight& weight, const OracleBudget& budget) {
    require(horizon <= budget.max_horizon, "T=" + std::to_string(horizon));
    require(aoi_bound <= budget.max_aoi_bound, "aoi bound " + std::to_string(aoi_bound));
    // Memoise weights so each interval is evaluated once.
    std::vector<std::vector<std::optional<std::optional<double>>>> memo(
        horizon + 2, std::vector<std::optional<std::optional<double>>>(horizon + 2));
    auto w = [&](int i, int j) {
        auto& slot = memo[i][j];
        if (!slot) slot = weight(i, j);
        return *slot;
    };

    OraclePlan best;
    bool found = false;
    best.energy = std::numeric_limits<double>::infinity();
    std::vector<int> path{1};
    std::int64_t count = 0;
    std::function<void(int, double)> dfs = [&](int node, double cost) {
        if (node == horizon + 1) {
            ++count;
            if (!found || cost < best.energy) {
                found = true;
                best.energy = cost;
                best.instants.assign(path.begin(), path.end() - 1);
            }
            return;
        }
        for (int gap = 1; gap <= aoi_bound && node + gap <= horizon + 1; ++gap) {
            const auto e = w(node, node + gap);
            if (!e) continue;
            path.push_back(node + gap);
            dfs(node + gap, cost + *e);
            path.pop_back();
        }
    };
    dfs(1, 0.0);
    if (!found) throw NoFeasiblePlan("no feasible sampling sequence");
    best.sequences = count;
    return best;
}

OraclePlan oracle_plan(const Scenario& scenario, const ChannelProfile& profile, int rb_cap,
                       const OracleBudget& budget) {
    check_dims(profile.num_bs(), profile.num_rb(), budget);
    return oracle_plan(
        scenario.horizon, scenario.aoi_bound,
        [&](int i, int j) {
            IntervalSpec spec{i, j, rb_cap, scenario.payload_threshold, scenario.power_budget_mw};
            return oracle_inner(spec, profile, budget);
        },
        budget);
}

std::vector<std::optional<double>> oracle_energy_by_cap(const Scenario& scenario, const ChannelProfile& profile,
                                                        const OracleBudget& budget) {
    std::vector<std::optional<double>> out;
    for (int cap = 1; cap <= scenario.num_rb; ++cap) {
        try {
            out.push_back(oracle_plan(scenario, profile, cap, budget).energy);
        } catch (const NoFeasiblePlan&) {
            out.push_back(std::nullopt);
        }
    }
    return out;
}

McEstimate mc_expected_capacity(double kappa, double snr_linear, std::int64_t samples, std::int64_t seed,
                                const OracleBudget& budget) {
    require(samples <= budget.mc_samples, "samples " + std::to_string(samples));
    if (samples < 2) throw std::invalid_argument("need at least two samples");
    if (snr_linear == 0.0) return {0.0, 0.0};
    std::mt19937_64 rng(mix_seed(seed, 0x4d43));
    std::gamma_distribution<double> gamma(kappa, 1.0 / kappa);
    // Welford accumulation.
    double mean = 0.0, m2 = 0.0;
    for (std::int64_t i = 1; i <= samples; ++i) {
        const double x = std::log2(1.0 + snr_linear * gamma(rng));
        const double d = x - mean;
        mean += d / static_cast<double>(i);
        m2 += d * (x - mean);
    }
    const double var = m2 / static_cast<double>(samples - 1);
    return {mean, std::sqrt(var / static_cast<double>(samples))};
}

}  // namespace mpcomm
