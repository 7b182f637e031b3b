#include "mpcomm/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "mpcomm/format.hpp"

namespace mpcomm {

std::vector<int> aoi_recursion(const std::vector<std::uint8_t>& success, const std::vector<int>& generation) {
    if (success.size() != generation.size()) throw std::invalid_argument("success and generation lengths differ");
    std::vector<int> age(success.size() + 1);
    age[0] = 1;
    for (std::size_t i = 0; i < success.size(); ++i) {
        const int t = static_cast<int>(i) + 1;
        age[i + 1] = success[i] ? t - generation[i] : age[i] + 1;
    }
    return age;
}

AoiTrace aoi_trace(const std::vector<int>& path, const std::vector<double>& slot_payload, double threshold) {
    if (path.size() < 2 || path.front() != 1) throw std::invalid_argument("path must run from 1 to T+1");
    const int horizon = path.back() - 1;
    if (static_cast<int>(slot_payload.size()) != horizon) throw std::invalid_argument("one payload per slot");
    AoiTrace tr;
    tr.success.assign(horizon, 0);
    tr.cum_payload.assign(horizon, 0.0);
    std::vector<int> generation(horizon);
    // A delivery at the end of slot t leaves age 1 at slot t+1.
    for (int t = 1; t <= horizon; ++t) generation[t - 1] = t - 1;
    for (std::size_t m = 0; m + 1 < path.size(); ++m) {
        if (path[m + 1] <= path[m]) throw std::invalid_argument("path must be increasing");
        double acc = 0.0;
        for (int t = path[m]; t < path[m + 1]; ++t) {
            acc += slot_payload[t - 1];
            tr.cum_payload[t - 1] = acc;
        }
        tr.delivered.push_back(acc);
        tr.success[path[m + 1] - 2] = acc >= threshold;
    }
    tr.age = aoi_recursion(tr.success, generation);
    tr.peak_age = *std::max_element(tr.age.begin(), tr.age.end());
    return tr;
}

std::vector<double> expected_slot_payload(const SamplingPlan& plan, const ChannelProfile& profile) {
    std::vector<double> out(plan.horizon, 0.0);
    for (const auto& s : plan.intervals)
        for (int t = s->start; t < s->end; ++t)
            for (int n = 0; n < s->num_bs; ++n)
                for (int k = 0; k < s->num_rb; ++k)
                    if (s->active(n, k, t))
                        out[t - 1] += capacity_lower_bound(s->power_at(n, k, t), profile.gain(n, k, t),
                                                           profile.shape(n, k, t), profile.noise_power_mw());
    return out;
}

std::vector<double> realized_slot_payload(const SamplingPlan& plan, const ChannelProfile& profile,
                                          const FadingSample& fading) {
    std::vector<double> out(plan.horizon, 0.0);
    const double noise = profile.noise_power_mw();
    for (const auto& s : plan.intervals)
        for (int t = s->start; t < s->end; ++t)
            for (int n = 0; n < s->num_bs; ++n)
                for (int k = 0; k < s->num_rb; ++k)
                    if (s->active(n, k, t))
                        out[t - 1] += std::log2(1.0 + s->power_at(n, k, t) * profile.gain(n, k, t) *
                                                          fading.at(n, k, t) / noise);
    return out;
}

SimReport simulate(const SamplingPlan& plan, const Scenario& scenario, const ChannelProfile& profile, int replicas,
                   std::int64_t seed, const SimOptions& options) {
    if (replicas < 1) throw std::invalid_argument("replica count must be >= 1");
    if (plan.horizon != profile.horizon()) throw std::invalid_argument("plan horizon does not match the profile");
    const auto path = plan.path();
    const double threshold = scenario.payload_threshold;

    SimReport rep;
    rep.replicas = replicas;
    rep.aoi_bound = scenario.aoi_bound;
    rep.threshold = threshold;
    rep.mean_energy = plan.binary_energy * scenario.slot_duration;
    rep.mixed_energy = plan.total_energy * scenario.slot_duration;
    rep.worst_rb_load = plan.max_load();
    rep.expected_trace =
        aoi_trace(path, expected_slot_payload(plan, profile), threshold * (1.0 - options.expected_slack));
    rep.expected_peak_age = rep.expected_trace.peak_age;
    rep.expected_success = rep.expected_peak_age <= scenario.aoi_bound;

    std::vector<AoiTrace> traces(replicas);
    auto run = [&](int r) {
        const auto fading = sample_fading(profile, static_cast<std::int64_t>(mix_seed(seed, 0x5100 + r)));
        traces[r] = aoi_trace(path, realized_slot_payload(plan, profile, fading), threshold);
    };
    const int jobs = std::max(1, std::min(options.jobs, replicas));
    if (jobs == 1) {
        for (int r = 0; r < replicas; ++r) run(r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (int r; (r = next.fetch_add(1)) < replicas;) run(r);
            });
        for (auto& t : pool) t.join();
    }

    long ok = 0, intervals = 0, delivered = 0;
    double peak_sum = 0.0;
    for (const auto& tr : traces) {
        ok += tr.peak_age <= scenario.aoi_bound;
        peak_sum += tr.peak_age;
        rep.max_peak_age = std::max(rep.max_peak_age, tr.peak_age);
        for (double d : tr.delivered) {
            ++intervals;
            delivered += d >= threshold;
        }
    }
    rep.success_rate = static_cast<double>(ok) / replicas;
    rep.interval_success_rate = intervals ? static_cast<double>(delivered) / intervals : 1.0;
    rep.mean_peak_age = peak_sum / replicas;
    if (options.keep_traces) rep.traces = std::move(traces);
    return rep;
}

namespace {

InnerSolution zero_solution(int start, int end, int num_bs, int num_rb) {
    InnerSolution s;
    s.start = start;
    s.end = end;
    s.num_bs = num_bs;
    s.num_rb = num_rb;
    const std::size_t len = static_cast<std::size_t>(end - start);
    s.assignment.assign(len * num_bs * num_rb, 0);
    s.power.assign(len * num_bs * num_rb, 0.0);
    s.slot_levels.assign(len, 0.0);
    s.cap_levels.assign(len, 0.0);
    s.mix.assign(len, 0.0);
    s.slot_energy.assign(len, 0.0);
    s.binary_meets_target = false;
    return s;
}

InnerSolution solve_or_zero(const IntervalSpec& spec, const ChannelProfile& profile, bool& feasible) {
    auto r = solve_interval(spec, profile);
    if (r.feasible()) return std::move(*r.solution);
    feasible = false;
    return zero_solution(spec.start, spec.end, profile.num_bs(), profile.num_rb());
}

}  // namespace

InnerSolution slice_solution(const InnerSolution& s, int start, int end, const ChannelProfile& profile) {
    if (start < s.start || end > s.end || start >= end) throw std::invalid_argument("slice outside the solution");
    InnerSolution out = zero_solution(start, end, s.num_bs, s.num_rb);
    out.binary_meets_target = s.binary_meets_target;
    out.global_level = s.global_level;
    for (int t = start; t < end; ++t) {
        const int i = t - s.start, o = t - start;
        out.slot_levels[o] = s.slot_levels[i];
        out.cap_levels[o] = s.cap_levels[i];
        out.mix[o] = s.mix[i];
        out.slot_energy[o] = s.slot_energy[i];
        out.energy += s.slot_energy[i];
        for (int n = 0; n < s.num_bs; ++n)
            for (int k = 0; k < s.num_rb; ++k) {
                const std::size_t src = s.index(n, k, t), dst = out.index(n, k, t);
                out.assignment[dst] = s.assignment[src];
                out.power[dst] = s.power[src];
                if (!s.assignment[src]) continue;
                out.binary_energy += s.power[src];
                out.expected_rate += capacity_lower_bound(s.power[src], profile.gain(n, k, t), profile.shape(n, k, t),
                                                          profile.noise_power_mw());
            }
    }
    out.mixed_rate = out.expected_rate;
    return out;
}

InnerSolution concat_solutions(const std::vector<InnerSolution>& parts) {
    if (parts.empty()) throw std::invalid_argument("nothing to concatenate");
    for (std::size_t i = 1; i < parts.size(); ++i)
        if (parts[i].start != parts[i - 1].end) throw std::invalid_argument("solutions are not consecutive");
    InnerSolution out = zero_solution(parts.front().start, parts.back().end, parts.front().num_bs, parts.front().num_rb);
    out.binary_meets_target = true;
    for (const auto& p : parts) {
        for (int t = p.start; t < p.end; ++t) {
            const int i = t - p.start, o = t - out.start;
            out.slot_levels[o] = p.slot_levels[i];
            out.cap_levels[o] = p.cap_levels[i];
            out.mix[o] = p.mix[i];
            out.slot_energy[o] = p.slot_energy[i];
            for (int n = 0; n < p.num_bs; ++n)
                for (int k = 0; k < p.num_rb; ++k) {
                    out.assignment[out.index(n, k, t)] = p.assignment[p.index(n, k, t)];
                    out.power[out.index(n, k, t)] = p.power[p.index(n, k, t)];
                }
        }
        out.energy += p.energy;
        out.binary_energy += p.binary_energy;
        out.expected_rate += p.expected_rate;
        out.mixed_rate += p.mixed_rate;
        out.binary_meets_target = out.binary_meets_target && p.binary_meets_target;
    }
    return out;
}

std::vector<int> periodic_instants(int horizon, int aoi_bound) {
    std::vector<int> out;
    for (int t = 1; t <= horizon; t += aoi_bound) out.push_back(t);
    return out;
}

namespace {

PolicyPlan assemble(std::string name, const Scenario& sc, int rb_cap, std::vector<int> instants,
                    std::vector<InnerSolution> parts, bool feasible) {
    std::vector<std::shared_ptr<const InnerSolution>> ptrs;
    for (auto& p : parts) ptrs.push_back(std::make_shared<const InnerSolution>(std::move(p)));
    return {std::move(name), make_plan(sc.horizon, rb_cap, std::move(instants), std::move(ptrs)), feasible};
}

}  // namespace

PolicyPlan baseline_periodic(const Scenario& sc, const ChannelProfile& profile, int rb_cap, double margin) {
    auto instants = periodic_instants(sc.horizon, sc.aoi_bound);
    bool feasible = true;
    std::vector<InnerSolution> parts;
    for (std::size_t m = 0; m < instants.size(); ++m) {
        const int end = m + 1 < instants.size() ? instants[m + 1] : sc.horizon + 1;
        parts.push_back(solve_or_zero({instants[m], end, rb_cap, sc.payload_threshold * margin, sc.power_budget_mw},
                                      profile, feasible));
    }
    return assemble("periodic", sc, rb_cap, std::move(instants), std::move(parts), feasible);
}

PolicyPlan baseline_instantaneous(const Scenario& sc, const ChannelProfile& profile, int rb_cap, double margin) {
    auto instants = periodic_instants(sc.horizon, sc.aoi_bound);
    const double per_slot = sc.payload_threshold * margin / sc.aoi_bound;
    bool feasible = true;
    std::vector<InnerSolution> parts;
    for (std::size_t m = 0; m < instants.size(); ++m) {
        const int end = m + 1 < instants.size() ? instants[m + 1] : sc.horizon + 1;
        std::vector<InnerSolution> slots;
        for (int t = instants[m]; t < end; ++t)
            slots.push_back(solve_or_zero({t, t + 1, rb_cap, per_slot, sc.power_budget_mw}, profile, feasible));
        parts.push_back(concat_solutions(slots));
    }
    return assemble("instantaneous", sc, rb_cap, std::move(instants), std::move(parts), feasible);
}

PolicyPlan baseline_average(const Scenario& sc, const ChannelProfile& profile, int rb_cap, double margin) {
    auto instants = periodic_instants(sc.horizon, sc.aoi_bound);
    const double target = sc.horizon * sc.payload_threshold * margin / sc.aoi_bound;
    bool feasible = true;
    const InnerSolution whole =
        solve_or_zero({1, sc.horizon + 1, rb_cap, target, sc.power_budget_mw}, profile, feasible);
    std::vector<InnerSolution> parts;
    for (std::size_t m = 0; m < instants.size(); ++m) {
        const int end = m + 1 < instants.size() ? instants[m + 1] : sc.horizon + 1;
        parts.push_back(slice_solution(whole, instants[m], end, profile));
    }
    return assemble("average", sc, rb_cap, std::move(instants), std::move(parts), feasible);
}

PolicyPlan age_aware_policy(const Scenario& sc, const ChannelProfile& profile, int rb_cap,
                            const BuildOptions& options) {
    try {
        return {"age-aware", shortest_path(build_graph(sc, profile, rb_cap, options)), true};
    } catch (const NoFeasiblePlan&) {
        PolicyPlan p{"age-aware", {}, false};
        p.plan.horizon = sc.horizon;
        p.plan.rb_cap = rb_cap;
        return p;
    }
}

void write_trace_csv(const SimReport& report, std::ostream& out) {
    out << "replica,t,age,success,cum_payload\n";
    for (std::size_t r = 0; r < report.traces.size(); ++r) {
        const auto& tr = report.traces[r];
        for (std::size_t i = 0; i < tr.success.size(); ++i)
            out << r << ',' << i + 1 << ',' << tr.age[i] << ',' << int(tr.success[i]) << ','
                << fmt9(tr.cum_payload[i]) << '\n';
    }
}

std::string report_json(const SimReport& r) {
    nlohmann::ordered_json j;
    j["replicas"] = r.replicas;
    j["aoi_bound"] = r.aoi_bound;
    j["payload_threshold"] = r.threshold;
    j["success_rate"] = r.success_rate;
    j["interval_success_rate"] = r.interval_success_rate;
    j["mean_peak_age"] = r.mean_peak_age;
    j["max_peak_age"] = r.max_peak_age;
    j["expected_success"] = r.expected_success;
    j["expected_peak_age"] = r.expected_peak_age;
    j["mean_energy"] = r.mean_energy;
    j["mixed_energy"] = r.mixed_energy;
    j["worst_rb_load"] = r.worst_rb_load;
    return j.dump(2) + "\n";
}

}  // namespace mpcomm
