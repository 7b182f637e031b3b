#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "mpcomm/channel.hpp"
#include "mpcomm/inner.hpp"
#include "mpcomm/scenario.hpp"
#include "mpcomm/timing.hpp"

namespace mpcomm {

/// Age recursion over slots 1..T: tau[1] = 1, then
///   tau[t+1] = t - generation[t]   if success[t]
///   tau[t+1] = tau[t] + 1          otherwise.
/// Returns tau[1..T+1] (index 0 holds tau[1]).
std::vector<int> aoi_recursion(const std::vector<std::uint8_t>& success, const std::vector<int>& generation);

struct AoiTrace {
    std::vector<int> age;                // tau[1..T+1]
    std::vector<std::uint8_t> success;   // s[1..T]
    std::vector<double> delivered;       // payload per interval
    std::vector<double> cum_payload;     // payload since the current interval began, per slot
    int peak_age = 0;
};

/// Runs the age recursion for a partition of 1..T+1 into intervals (`path`
/// lists the boundaries, starting at 1 and ending at T+1). An interval
/// succeeds at its last slot when its payload reaches `threshold`; the
/// delivered sample is fresh at the next slot. `slot_payload[t-1]` is the
/// payload of slot t.
AoiTrace aoi_trace(const std::vector<int>& path, const std::vector<double>& slot_payload, double threshold);

/// Per-slot expected payload (sum of capacity bounds) of a plan.
std::vector<double> expected_slot_payload(const SamplingPlan& plan, const ChannelProfile& profile);

/// Per-slot realized payload of a plan under one fading draw.
std::vector<double> realized_slot_payload(const SamplingPlan& plan, const ChannelProfile& profile,
                                          const FadingSample& fading);

struct SimOptions {
    int jobs = 1;
    bool keep_traces = false;
    /// Relative slack when judging expected payload against the threshold,
    /// absorbing solver tolerance.
    double expected_slack = 1e-9;
};

struct SimReport {
    int replicas = 0;
    int aoi_bound = 0;
    double threshold = 0.0;
    double success_rate = 0.0;        // replicas with realized peak age <= bound
    double interval_success_rate = 0.0;  // realized, over all intervals of all replicas
    double mean_peak_age = 0.0;
    int max_peak_age = 0;
    bool expected_success = false;    // peak age <= bound under expected payload
    int expected_peak_age = 0;
    double mean_energy = 0.0;         // binary plan energy x slot duration
    double mixed_energy = 0.0;        // relaxed optimum x slot duration
    int worst_rb_load = 0;
    AoiTrace expected_trace;
    std::vector<AoiTrace> traces;     // realized, only with keep_traces
};

/// Monte Carlo evaluation: replica r draws its fading from a seed derived
/// from (seed, r) alone, and judges each interval on its realized payload.
SimReport simulate(const SamplingPlan& plan, const Scenario& scenario, const ChannelProfile& profile, int replicas,
                   std::int64_t seed, const SimOptions& options = {});

/// A baseline policy's plan; `feasible` is false if any interval (or slot)
/// could not meet its target, in which case that piece carries zero power.
struct PolicyPlan {
    std::string name;
    SamplingPlan plan;
    bool feasible = true;
};

/// Samples every aoi_bound slots starting at slot 1 (last interval may be
/// shorter).
std::vector<int> periodic_instants(int horizon, int aoi_bound);

PolicyPlan baseline_periodic(const Scenario& scenario, const ChannelProfile& profile, int rb_cap,
                             double rate_margin = 1.0);
/// Every slot must carry threshold / aoi_bound on its own; evaluated on the
/// periodic intervals.
PolicyPlan baseline_instantaneous(const Scenario& scenario, const ChannelProfile& profile, int rb_cap,
                                  double rate_margin = 1.0);
/// One solve over the whole horizon with target T * threshold / aoi_bound;
/// evaluated on the periodic intervals.
PolicyPlan baseline_average(const Scenario& scenario, const ChannelProfile& profile, int rb_cap,
                            double rate_margin = 1.0);
/// The graph-planned policy.
PolicyPlan age_aware_policy(const Scenario& scenario, const ChannelProfile& profile, int rb_cap,
                            const BuildOptions& options = {});

/// Restriction of a solution to slots [start, end). Energies and the
/// expected rate are recomputed per slot; mixed_rate is not tracked per slot
/// and is set to the expected rate of the slice.
InnerSolution slice_solution(const InnerSolution& s, int start, int end, const ChannelProfile& profile);
/// Concatenation of consecutive solutions into one.
InnerSolution concat_solutions(const std::vector<InnerSolution>& parts);

/// CSV "replica,t,age,success,cum_payload" for the kept realized traces.
void write_trace_csv(const SimReport& report, std::ostream& out);
/// Report summary as JSON text.
std::string report_json(const SimReport& report);

}  // namespace mpcomm
