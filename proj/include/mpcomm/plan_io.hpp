#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "mpcomm/channel.hpp"
#include "mpcomm/scenario.hpp"
#include "mpcomm/timing.hpp"

namespace mpcomm {

struct PlanHeader {
    std::uint64_t scenario_hash = 0;
    std::int64_t seed = 0;
    int epsilon_theta = 0;
    int aoi_bound = 0;
    double payload_threshold = 0.0;
    double power_budget_mw = 0.0;
    double rate_margin = 1.0;
};

struct PlanFile {
    PlanHeader header;
    SamplingPlan plan;
};

/// Raised when a plan file is malformed or fails its invariants.
class PlanFormatError : public std::runtime_error {
public:
    explicit PlanFormatError(const std::string& what) : std::runtime_error(what) {}
};

PlanHeader make_header(const Scenario& scenario, std::int64_t seed, int epsilon_theta, double rate_margin = 1.0);

/// Line-oriented text; reals are written with 17 significant digits so a
/// load reproduces every value exactly.
void write_plan(const PlanFile& file, std::ostream& out);
void save_plan(const PlanFile& file, const std::string& path);

/// Parses and re-checks every interval and plan invariant against the
/// profile. Throws PlanFormatError on any problem.
PlanFile read_plan(std::istream& in, const ChannelProfile& profile);
PlanFile load_plan(const std::string& path, const ChannelProfile& profile);

}  // namespace mpcomm
