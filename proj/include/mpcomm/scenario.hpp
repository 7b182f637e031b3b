#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpcomm {

using Position = std::array<double, 3>;

/// How the LOS/NLOS state of each (BS, slot) link is decided.
enum class LosModel { probabilistic, always_los, always_nlos };

/// Raised when a configuration document cannot be parsed. `key()` names the
/// offending entry (empty when the document itself is malformed).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string key, const std::string& what)
        : std::runtime_error(what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Raised when a scenario breaks one or more invariants. Carries every
/// violation, not just the first one found.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// Immutable description of one planning problem. Powers are linear mW.
/// Slots are numbered 1..horizon in the public API; `uav_trajectory[t-1]` is
/// the UAV position during slot t.
struct Scenario {
    int horizon = 0;        // T
    int num_bs = 0;         // N
    int num_rb = 0;         // K
    int aoi_bound = 0;      // peak-age bound, in slots
    double payload_threshold = 0.0;  // bits/s/Hz summed over RBs and slots
    double power_budget_mw = 0.0;    // per-slot sum power
    double noise_power_mw = 0.0;
    double slot_duration = 1.0;      // seconds
    std::vector<Position> uav_trajectory;
    std::vector<Position> bs_positions;
    double carrier_freq_ghz = 3.0;
    double shadowing_sigma_db = 0.0;
    double shadowing_corr_dist_m = 5.0;
    std::array<double, 2> kappa_range{1.0, 30.0};
    bool kappa_per_slot = false;
    LosModel los_model = LosModel::probabilistic;
    std::int64_t master_seed = 0;

    bool operator==(const Scenario&) const = default;

    /// All invariant violations; empty when the scenario is valid.
    std::vector<std::string> violations() const;
    /// Throws ValidationError listing every violation.
    void validate() const;

    double distance(int bs, int slot) const;           // 3D metres, slot 1-based
    double elevation_deg(int bs, int slot) const;
};

/// Smallest admissible Gamma shape; beta underflows below about 1.3e-3.
inline constexpr double kKappaFloor = 1e-2;

/// Parses a scenario from its JSON text and validates it.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
/// Canonical JSON form; `parse_scenario(to_json_text(s)) == s` exactly.
std::string to_json_text(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::string& path);
/// Stable 64-bit FNV-1a digest of the canonical text.
std::uint64_t scenario_hash(const Scenario& scenario);

struct PatrolOptions {
    int horizon = 60;
    int num_bs = 5;
    int num_rb = 10;
    int aoi_bound = 5;
    double payload_threshold = 20.0;
    double power_budget_dbm = 20.0;
    double noise_power_dbm = -90.0;
    double speed_mps = 6.0;
    double altitude_m = 50.0;
    double area_side_m = 200.0;
};

/// Circular patrol over a square area with ground BSs placed uniformly at
/// random. Reproducible from `seed`.
Scenario default_patrol_scenario(std::int64_t seed, const PatrolOptions& options = {});

}  // namespace mpcomm
