#include "mpcomm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

namespace mpcomm {

using nlohmann::json;

namespace {

std::string join_violations(const std::vector<std::string>& v) {
    std::string out = "invalid scenario:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
}

const char* los_model_name(LosModel m) {
    switch (m) {
        case LosModel::probabilistic: return "probabilistic";
        case LosModel::always_los: return "los";
        case LosModel::always_nlos: return "nlos";
    }
    return "probabilistic";
}

template <class T>
T required(const json& doc, const char* key) {
    if (!doc.contains(key)) throw ParseError(key, std::string("missing required key '") + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(key, std::string("bad value for '") + key + "': " + e.what());
    }
}

template <class T>
T optional(const json& doc, const char* key, T fallback) {
    if (!doc.contains(key)) return fallback;
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(key, std::string("bad value for '") + key + "': " + e.what());
    }
}

// Accepts either `<stem>_mw` (linear) or `<stem>_dbm`.
double power_field(const json& doc, const std::string& stem) {
    const std::string mw = stem + "_mw";
    const std::string dbm = stem + "_dbm";
    if (doc.contains(mw)) return required<double>(doc, mw.c_str());
    if (doc.contains(dbm)) return dbm_to_mw(required<double>(doc, dbm.c_str()));
    throw ParseError(mw, "missing required key '" + mw + "' (or '" + dbm + "')");
}

std::vector<Position> positions(const json& doc, const char* key) {
    auto raw = required<std::vector<std::vector<double>>>(doc, key);
    std::vector<Position> out;
    out.reserve(raw.size());
    for (const auto& p : raw) {
        if (p.size() != 3) throw ParseError(key, std::string("'") + key + "' entries must be [x, y, z]");
        out.push_back({p[0], p[1], p[2]});
    }
    return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

std::vector<std::string> Scenario::violations() const {
    std::vector<std::string> v;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) v.push_back(msg);
    };
    check(horizon >= 1, "horizon_T must be >= 1");
    check(num_bs >= 1, "num_bs_N must be >= 1");
    check(num_rb >= 1, "num_rb_K must be >= 1");
    check(aoi_bound >= 1, "aoi_bound_tau must be >= 1");
    check(aoi_bound <= horizon, "aoi_bound_tau must not exceed horizon_T");
    check(payload_threshold > 0.0 && std::isfinite(payload_threshold),
          "payload_threshold_vbar must be positive");
    check(power_budget_mw > 0.0 && std::isfinite(power_budget_mw), "power budget must be positive");
    check(noise_power_mw > 0.0 && std::isfinite(noise_power_mw), "noise power must be positive");
    check(slot_duration > 0.0, "slot_duration must be positive");
    check(static_cast<int>(uav_trajectory.size()) == horizon,
          "uav_trajectory length " + std::to_string(uav_trajectory.size()) + " != horizon_T " +
              std::to_string(horizon));
    check(static_cast<int>(bs_positions.size()) == num_bs,
          "bs_positions length " + std::to_string(bs_positions.size()) + " != num_bs_N " +
              std::to_string(num_bs));
    for (std::size_t i = 0; i < uav_trajectory.size(); ++i)
        check(uav_trajectory[i][2] >= 0.0, "uav_trajectory[" + std::to_string(i) + "] altitude < 0");
    for (std::size_t i = 0; i < bs_positions.size(); ++i)
        check(bs_positions[i][2] >= 0.0, "bs_positions[" + std::to_string(i) + "] altitude < 0");
    check(carrier_freq_ghz > 0.0, "carrier_freq_ghz must be positive");
    check(shadowing_sigma_db >= 0.0, "shadowing_sigma_db must be >= 0");
    check(shadowing_corr_dist_m > 0.0, "shadowing_corr_dist_m must be positive");
    check(kappa_range[0] >= kKappaFloor, "kappa_range low must be >= 1e-2");
    check(kappa_range[1] >= kappa_range[0], "kappa_range high must be >= low");
    return v;
}

void Scenario::validate() const {
    auto v = violations();
    if (!v.empty()) throw ValidationError(std::move(v));
}

double Scenario::distance(int bs, int slot) const {
    const auto& a = uav_trajectory.at(slot - 1);
    const auto& b = bs_positions.at(bs);
    return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

double Scenario::elevation_deg(int bs, int slot) const {
    const auto& a = uav_trajectory.at(slot - 1);
    const auto& b = bs_positions.at(bs);
    const double horiz = std::hypot(a[0] - b[0], a[1] - b[1]);
    return std::atan2(a[2] - b[2], horiz) * 180.0 / std::numbers::pi;
}

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("", "scenario document must be a JSON object");

    Scenario s;
    s.horizon = required<int>(doc, "horizon_T");
    s.num_bs = required<int>(doc, "num_bs_N");
    s.num_rb = required<int>(doc, "num_rb_K");
    s.aoi_bound = required<int>(doc, "aoi_bound_tau");
    s.payload_threshold = required<double>(doc, "payload_threshold_vbar");
    s.power_budget_mw = power_field(doc, "power_budget_pbar");
    s.noise_power_mw = power_field(doc, "noise_power_delta2");
    s.slot_duration = optional<double>(doc, "slot_duration", 1.0);
    s.uav_trajectory = positions(doc, "uav_trajectory");
    s.bs_positions = positions(doc, "bs_positions");
    s.carrier_freq_ghz = optional<double>(doc, "carrier_freq_ghz", 3.0);
    s.shadowing_sigma_db = optional<double>(doc, "shadowing_sigma_db", std::sqrt(8.0));
    s.shadowing_corr_dist_m = optional<double>(doc, "shadowing_corr_dist_m", 5.0);
    auto kr = optional<std::vector<double>>(doc, "kappa_range", {1.0, 30.0});
    if (kr.size() != 2) throw ParseError("kappa_range", "'kappa_range' must be [low, high]");
    s.kappa_range = {kr[0], kr[1]};
    s.kappa_per_slot = optional<bool>(doc, "kappa_per_slot", false);
    const auto los = optional<std::string>(doc, "los_model", "probabilistic");
    if (los == "probabilistic") s.los_model = LosModel::probabilistic;
    else if (los == "los") s.los_model = LosModel::always_los;
    else if (los == "nlos") s.los_model = LosModel::always_nlos;
    else throw ParseError("los_model", "'los_model' must be one of probabilistic, los, nlos");
    s.master_seed = optional<std::int64_t>(doc, "master_seed", 0);

    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string to_json_text(const Scenario& s) {
    auto pos = [](const std::vector<Position>& ps) {
        json arr = json::array();
        for (const auto& p : ps) arr.push_back({p[0], p[1], p[2]});
        return arr;
    };
    json doc = json::object();
    doc["horizon_T"] = s.horizon;
    doc["num_bs_N"] = s.num_bs;
    doc["num_rb_K"] = s.num_rb;
    doc["aoi_bound_tau"] = s.aoi_bound;
    doc["payload_threshold_vbar"] = s.payload_threshold;
    doc["power_budget_pbar_mw"] = s.power_budget_mw;
    doc["noise_power_delta2_mw"] = s.noise_power_mw;
    doc["slot_duration"] = s.slot_duration;
    doc["uav_trajectory"] = pos(s.uav_trajectory);
    doc["bs_positions"] = pos(s.bs_positions);
    doc["carrier_freq_ghz"] = s.carrier_freq_ghz;
    doc["shadowing_sigma_db"] = s.shadowing_sigma_db;
    doc["shadowing_corr_dist_m"] = s.shadowing_corr_dist_m;
    doc["kappa_range"] = {s.kappa_range[0], s.kappa_range[1]};
    doc["kappa_per_slot"] = s.kappa_per_slot;
    doc["los_model"] = los_model_name(s.los_model);
    doc["master_seed"] = s.master_seed;
    return doc.dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot write scenario file '" + path + "'");
    out << to_json_text(scenario);
    if (!out) throw std::ios_base::failure("write failed for '" + path + "'");
}

std::uint64_t scenario_hash(const Scenario& scenario) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_json_text(scenario)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Scenario default_patrol_scenario(std::int64_t seed, const PatrolOptions& o) {
    Scenario s;
    s.horizon = o.horizon;
    s.num_bs = o.num_bs;
    s.num_rb = o.num_rb;
    s.aoi_bound = o.aoi_bound;
    s.payload_threshold = o.payload_threshold;
    s.power_budget_mw = dbm_to_mw(o.power_budget_dbm);
    s.noise_power_mw = dbm_to_mw(o.noise_power_dbm);
    s.slot_duration = 1.0;
    s.carrier_freq_ghz = 3.0;
    s.shadowing_sigma_db = std::sqrt(8.0);
    s.shadowing_corr_dist_m = 5.0;
    s.kappa_range = {1.0, 30.0};
    s.master_seed = seed;

    // Circle centred in the area; constant ground speed, so each slot advances
    // the same arc length.
    const double half = o.area_side_m / 2.0;
    const double radius = 0.4 * o.area_side_m;
    const double step = o.speed_mps * s.slot_duration / radius;
    s.uav_trajectory.reserve(o.horizon);
    for (int t = 0; t < o.horizon; ++t) {
        const double a = step * t;
        s.uav_trajectory.push_back({half + radius * std::cos(a), half + radius * std::sin(a), o.altitude_m});
    }

    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::uniform_real_distribution<double> coord(0.0, o.area_side_m);
    for (int n = 0; n < o.num_bs; ++n) {
        const double x = coord(rng);
        const double y = coord(rng);
        s.bs_positions.push_back({x, y, 0.0});
    }
    s.validate();
    return s;
}

}  // namespace mpcomm
