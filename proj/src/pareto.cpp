#include "mpcomm/pareto.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "mpcomm/format.hpp"

namespace mpcomm {

namespace {

std::optional<SamplingPlan> plan_for(const Scenario& sc, const ChannelProfile& profile, int cap,
                                     const BuildOptions& build) {
    try {
        return shortest_path(build_graph(sc, profile, cap, build));
    } catch (const NoFeasiblePlan&) {
        return std::nullopt;
    }
}

}  // namespace

ParetoFrontier compute_frontier(const Scenario& sc, const ChannelProfile& profile, const FrontierOptions& options) {
    ParetoFrontier f;
    int cap = 1;
    std::optional<SamplingPlan> plan;
    for (; cap <= sc.num_rb; ++cap)
        if ((plan = plan_for(sc, profile, cap, options.build))) break;
    if (!plan) throw NoFeasiblePlan("no feasible plan even with every RB available (cap = K)");

    f.theta_lo = cap;
    f.points.push_back({cap, plan->total_energy, std::move(*plan)});
    for (++cap; cap <= sc.num_rb; ++cap) {
        auto next = plan_for(sc, profile, cap, options.build);
        // Feasible sets are nested, so a larger cap stays feasible.
        if (!next) throw std::logic_error("feasibility lost when the RB cap grew");
        const double prev = f.points.back().energy;
        if (!(next->total_energy < prev * (1.0 - options.equal_rel))) break;
        f.points.push_back({cap, next->total_energy, std::move(*next)});
    }
    f.theta_hi = f.points.back().epsilon;
    return f;
}

std::vector<std::string> audit_frontier(const ParetoFrontier& f) {
    std::vector<std::string> v;
    if (f.points.empty()) {
        v.push_back("frontier is empty");
        return v;
    }
    if (f.points.front().epsilon != f.theta_lo) v.push_back("first point is not theta_lo");
    if (f.points.back().epsilon != f.theta_hi) v.push_back("last point is not theta_hi");
    for (std::size_t i = 1; i < f.points.size(); ++i) {
        const auto& a = f.points[i - 1];
        const auto& b = f.points[i];
        if (b.epsilon != a.epsilon + 1) v.push_back("caps are not consecutive at " + std::to_string(b.epsilon));
        if (!(b.energy < a.energy)) v.push_back("energy does not strictly decrease at " + std::to_string(b.epsilon));
    }
    for (const auto& a : f.points)
        for (const auto& b : f.points)
            if (&a != &b && b.epsilon <= a.epsilon && b.energy <= a.energy &&
                (b.epsilon < a.epsilon || b.energy < a.energy))
                v.push_back("point " + std::to_string(a.epsilon) + " is dominated by " + std::to_string(b.epsilon));
    return v;
}

void require_increasing(const ScalarMap& g, double lo, double hi, const std::string& name, int samples) {
    if (!g) throw MonotonicityError(name + " is empty");
    double prev = g(lo);
    if (!std::isfinite(prev)) throw MonotonicityError(name + " is not finite at " + fmt9(lo));
    if (hi <= lo) return;
    for (int s = 1; s < samples; ++s) {
        const double x = lo + (hi - lo) * s / (samples - 1);
        const double y = g(x);
        if (!std::isfinite(y) || !(y > prev))
            throw MonotonicityError(name + " is not strictly increasing near " + fmt9(x));
        prev = y;
    }
}

std::vector<MappedPoint> transform_frontier(const ParetoFrontier& f, const ScalarMap& g1, const ScalarMap& g2) {
    if (f.points.empty()) return {};
    double emin = std::numeric_limits<double>::infinity(), emax = -emin;
    for (const auto& p : f.points) {
        emin = std::min(emin, p.energy);
        emax = std::max(emax, p.energy);
    }
    require_increasing(g1, f.theta_lo, f.theta_hi, "load map");
    require_increasing(g2, emin, emax, "energy map");
    std::vector<MappedPoint> out;
    for (const auto& p : f.points) out.push_back({p.epsilon, g1(p.epsilon), g2(p.energy)});
    return out;
}

Utility weighted_lp(double alpha, double p, double load_target, double energy_target) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    return [=](double x, double y) {
        return std::pow(alpha * std::pow(std::abs(x - load_target), p) +
                            (1.0 - alpha) * std::pow(std::abs(y - energy_target), p),
                        1.0 / p);
    };
}

std::size_t scalarize_select(const ParetoFrontier& f, const Utility& utility, const ScalarMap& g1,
                             const ScalarMap& g2) {
    if (f.points.empty()) throw std::invalid_argument("cannot select from an empty frontier");
    std::size_t best = 0;
    double best_u = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.points.size(); ++i) {
        const double x = g1 ? g1(f.points[i].epsilon) : f.points[i].epsilon;
        const double y = g2 ? g2(f.points[i].energy) : f.points[i].energy;
        const double u = utility(x, y);
        if (u < best_u) {
            best_u = u;
            best = i;
        }
    }
    return best;
}

std::size_t budget_select(const ParetoFrontier& f, const ScalarMap& g1, double budget) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < f.points.size(); ++i) {
        const double x = g1 ? g1(f.points[i].epsilon) : f.points[i].epsilon;
        if (x <= budget && (!best || f.points[i].energy < f.points[*best].energy)) best = i;
    }
    if (!best) throw BudgetInfeasible("no frontier point fits load budget " + fmt9(budget));
    return *best;
}

void write_frontier_csv(const ParetoFrontier& f, double slot_duration, std::ostream& out) {
    out << "epsilon_theta,energy_linear,energy_dbm,num_samples,instants\n";
    for (const auto& p : f.points) {
        out << p.epsilon << ',' << fmt9(p.energy * slot_duration) << ','
            << fmt9(mw_to_dbm(p.energy / p.plan.horizon)) << ',' << p.plan.instants.size() << ',';
        for (std::size_t i = 0; i < p.plan.instants.size(); ++i) out << (i ? " " : "") << p.plan.instants[i];
        out << '\n';
    }
}

ParetoFrontier read_frontier_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "epsilon_theta,energy_linear,energy_dbm,num_samples,instants")
        throw std::invalid_argument("not a frontier CSV (bad header)");
    ParetoFrontier f;
    for (int row = 2; std::getline(in, line); ++row) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
        if (cols.size() == 4 && !line.empty() && line.back() == ',') cols.push_back("");
        if (cols.size() != 5) throw std::invalid_argument("frontier row " + std::to_string(row) + " needs 5 columns");
        FrontierPoint p;
        try {
            p.epsilon = std::stoi(cols[0]);
            p.energy = std::stod(cols[1]);
        } catch (const std::exception&) {
            throw std::invalid_argument("frontier row " + std::to_string(row) + " has a bad number");
        }
        std::istringstream is(cols[4]);
        for (int t; is >> t;) p.plan.instants.push_back(t);
        f.points.push_back(std::move(p));
    }
    if (f.points.empty()) throw std::invalid_argument("frontier CSV has no rows");
    f.theta_lo = f.points.front().epsilon;
    f.theta_hi = f.points.back().epsilon;
    const auto v = audit_frontier(f);
    if (!v.empty()) throw std::invalid_argument("frontier CSV: " + v.front());
    return f;
}

}  // namespace mpcomm
