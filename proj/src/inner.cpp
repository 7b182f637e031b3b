#include "mpcomm/inner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mpcomm {

WaterFill water_fill(double level, double iota) {
    if (level <= iota) return {0.0, 0.0};
    return {level - iota, std::log2(level / iota)};
}

double assignment_weight(double level, double iota) {
    if (level <= iota) return 0.0;
    // (level - iota) - ln2 * level * log2(level / iota)
    return (level - iota) - level * std::log(level / iota);
}

AssignmentProblem slot_problem(const ChannelProfile& profile, int t, double level, int rb_cap) {
    AssignmentProblem p{profile.num_bs(), profile.num_rb(), rb_cap, {}};
    p.weights.resize(static_cast<std::size_t>(p.num_bs) * p.num_rb);
    for (int n = 0; n < p.num_bs; ++n)
        for (int k = 0; k < p.num_rb; ++k)
            p.weights[static_cast<std::size_t>(n) * p.num_rb + k] = assignment_weight(level, profile.iota(n, k, t));
    return p;
}

double slot_power(const ChannelProfile& profile, int t, double level, const BinaryAssignment& a) {
    double sum = 0.0;
    for (int n = 0; n < a.num_bs; ++n)
        for (int k = 0; k < a.num_rb; ++k)
            if (a.selected(n, k)) sum += water_fill(level, profile.iota(n, k, t)).power;
    return sum;
}

double slot_rate(const ChannelProfile& profile, int t, double level, const BinaryAssignment& a) {
    double sum = 0.0;
    for (int n = 0; n < a.num_bs; ++n)
        for (int k = 0; k < a.num_rb; ++k)
            if (a.selected(n, k)) sum += water_fill(level, profile.iota(n, k, t)).rate;
    return sum;
}

LimitAssignments slot_limits(const ChannelProfile& profile, int t, double level, int rb_cap) {
    return limit_assignments(level, [&](double l) { return slot_problem(profile, t, l, rb_cap); });
}

double slot_extended_power(const ChannelProfile& profile, int t, double level, double mix, int rb_cap) {
    const auto lim = slot_limits(profile, t, level, rb_cap);
    return (1.0 - mix) * slot_power(profile, t, level, lim.minus) + mix * slot_power(profile, t, level, lim.plus);
}

double slot_extended_rate(const ChannelProfile& profile, int t, double level, double mix, int rb_cap) {
    const auto lim = slot_limits(profile, t, level, rb_cap);
    return (1.0 - mix) * slot_rate(profile, t, level, lim.minus) + mix * slot_rate(profile, t, level, lim.plus);
}

namespace {

double min_iota(const ChannelProfile& profile, int t) {
    double m = std::numeric_limits<double>::infinity();
    for (int n = 0; n < profile.num_bs(); ++n)
        for (int k = 0; k < profile.num_rb(); ++k) m = std::min(m, profile.iota(n, k, t));
    return m;
}

double max_iota(const ChannelProfile& profile, int t) {
    double m = 0.0;
    for (int n = 0; n < profile.num_bs(); ++n)
        for (int k = 0; k < profile.num_rb(); ++k) m = std::max(m, profile.iota(n, k, t));
    return m;
}

// Both one-sided limits of power and rate at a level.
struct SlotEval {
    LimitAssignments lim;
    double power_minus, power_plus;
    double rate_minus, rate_plus;
};

SlotEval eval_slot(const ChannelProfile& profile, int t, double level, int rb_cap) {
    SlotEval e{slot_limits(profile, t, level, rb_cap), 0, 0, 0, 0};
    e.power_minus = slot_power(profile, t, level, e.lim.minus);
    e.power_plus = slot_power(profile, t, level, e.lim.plus);
    e.rate_minus = slot_rate(profile, t, level, e.lim.minus);
    e.rate_plus = slot_rate(profile, t, level, e.lim.plus);
    return e;
}

// Water level that spends exactly `budget` over the given floors.
double capped_level(std::vector<double> floors, double budget) {
    if (floors.empty()) return 0.0;
    std::sort(floors.begin(), floors.end());
    double prefix = 0.0;
    for (std::size_t m = 1; m <= floors.size(); ++m) {
        prefix += floors[m - 1];
        const double level = (budget + prefix) / static_cast<double>(m);
        if (m == floors.size() || level <= floors[m]) return level;
    }
    return 0.0;
}

}  // namespace

SlotCap solve_slot_cap(const ChannelProfile& profile, int t, int rb_cap, double power_cap) {
    if (!(power_cap > 0.0)) throw std::invalid_argument("power cap must be positive");
    const double tol_p = 1e-9 * power_cap;
    double lo = min_iota(profile, t);
    double hi = max_iota(profile, t) + power_cap;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const SlotEval e = eval_slot(profile, t, mid, rb_cap);
        if (e.power_minus > power_cap + tol_p) {
            hi = mid;
        } else if (e.power_plus < power_cap - tol_p) {
            lo = mid;
        } else {
            SlotCap cap;
            cap.level = mid;
            const double gap = e.power_plus - e.power_minus;
            cap.mix = gap > tol_p ? std::clamp((power_cap - e.power_minus) / gap, 0.0, 1.0) : 1.0;
            cap.rate = (1.0 - cap.mix) * e.rate_minus + cap.mix * e.rate_plus;
            cap.power = (1.0 - cap.mix) * e.power_minus + cap.mix * e.power_plus;
            return cap;
        }
        if (hi - lo <= 1e-15 * hi) break;
    }
    // Bracket collapsed without meeting the tolerance: take the upper end.
    const SlotEval e = eval_slot(profile, t, hi, rb_cap);
    return {hi, 0.0, e.rate_minus, e.power_minus};
}

bool fill_fixed_assignment(const ChannelProfile& profile, int start, const std::vector<BinaryAssignment>& selection,
                           double power_cap, double target, std::vector<double>& levels) {
    const std::size_t slots = selection.size();
    std::vector<std::vector<double>> floors(slots);
    std::vector<double> caps(slots, 0.0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < slots; ++i) {
        const int t = start + static_cast<int>(i);
        const auto& a = selection[i];
        for (int n = 0; n < a.num_bs; ++n)
            for (int k = 0; k < a.num_rb; ++k)
                if (a.selected(n, k)) floors[i].push_back(profile.iota(n, k, t));
        caps[i] = capped_level(floors[i], power_cap);
        for (double f : floors[i]) lo = std::min(lo, f);
        hi = std::max(hi, caps[i]);
    }
    auto rate_at = [&](double level) {
        double r = 0.0;
        for (std::size_t i = 0; i < slots; ++i) {
            const double l = std::min(level, caps[i]);
            for (double f : floors[i]) r += water_fill(l, f).rate;
        }
        return r;
    };
    levels = caps;
    if (target <= 0.0) {
        std::fill(levels.begin(), levels.end(), 0.0);
        return true;
    }
    if (!std::isfinite(lo) || rate_at(hi) < target) return false;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (rate_at(mid) >= target) hi = mid;
        else lo = mid;
    }
    for (std::size_t i = 0; i < slots; ++i) levels[i] = std::min(hi, caps[i]);
    return true;
}

double InnerSolution::slot_power_sum(int t) const {
    double s = 0.0;
    for (int n = 0; n < num_bs; ++n)
        for (int k = 0; k < num_rb; ++k) s += power_at(n, k, t);
    return s;
}

int InnerSolution::slot_load(int t) const {
    int worst = 0;
    for (int n = 0; n < num_bs; ++n) {
        int c = 0;
        for (int k = 0; k < num_rb; ++k) c += active(n, k, t);
        worst = std::max(worst, c);
    }
    return worst;
}

int InnerSolution::max_load() const {
    int worst = 0;
    for (int t = start; t < end; ++t) worst = std::max(worst, slot_load(t));
    return worst;
}

namespace {

InnerSolution empty_solution(const IntervalSpec& spec, const ChannelProfile& profile) {
    InnerSolution s;
    s.start = spec.start;
    s.end = spec.end;
    s.num_bs = profile.num_bs();
    s.num_rb = profile.num_rb();
    const std::size_t size = static_cast<std::size_t>(spec.length()) * s.num_bs * s.num_rb;
    s.assignment.assign(size, 0);
    s.power.assign(size, 0.0);
    s.slot_levels.assign(spec.length(), 0.0);
    s.cap_levels.assign(spec.length(), 0.0);
    s.mix.assign(spec.length(), 0.0);
    s.slot_energy.assign(spec.length(), 0.0);
    return s;
}

// Writes a binary plan (assignment + levels) into the dense tensors. RBs whose
// floor sits at or above their slot level carry no power and are dropped.
void write_binary_plan(InnerSolution& s, const ChannelProfile& profile, const std::vector<BinaryAssignment>& sel,
                       const std::vector<double>& levels) {
    s.binary_energy = 0.0;
    s.expected_rate = 0.0;
    for (int t = s.start; t < s.end; ++t) {
        const int i = t - s.start;
        s.slot_levels[i] = levels[i];
        for (int n = 0; n < s.num_bs; ++n) {
            for (int k = 0; k < s.num_rb; ++k) {
                const std::size_t idx = s.index(n, k, t);
                s.assignment[idx] = 0;
                s.power[idx] = 0.0;
                if (!sel[i].selected(n, k)) continue;
                const WaterFill wf = water_fill(levels[i], profile.iota(n, k, t));
                if (wf.power <= 0.0) continue;
                s.assignment[idx] = 1;
                s.power[idx] = wf.power;
                s.binary_energy += wf.power;
                s.expected_rate += wf.rate;
            }
        }
    }
}

}  // namespace

IntervalResult solve_interval(const IntervalSpec& spec, const ChannelProfile& profile, const InnerOptions& opt) {
    if (spec.start < 1 || spec.end <= spec.start || spec.end > profile.horizon() + 1)
        throw std::invalid_argument("interval must satisfy 1 <= start < end <= T+1");
    if (spec.rb_cap < 1) throw std::invalid_argument("RB cap must be >= 1");
    if (!(spec.power_cap > 0.0)) throw std::invalid_argument("power cap must be positive");
    if (!(spec.rate_target >= 0.0)) throw std::invalid_argument("rate target must be >= 0");

    const int len = spec.length();
    InnerSolution sol = empty_solution(spec, profile);

    // Step 1: per-slot caps.
    std::vector<SlotCap> caps(len);
    double max_rate = 0.0;
    for (int i = 0; i < len; ++i) {
        caps[i] = solve_slot_cap(profile, spec.start + i, spec.rb_cap, spec.power_cap);
        sol.cap_levels[i] = caps[i].level;
        max_rate += caps[i].rate;
    }
    if (spec.rate_target <= 0.0) return {std::move(sol), max_rate};
    if (max_rate < spec.rate_target) return {std::nullopt, max_rate};

    // Step 2: bisection on the shared water level. A slot whose cap lies at or
    // below the level is frozen at its cap.
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int i = 0; i < len; ++i) {
        lo = std::min(lo, min_iota(profile, spec.start + i));
        hi = std::max(hi, caps[i].level);
    }
    const double target = spec.rate_target;
    struct LevelEval {
        std::vector<SlotEval> slots;  // only meaningful for uncapped slots
        std::vector<bool> capped;
        double rate_minus = 0.0, rate_plus = 0.0;
    };
    auto evaluate = [&](double level) {
        LevelEval ev;
        ev.slots.resize(len);
        ev.capped.assign(len, false);
        for (int i = 0; i < len; ++i) {
            if (level >= caps[i].level) {
                ev.capped[i] = true;
                ev.rate_minus += caps[i].rate;
                ev.rate_plus += caps[i].rate;
            } else {
                ev.slots[i] = eval_slot(profile, spec.start + i, level, spec.rb_cap);
                ev.rate_minus += ev.slots[i].rate_minus;
                ev.rate_plus += ev.slots[i].rate_plus;
            }
        }
        return ev;
    };

    double level = hi;
    bool bracketed = false;
    for (int it = 0; it < opt.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const LevelEval ev = evaluate(mid);
        if (ev.rate_plus < target) {
            lo = mid;
        } else if (ev.rate_minus > target) {
            hi = mid;
        } else {
            level = mid;
            bracketed = true;
            break;
        }
        if (hi - lo <= 1e-15 * hi) {
            level = hi;
            bracketed = true;
            break;
        }
    }
    if (!bracketed) throw std::runtime_error("water-level bisection did not bracket the rate target");

    // Step 3: mixing weight for the slots sitting at a critical point.
    const LevelEval ev = evaluate(level);
    double capped_rate = 0.0, free_minus = 0.0, free_plus = 0.0;
    for (int i = 0; i < len; ++i) {
        if (ev.capped[i]) capped_rate += caps[i].rate;
        else {
            free_minus += ev.slots[i].rate_minus;
            free_plus += ev.slots[i].rate_plus;
        }
    }
    auto mixed_rate = [&](double xi) { return capped_rate + (1.0 - xi) * free_minus + xi * free_plus; };
    double xi = 0.0;
    if (mixed_rate(0.0) < target) {
        const double tol_r = opt.rate_tol_rel * target;
        double xlo = 0.0, xhi = 1.0;
        for (int it = 0; it < opt.max_iterations; ++it) {
            const double xm = 0.5 * (xlo + xhi);
            if (mixed_rate(xm) >= target) xhi = xm;
            else xlo = xm;
            if (mixed_rate(xhi) - target <= tol_r && xhi - xlo < 1e-12) break;
        }
        xi = xhi;
    }

    sol.global_level = level * std::numbers::ln2;
    sol.energy = 0.0;
    for (int i = 0; i < len; ++i) {
        if (ev.capped[i]) {
            sol.mix[i] = caps[i].mix;
            sol.slot_energy[i] = caps[i].power;
        } else {
            sol.mix[i] = xi;
            sol.slot_energy[i] = (1.0 - xi) * ev.slots[i].power_minus + xi * ev.slots[i].power_plus;
        }
        sol.energy += sol.slot_energy[i];
    }
    sol.mixed_rate = mixed_rate(xi);

    // Binary export: choose left or right limits (separately for free and
    // capped slots), re-fill the chosen RBs, keep the cheapest that meets the
    // target; fall back to the highest-rate choice otherwise.
    std::vector<LimitAssignments> cap_lims(len);
    for (int i = 0; i < len; ++i)
        if (ev.capped[i]) cap_lims[i] = slot_limits(profile, spec.start + i, caps[i].level, spec.rb_cap);

    bool have_feasible = false;
    double best_energy = std::numeric_limits<double>::infinity();
    double best_rate = -1.0;
    std::vector<BinaryAssignment> best_sel;
    std::vector<double> best_levels;
    for (int free_side = 1; free_side >= 0; --free_side) {
        for (int cap_side = 1; cap_side >= 0; --cap_side) {
            std::vector<BinaryAssignment> sel(len);
            for (int i = 0; i < len; ++i) {
                const LimitAssignments& l = ev.capped[i] ? cap_lims[i] : ev.slots[i].lim;
                const int side = ev.capped[i] ? cap_side : free_side;
                sel[i] = side ? l.plus : l.minus;
            }
            std::vector<double> levels;
            const bool ok = fill_fixed_assignment(profile, spec.start, sel, spec.power_cap, target, levels);
            double energy = 0.0, rate = 0.0;
            for (int i = 0; i < len; ++i) {
                energy += slot_power(profile, spec.start + i, levels[i], sel[i]);
                rate += slot_rate(profile, spec.start + i, levels[i], sel[i]);
            }
            const bool better = ok ? (!have_feasible || energy < best_energy)
                                   : (!have_feasible && rate > best_rate);
            if (better) {
                have_feasible = have_feasible || ok;
                best_energy = energy;
                best_rate = rate;
                best_sel = std::move(sel);
                best_levels = std::move(levels);
            }
        }
    }
    write_binary_plan(sol, profile, best_sel, best_levels);
    sol.binary_meets_target = have_feasible;
    return {std::move(sol), max_rate};
}

std::vector<std::string> check_solution(const InnerSolution& s, const IntervalSpec& spec,
                                        const ChannelProfile& profile) {
    std::vector<std::string> v;
    const std::size_t size = static_cast<std::size_t>(s.end - s.start) * s.num_bs * s.num_rb;
    if (s.start != spec.start || s.end != spec.end) v.push_back("interval bounds do not match the spec");
    if (s.num_bs != profile.num_bs() || s.num_rb != profile.num_rb()) v.push_back("dimension mismatch");
    if (s.assignment.size() != size || s.power.size() != size ||
        s.slot_levels.size() != static_cast<std::size_t>(s.end - s.start)) {
        v.push_back("tensor sizes do not match the interval");
        return v;
    }
    double energy = 0.0, rate = 0.0;
    for (int t = s.start; t < s.end; ++t) {
        const double level = s.slot_levels[t - s.start];
        double slot_sum = 0.0;
        for (int n = 0; n < s.num_bs; ++n) {
            int load = 0;
            for (int k = 0; k < s.num_rb; ++k) {
                const double p = s.power_at(n, k, t);
                if (s.assignment[s.index(n, k, t)] > 1) v.push_back("assignment entry is not binary");
                if (p < 0.0) v.push_back("negative power");
                if (!s.active(n, k, t)) {
                    if (p > 0.0) v.push_back("power on an unassigned RB");
                    continue;
                }
                ++load;
                const WaterFill wf = water_fill(level, profile.iota(n, k, t));
                if (std::abs(p - wf.power) > 1e-9 * std::max(1.0, level))
                    v.push_back("active power differs from the water-filling level");
                slot_sum += p;
                rate += capacity_lower_bound(p, profile.gain(n, k, t), profile.shape(n, k, t),
                                             profile.noise_power_mw());
            }
            if (load > spec.rb_cap) v.push_back("BS RB cap exceeded in slot " + std::to_string(t));
        }
        for (int k = 0; k < s.num_rb; ++k) {
            int users = 0;
            for (int n = 0; n < s.num_bs; ++n) users += s.active(n, k, t);
            if (users > 1) v.push_back("RB shared by several BSs in slot " + std::to_string(t));
        }
        if (slot_sum > spec.power_cap * (1.0 + 1e-9)) v.push_back("power cap exceeded in slot " + std::to_string(t));
        energy += slot_sum;
    }
    if (std::abs(energy - s.binary_energy) > 1e-9 * std::max(1.0, energy)) v.push_back("binary energy mismatch");
    if (std::abs(rate - s.expected_rate) > 1e-9 * std::max(1.0, rate)) v.push_back("expected rate mismatch");
    if (s.binary_meets_target && rate < spec.rate_target * (1.0 - 1e-9)) v.push_back("rate target not met");
    return v;
}

}  // namespace mpcomm
