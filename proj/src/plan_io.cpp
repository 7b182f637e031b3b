#include "mpcomm/plan_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mpcomm/format.hpp"

namespace mpcomm {

namespace {

constexpr const char* kMagic = "mpcomm-plan 1";

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << v;
    return s.str();
}

// Reads "<key> <values...>" lines while keeping track of the line number.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::istringstream next(const std::string& key) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (line.empty() || line[0] == '#') continue;
            std::istringstream s(line);
            std::string k;
            s >> k;
            if (k != key) fail("expected '" + key + "', found '" + k + "'");
            return s;
        }
        fail("unexpected end of file, expected '" + key + "'");
    }

    std::string peek_key() {
        const auto pos = in_.tellg();
        const int saved = line_no_;
        std::string line;
        while (std::getline(in_, line)) {
            if (line.empty() || line[0] == '#') {
                ++line_no_;
                continue;
            }
            in_.seekg(pos);
            line_no_ = saved;
            std::istringstream s(line);
            std::string k;
            s >> k;
            return k;
        }
        in_.clear();
        in_.seekg(pos);
        line_no_ = saved;
        return "";
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw PlanFormatError("plan line " + std::to_string(line_no_) + ": " + what);
    }

    template <class T>
    T get(std::istringstream& s, const char* what) const {
        T v{};
        if (!(s >> v)) fail(std::string("cannot read ") + what);
        return v;
    }

private:
    std::istream& in_;
    int line_no_ = 0;
};

}  // namespace

PlanHeader make_header(const Scenario& sc, std::int64_t seed, int epsilon_theta, double rate_margin) {
    return {scenario_hash(sc), seed, epsilon_theta, sc.aoi_bound, sc.payload_threshold, sc.power_budget_mw,
            rate_margin};
}

void write_plan(const PlanFile& f, std::ostream& out) {
    const auto& h = f.header;
    const auto& p = f.plan;
    out << kMagic << '\n';
    out << "scenario_hash " << hex64(h.scenario_hash) << '\n';
    out << "seed " << h.seed << '\n';
    out << "epsilon_theta " << h.epsilon_theta << '\n';
    out << "aoi_bound " << h.aoi_bound << '\n';
    out << "payload_threshold " << fmt17(h.payload_threshold) << '\n';
    out << "power_budget_mw " << fmt17(h.power_budget_mw) << '\n';
    out << "rate_margin " << fmt17(h.rate_margin) << '\n';
    const int N = p.intervals.empty() ? 0 : p.intervals.front()->num_bs;
    const int K = p.intervals.empty() ? 0 : p.intervals.front()->num_rb;
    out << "dims " << p.horizon << ' ' << N << ' ' << K << '\n';
    out << "total_energy " << fmt17(p.total_energy) << '\n';
    out << "binary_energy " << fmt17(p.binary_energy) << '\n';
    out << "instants";
    for (int t : p.instants) out << ' ' << t;
    out << '\n';
    for (const auto& s : p.intervals) {
        out << "interval " << s->start << ' ' << s->end << ' ' << fmt17(s->energy) << ' ' << fmt17(s->binary_energy)
            << ' ' << fmt17(s->expected_rate) << ' ' << fmt17(s->mixed_rate) << ' ' << fmt17(s->global_level) << ' '
            << int(s->binary_meets_target) << '\n';
        for (int t = s->start; t < s->end; ++t) {
            const int i = t - s->start;
            out << "slot " << t << ' ' << fmt17(s->slot_levels[i]) << ' ' << fmt17(s->cap_levels[i]) << ' '
                << fmt17(s->mix[i]) << ' ' << fmt17(s->slot_energy[i]) << '\n';
            for (int n = 0; n < s->num_bs; ++n)
                for (int k = 0; k < s->num_rb; ++k)
                    if (s->active(n, k, t)) out << "power " << n << ' ' << k << ' ' << fmt17(s->power_at(n, k, t)) << '\n';
        }
    }
    out << "end\n";
}

void save_plan(const PlanFile& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write plan file '" + path + "'");
    write_plan(f, out);
    if (!out) throw std::ios_base::failure("write failed for '" + path + "'");
}

PlanFile read_plan(std::istream& in, const ChannelProfile& profile) {
    LineReader r(in);
    {
        std::string line;
        if (!std::getline(in, line) || line != kMagic) throw PlanFormatError("not a plan file (bad first line)");
    }
    PlanFile f;
    auto& h = f.header;
    {
        auto s = r.next("scenario_hash");
        std::string hex = r.get<std::string>(s, "scenario hash");
        try {
            h.scenario_hash = std::stoull(hex, nullptr, 16);
        } catch (const std::exception&) {
            r.fail("bad scenario hash");
        }
    }
    {
        auto s = r.next("seed");
        h.seed = r.get<std::int64_t>(s, "seed");
    }
    {
        auto s = r.next("epsilon_theta");
        h.epsilon_theta = r.get<int>(s, "epsilon_theta");
    }
    {
        auto s = r.next("aoi_bound");
        h.aoi_bound = r.get<int>(s, "aoi_bound");
    }
    {
        auto s = r.next("payload_threshold");
        h.payload_threshold = r.get<double>(s, "payload_threshold");
    }
    {
        auto s = r.next("power_budget_mw");
        h.power_budget_mw = r.get<double>(s, "power_budget_mw");
    }
    {
        auto s = r.next("rate_margin");
        h.rate_margin = r.get<double>(s, "rate_margin");
    }
    int T = 0, N = 0, K = 0;
    {
        auto s = r.next("dims");
        T = r.get<int>(s, "horizon");
        N = r.get<int>(s, "N");
        K = r.get<int>(s, "K");
    }
    if (T != profile.horizon() || N != profile.num_bs() || K != profile.num_rb())
        throw PlanFormatError("plan dimensions do not match the channel profile");
    if (h.epsilon_theta < 1 || h.aoi_bound < 1) throw PlanFormatError("plan header caps must be >= 1");
    double total = 0.0, binary = 0.0;
    {
        auto s = r.next("total_energy");
        total = r.get<double>(s, "total_energy");
    }
    {
        auto s = r.next("binary_energy");
        binary = r.get<double>(s, "binary_energy");
    }
    std::vector<int> instants;
    {
        auto s = r.next("instants");
        for (int t; s >> t;) instants.push_back(t);
    }
    std::vector<std::shared_ptr<const InnerSolution>> intervals;
    for (std::size_t m = 0; m < instants.size(); ++m) {
        auto s = r.next("interval");
        InnerSolution sol;
        sol.num_bs = N;
        sol.num_rb = K;
        sol.start = r.get<int>(s, "start");
        sol.end = r.get<int>(s, "end");
        if (sol.start < 1 || sol.end <= sol.start || sol.end > T + 1) r.fail("interval bounds out of range");
        sol.energy = r.get<double>(s, "energy");
        sol.binary_energy = r.get<double>(s, "binary energy");
        sol.expected_rate = r.get<double>(s, "expected rate");
        sol.mixed_rate = r.get<double>(s, "mixed rate");
        sol.global_level = r.get<double>(s, "global level");
        sol.binary_meets_target = r.get<int>(s, "target flag") != 0;
        const std::size_t len = static_cast<std::size_t>(sol.end - sol.start);
        sol.assignment.assign(len * N * K, 0);
        sol.power.assign(len * N * K, 0.0);
        for (int t = sol.start; t < sol.end; ++t) {
            auto ss = r.next("slot");
            if (r.get<int>(ss, "slot index") != t) r.fail("slot out of order");
            sol.slot_levels.push_back(r.get<double>(ss, "level"));
            sol.cap_levels.push_back(r.get<double>(ss, "cap level"));
            sol.mix.push_back(r.get<double>(ss, "mix"));
            sol.slot_energy.push_back(r.get<double>(ss, "slot energy"));
            while (r.peek_key() == "power") {
                auto ps = r.next("power");
                const int n = r.get<int>(ps, "n"), k = r.get<int>(ps, "k");
                if (n < 0 || n >= N || k < 0 || k >= K) r.fail("power entry out of range");
                const double pw = r.get<double>(ps, "power");
                sol.assignment[sol.index(n, k, t)] = 1;
                sol.power[sol.index(n, k, t)] = pw;
            }
        }
        const IntervalSpec spec{sol.start, sol.end, h.epsilon_theta, h.payload_threshold * h.rate_margin,
                                h.power_budget_mw};
        const auto v = check_solution(sol, spec, profile);
        if (!v.empty()) throw PlanFormatError("interval [" + std::to_string(sol.start) + ", " +
                                              std::to_string(sol.end) + "): " + v.front());
        intervals.push_back(std::make_shared<const InnerSolution>(std::move(sol)));
    }
    r.next("end");
    f.plan = make_plan(T, h.epsilon_theta, std::move(instants), std::move(intervals));
    if (std::abs(f.plan.total_energy - total) > 1e-9 * std::max(1.0, total) ||
        std::abs(f.plan.binary_energy - binary) > 1e-9 * std::max(1.0, binary))
        throw PlanFormatError("stored totals do not match the intervals");
    const auto v = check_plan(f.plan, h.aoi_bound);
    if (!v.empty()) throw PlanFormatError(v.front());
    return f;
}

PlanFile load_plan(const std::string& path, const ChannelProfile& profile) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open plan file '" + path + "'");
    return read_plan(in, profile);
}

}  // namespace mpcomm
