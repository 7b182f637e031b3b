#include "mpcomm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mpcomm/channel.hpp"
#include "mpcomm/format.hpp"
#include "mpcomm/inner.hpp"
#include "mpcomm/scenario.hpp"

namespace mpcomm {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs two or more points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= double(x.size());
    my /= double(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

BenchResult run_bench(const BenchOptions& o) {
    BenchResult r;
    std::vector<double> ks, secs;
    for (int K : o.num_rb) {
        PatrolOptions po;
        po.horizon = o.interval;
        po.num_bs = o.num_bs;
        po.num_rb = K;
        po.aoi_bound = o.interval;
        po.payload_threshold = o.rate_per_rb * K;
        const Scenario sc = default_patrol_scenario(o.seed, po);
        const ChannelProfile prof = build_profile(sc, o.seed);
        const int cap = std::max(1, K / o.num_bs);
        const IntervalSpec spec{1, o.interval + 1, cap, sc.payload_threshold, sc.power_budget_mw};
        std::vector<double> times;
        for (int rep = 0; rep < std::max(1, o.repeats); ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto res = solve_interval(spec, prof);
            const auto t1 = std::chrono::steady_clock::now();
            if (!res.feasible()) throw std::runtime_error("bench instance with K=" + std::to_string(K) + " is infeasible");
            times.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        std::sort(times.begin(), times.end());
        const double med = times[times.size() / 2];
        r.rows.push_back({K, cap, med});
        ks.push_back(K);
        secs.push_back(med);
    }
    if (ks.size() >= 2) r.slope = loglog_slope(ks, secs);
    return r;
}

void write_bench_csv(const BenchResult& r, std::ostream& out) {
    out << "num_rb,rb_cap,seconds\n";
    for (const auto& row : r.rows) out << row.num_rb << ',' << row.rb_cap << ',' << fmt9(row.seconds) << '\n';
    out << "# slope " << fmt9(r.slope) << '\n';
}

}  // namespace mpcomm
