#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

namespace mpcomm {

struct BenchOptions {
    std::vector<int> num_rb{10, 20, 40, 80, 160};
    int num_bs = 5;
    int interval = 5;        // slots per solved interval
    double rate_per_rb = 1.0;  // target payload per RB
    int repeats = 5;
    std::int64_t seed = 1;
};

struct BenchRow {
    int num_rb = 0;
    int rb_cap = 0;
    double seconds = 0.0;  // median over repeats
};

struct BenchResult {
    std::vector<BenchRow> rows;
    double slope = 0.0;  // least-squares slope of log(seconds) on log(K)
};

/// Times solve_interval on patrol instances of growing K with cap K / N.
BenchResult run_bench(const BenchOptions& options = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// CSV "num_rb,rb_cap,seconds" followed by a "# slope" comment line.
void write_bench_csv(const BenchResult& result, std::ostream& out);

}  // namespace mpcomm
