#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mpcomm/bench.hpp"

using namespace mpcomm;

TEST_CASE("log-log slope of exact power laws") {
    const std::vector<double> x{10, 20, 40, 80, 160};
    for (double a : {0.5, 1.0, 1.3, 2.0}) {
        std::vector<double> y;
        for (double v : x) y.push_back(3.0 * std::pow(v, a));
        CHECK(loglog_slope(x, y) == doctest::Approx(a).epsilon(1e-12));
    }
    CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("runtimes grow with K and the slope is repeatable") {
    BenchOptions o;
    o.num_rb = {10, 40, 160};
    const auto a = run_bench(o);
    REQUIRE(a.rows.size() == 3);
    for (std::size_t i = 1; i < a.rows.size(); ++i) CHECK(a.rows[i].seconds >= a.rows[i - 1].seconds);
    CHECK(a.rows[2].rb_cap == 32);
    const auto b = run_bench(o);
    MESSAGE("slopes " << a.slope << " and " << b.slope);
    CHECK(std::abs(a.slope - b.slope) <= 0.3);
}

TEST_CASE("bench CSV layout") {
    BenchResult r;
    r.rows = {{10, 2, 0.5}, {20, 4, 1.25}};
    r.slope = 1.3219280948873622;
    std::ostringstream s;
    write_bench_csv(r, s);
    CHECK(s.str() == "num_rb,rb_cap,seconds\n10,2,0.5\n20,4,1.25\n# slope 1.32192809\n");
}
