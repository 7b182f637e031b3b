#include <doctest.h>

#include <cstdio>
#include <random>
#include <sstream>

#include "mpcomm/plan_io.hpp"
#include "mpcomm/sim.hpp"
#include "support.hpp"

using namespace mpcomm;
using testsupport::desk_scenario;
using testsupport::random_profile;

namespace {

struct Fixture {
    Scenario sc = desk_scenario(2, 3, 8, 3, 4.0, 12.0);
    ChannelProfile prof;
    PlanFile file;
    std::string text;

    Fixture() : prof(make_profile()) {
        file.header = make_header(sc, 42, 2);
        auto pol = age_aware_policy(sc, prof, 2);
        REQUIRE(pol.feasible);
        file.plan = std::move(pol.plan);
        std::ostringstream s;
        write_plan(file, s);
        text = s.str();
    }

    static ChannelProfile make_profile() {
        std::mt19937_64 rng(8);
        return random_profile(rng, 2, 3, 8, 0.2, 5.0);
    }

    PlanFile parse(const std::string& t) const {
        std::istringstream in(t);
        return read_plan(in, prof);
    }
};

std::string replace_line(const std::string& text, const std::string& prefix, const std::string& line) {
    std::istringstream in(text);
    std::ostringstream out;
    bool done = false;
    for (std::string l; std::getline(in, l);) {
        if (!done && l.rfind(prefix, 0) == 0) {
            out << line << '\n';
            done = true;
        } else {
            out << l << '\n';
        }
    }
    REQUIRE(done);
    return out.str();
}

}  // namespace

TEST_CASE("plan text round-trips exactly") {
    Fixture f;
    const auto back = f.parse(f.text);
    CHECK(back.header.scenario_hash == scenario_hash(f.sc));
    CHECK(back.header.seed == 42);
    CHECK(back.plan.instants == f.file.plan.instants);
    CHECK(back.plan.total_energy == f.file.plan.total_energy);
    CHECK(back.plan.binary_energy == f.file.plan.binary_energy);
    for (std::size_t m = 0; m < back.plan.intervals.size(); ++m) {
        CHECK(back.plan.intervals[m]->power == f.file.plan.intervals[m]->power);
        CHECK(back.plan.intervals[m]->assignment == f.file.plan.intervals[m]->assignment);
    }
    std::ostringstream again;
    write_plan(back, again);
    CHECK(again.str() == f.text);
}

TEST_CASE("plan file save and load") {
    Fixture f;
    const std::string path = "test_plan_io.plan";
    save_plan(f.file, path);
    CHECK(load_plan(path, f.prof).plan.instants == f.file.plan.instants);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_plan("does/not/exist.plan", f.prof), std::ios_base::failure);
}

TEST_CASE("corrupted plans are rejected") {
    Fixture f;
    CHECK_THROWS_AS(f.parse("something else\n" + f.text), PlanFormatError);
    CHECK_THROWS_AS(f.parse(f.text.substr(0, f.text.size() / 2)), PlanFormatError);
    CHECK_THROWS_AS(f.parse(replace_line(f.text, "total_energy", "total_energy 1e9")), PlanFormatError);
    CHECK_THROWS_AS(f.parse(replace_line(f.text, "dims", "dims 9 2 3")), PlanFormatError);
    CHECK_THROWS_AS(f.parse(replace_line(f.text, "power ", "power 0 0 1e6")), PlanFormatError);
    CHECK_THROWS_AS(f.parse(replace_line(f.text, "epsilon_theta", "epsilon_theta 0")), PlanFormatError);
    // Tighter AoI bound than the stored intervals allow.
    CHECK_THROWS_AS(f.parse(replace_line(f.text, "aoi_bound", "aoi_bound 1")), PlanFormatError);
}

TEST_CASE("plan for another profile is rejected") {
    Fixture f;
    std::mt19937_64 rng(99);
    const auto other = random_profile(rng, 2, 3, 9);
    std::istringstream in(f.text);
    CHECK_THROWS_AS(read_plan(in, other), PlanFormatError);
}
