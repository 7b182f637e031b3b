// Command-line front end. Exit codes: 0 ok, 2 invalid input, 3 infeasible,
// 4 file I/O.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "mpcomm/bench.hpp"
#include "mpcomm/channel.hpp"
#include "mpcomm/errors.hpp"
#include "mpcomm/format.hpp"
#include "mpcomm/oracle.hpp"
#include "mpcomm/pareto.hpp"
#include "mpcomm/plan_io.hpp"
#include "mpcomm/scenario.hpp"
#include "mpcomm/sim.hpp"
#include "mpcomm/timing.hpp"

namespace {

using namespace mpcomm;

constexpr int kOk = 0, kInvalid = 2, kInfeasible = 3, kIo = 4;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Output sink: a file when a path is given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty()) return;
        file_.open(path, std::ios::binary);
        if (!file_) throw std::ios_base::failure("cannot write '" + path + "'");
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void close() {
        if (!file_.is_open()) return;
        file_.close();
        if (file_.fail()) throw std::ios_base::failure("write failed");
    }

private:
    std::ofstream file_;
};

std::optional<std::int64_t> env_seed() {
    const char* v = std::getenv("MPCOMM_SEED");
    if (!v || !*v) return std::nullopt;
    try {
        std::size_t used = 0;
        const long long s = std::stoll(v, &used);
        if (used != std::string(v).size()) throw std::invalid_argument(v);
        return s;
    } catch (const std::exception&) {
        throw UsageError(std::string("MPCOMM_SEED is not an integer: '") + v + "'");
    }
}

// Scenario, seed and channel profile shared by most commands.
struct Inputs {
    std::string scenario_path;
    std::string profile_path;
    std::optional<std::int64_t> seed;

    void add(CLI::App* cmd) {
        cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
        cmd->add_option("--profile", profile_path, "Channel profile dump (default: rebuilt from the seed)");
        cmd->add_option("--seed", seed, "Seed; overrides the scenario's master_seed (fallback: MPCOMM_SEED)");
    }

    struct Loaded {
        Scenario scenario;
        std::int64_t seed;
        ChannelProfile profile;
    };

    Loaded load() const {
        Scenario sc = load_scenario(scenario_path);
        std::int64_t s = sc.master_seed;
        if (seed) s = *seed;
        else if (auto e = env_seed()) s = *e;
        sc.master_seed = s;
        ChannelProfile prof = profile_path.empty() ? build_profile(sc, s) : load_profile(profile_path);
        if (prof.num_bs() != sc.num_bs || prof.num_rb() != sc.num_rb || prof.horizon() != sc.horizon)
            throw UsageError("channel profile dimensions do not match the scenario");
        return {std::move(sc), s, std::move(prof)};
    }
};

void require_cap(int cap, const Scenario& sc) {
    if (cap < 1 || cap > sc.num_rb)
        throw UsageError("--epsilon-theta must lie in [1, " + std::to_string(sc.num_rb) + "], got " +
                         std::to_string(cap));
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
}

// Named monotone maps: identity, square, sqrt, log1p, exp, scale:a, pow:a,
// affine:a:b.
ScalarMap parse_map(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.empty()) throw UsageError("empty map");
    auto num = [&](std::size_t i) {
        if (i >= parts.size()) throw UsageError("map '" + spec + "' is missing a parameter");
        try {
            return std::stod(parts[i]);
        } catch (const std::exception&) {
            throw UsageError("map '" + spec + "' has a bad parameter");
        }
    };
    const std::string& name = parts[0];
    if (name == "identity") return [](double x) { return x; };
    if (name == "square") return [](double x) { return x * x; };
    if (name == "sqrt") return [](double x) { return std::sqrt(x); };
    if (name == "log1p") return [](double x) { return std::log1p(x); };
    if (name == "exp") return [](double x) { return std::exp(x); };
    if (name == "scale") return [a = num(1)](double x) { return a * x; };
    if (name == "pow") return [a = num(1)](double x) { return std::pow(x, a); };
    if (name == "affine") return [a = num(1), b = num(2)](double x) { return a * x + b; };
    throw UsageError("unknown map '" + spec + "'");
}

ParetoFrontier read_frontier(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open frontier file '" + path + "'");
    try {
        return read_frontier_csv(in);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

void print_plan_summary(std::ostream& out, const SamplingPlan& plan, const Scenario& sc) {
    out << "energy_linear " << fmt9(plan.total_energy * sc.slot_duration) << '\n'
        << "energy_dbm " << fmt9(mw_to_dbm(plan.total_energy / sc.horizon)) << '\n'
        << "binary_energy_linear " << fmt9(plan.binary_energy * sc.slot_duration) << '\n'
        << "instants " << join(plan.instants) << '\n'
        << "max_rb_load " << plan.max_load() << '\n';
}

int run(int argc, char** argv) {
    CLI::App app{"Age-constrained communication planner"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a scenario and its channel profile");
    std::string gen_out, preset = "table1";
    std::optional<std::int64_t> gen_seed;
    PatrolOptions po;
    gen->add_option("--out", gen_out, "Existing output directory")->required();
    gen->add_option("--seed", gen_seed, "Seed (fallback: MPCOMM_SEED)");
    gen->add_option("--preset", preset, "Parameter preset")->check(CLI::IsMember({"table1"}));
    gen->add_option("--horizon", po.horizon, "Slots T");
    gen->add_option("--num-bs", po.num_bs, "Base stations N");
    gen->add_option("--num-rb", po.num_rb, "Resource blocks K");
    gen->add_option("--aoi-bound", po.aoi_bound, "Peak-age bound in slots");
    gen->add_option("--threshold", po.payload_threshold, "Payload threshold per sample");
    gen->add_option("--power-dbm", po.power_budget_dbm, "Per-slot power budget in dBm");

    // plan
    auto* plan = app.add_subcommand("plan", "Plan sampling instants and RB/power allocation");
    Inputs plan_in;
    plan_in.add(plan);
    int plan_cap = 0, jobs = 1;
    double plan_margin = 1.0;
    std::string plan_out, graph_csv;
    plan->add_option("--epsilon-theta", plan_cap, "Per-BS RB cap")->required();
    plan->add_option("--rate-margin", plan_margin, "Multiplier on the payload threshold")->check(CLI::PositiveNumber);
    plan->add_option("--out", plan_out, "Plan file to write");
    plan->add_option("--graph-csv", graph_csv, "Write interval weights as CSV");
    plan->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    // frontier
    auto* front = app.add_subcommand("frontier", "Sweep the RB cap and write the energy frontier");
    Inputs front_in;
    front_in.add(front);
    std::string front_out;
    double front_margin = 1.0;
    front->add_option("--out", front_out, "CSV path (default: stdout)");
    front->add_option("--rate-margin", front_margin, "Multiplier on the payload threshold")->check(CLI::PositiveNumber);
    front->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo evaluation of a plan or baseline");
    Inputs sim_in;
    sim_in.add(sim);
    std::string sim_plan, policy, report_out, trace_out;
    int sim_cap = 0, replicas = 1000;
    double sim_margin = 1.0;
    auto* plan_opt = sim->add_option("--plan", sim_plan, "Plan file");
    sim->add_option("--policy", policy, "age-aware, periodic, instantaneous or average")
        ->check(CLI::IsMember({"age-aware", "periodic", "instantaneous", "average"}))
        ->excludes(plan_opt);
    sim->add_option("--epsilon-theta", sim_cap, "Per-BS RB cap for --policy");
    sim->add_option("--replicas", replicas, "Fading replicas");
    sim->add_option("--rate-margin", sim_margin, "Multiplier on the payload threshold for --policy")
        ->check(CLI::PositiveNumber);
    sim->add_option("--report", report_out, "Report JSON path (default: stdout)");
    sim->add_option("--trace", trace_out, "Per-slot trace CSV path");
    sim->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    // transform
    auto* tr = app.add_subcommand("transform", "Map a frontier through monotone maps");
    std::string tr_in, tr_out, g1_spec = "identity", g2_spec = "identity";
    tr->add_option("--frontier", tr_in, "Frontier CSV")->required();
    tr->add_option("--g1", g1_spec, "Map on the RB cap");
    tr->add_option("--g2", g2_spec, "Map on the energy");
    tr->add_option("--out", tr_out, "CSV path (default: stdout)");

    // select
    auto* sel = app.add_subcommand("select", "Pick one frontier point");
    std::string sel_in;
    std::optional<double> alpha, budget;
    double lp = 2.0, load_target = 0.0, energy_target = 0.0;
    sel->add_option("--frontier", sel_in, "Frontier CSV")->required();
    sel->add_option("--g1", g1_spec, "Map on the RB cap");
    sel->add_option("--g2", g2_spec, "Map on the energy");
    auto* alpha_opt = sel->add_option("--alpha", alpha, "Weight on the load term of the Lp utility");
    sel->add_option("--p", lp, "Exponent of the Lp utility");
    sel->add_option("--load-target", load_target, "Utopia point, load");
    sel->add_option("--energy-target", energy_target, "Utopia point, energy");
    sel->add_option("--budget", budget, "Largest admissible g1(epsilon)")->excludes(alpha_opt);

    // bench
    auto* bench = app.add_subcommand("bench", "Time the interval solver against K");
    BenchOptions bo;
    std::string bench_out;
    bench->add_option("--num-bs", bo.num_bs, "Base stations N")->check(CLI::PositiveNumber);
    bench->add_option("--repeats", bo.repeats, "Timed runs per K (median kept)")->check(CLI::PositiveNumber);
    bench->add_option("--seed", bo.seed, "Instance seed");
    bench->add_option("--out", bench_out, "CSV path (default: stdout)");

    // oracle
    auto* orc = app.add_subcommand("oracle", "Brute-force plan for tiny scenarios");
    Inputs orc_in;
    orc_in.add(orc);
    int orc_cap = 0;
    orc->add_option("--epsilon-theta", orc_cap, "Per-BS RB cap")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    if (*gen) {
        std::int64_t seed = 0;
        if (gen_seed) seed = *gen_seed;
        else if (auto e = env_seed()) seed = *e;
        else throw UsageError("generate needs --seed or MPCOMM_SEED");
        if (!std::filesystem::is_directory(gen_out))
            throw std::ios_base::failure("output directory '" + gen_out + "' does not exist");
        const Scenario sc = default_patrol_scenario(seed, po);
        const auto dir = std::filesystem::path(gen_out);
        save_scenario(sc, (dir / "scenario.json").string());
        save_profile(build_profile(sc, seed), (dir / "profile.bin").string());
        std::cout << "scenario " << (dir / "scenario.json").string() << '\n'
                  << "profile " << (dir / "profile.bin").string() << '\n';
        return kOk;
    }

    if (*plan) {
        auto in = plan_in.load();
        require_cap(plan_cap, in.scenario);
        BuildOptions b;
        b.jobs = jobs;
        b.rate_margin = plan_margin;
        const TimingGraph g = build_graph(in.scenario, in.profile, plan_cap, b);
        if (!graph_csv.empty()) {
            Output o(graph_csv);
            write_graph_csv(g, o.stream());
            o.close();
        }
        PlanFile f{make_header(in.scenario, in.seed, plan_cap, plan_margin), shortest_path(g)};
        if (!plan_out.empty()) save_plan(f, plan_out);
        print_plan_summary(std::cout, f.plan, in.scenario);
        return kOk;
    }

    if (*front) {
        auto in = front_in.load();
        FrontierOptions fo;
        fo.build.jobs = jobs;
        fo.build.rate_margin = front_margin;
        const auto f = compute_frontier(in.scenario, in.profile, fo);
        Output o(front_out);
        write_frontier_csv(f, in.scenario.slot_duration, o.stream());
        o.close();
        return kOk;
    }

    if (*sim) {
        if (replicas < 1) throw UsageError("--replicas must be >= 1");
        if (sim_plan.empty() && policy.empty()) throw UsageError("simulate needs --plan or --policy");
        auto in = sim_in.load();
        SamplingPlan sp;
        if (!sim_plan.empty()) {
            PlanFile f = load_plan(sim_plan, in.profile);
            if (f.header.scenario_hash != scenario_hash(in.scenario))
                throw UsageError("plan was made for a different scenario");
            sp = std::move(f.plan);
        } else {
            require_cap(sim_cap, in.scenario);
            PolicyPlan pp;
            if (policy == "age-aware") {
                BuildOptions b;
                b.jobs = jobs;
                b.rate_margin = sim_margin;
                pp = age_aware_policy(in.scenario, in.profile, sim_cap, b);
            } else if (policy == "periodic") {
                pp = baseline_periodic(in.scenario, in.profile, sim_cap, sim_margin);
            } else if (policy == "instantaneous") {
                pp = baseline_instantaneous(in.scenario, in.profile, sim_cap, sim_margin);
            } else {
                pp = baseline_average(in.scenario, in.profile, sim_cap, sim_margin);
            }
            if (!pp.feasible && pp.plan.intervals.empty())
                throw NoFeasiblePlan("policy '" + policy + "' has no feasible plan");
            if (!pp.feasible) std::cerr << "warning: some " << policy << " targets are unreachable; zero power there\n";
            sp = std::move(pp.plan);
        }
        SimOptions so;
        so.jobs = jobs;
        so.keep_traces = !trace_out.empty();
        const auto rep = simulate(sp, in.scenario, in.profile, replicas, in.seed, so);
        if (!trace_out.empty()) {
            Output o(trace_out);
            write_trace_csv(rep, o.stream());
            o.close();
        }
        Output o(report_out);
        o.stream() << report_json(rep);
        o.close();
        return kOk;
    }

    if (*tr) {
        const auto f = read_frontier(tr_in);
        const auto m = transform_frontier(f, parse_map(g1_spec), parse_map(g2_spec));
        Output o(tr_out);
        o.stream() << "epsilon_theta,load,energy\n";
        for (const auto& p : m) o.stream() << p.epsilon << ',' << fmt9(p.load) << ',' << fmt9(p.energy) << '\n';
        o.close();
        return kOk;
    }

    if (*sel) {
        const auto f = read_frontier(sel_in);
        const ScalarMap g1 = parse_map(g1_spec), g2 = parse_map(g2_spec);
        transform_frontier(f, g1, g2);  // rejects non-monotone maps
        std::size_t i = 0;
        if (budget) {
            i = budget_select(f, g1, *budget);
        } else {
            if (!alpha) throw UsageError("select needs --alpha or --budget");
            i = scalarize_select(f, weighted_lp(*alpha, lp, load_target, energy_target), g1, g2);
        }
        const auto& p = f.points[i];
        std::cout << "epsilon_theta " << p.epsilon << '\n'
                  << "energy_linear " << fmt9(p.energy) << '\n'
                  << "load " << fmt9(g1(p.epsilon)) << '\n'
                  << "mapped_energy " << fmt9(g2(p.energy)) << '\n'
                  << "instants " << join(p.plan.instants) << '\n';
        return kOk;
    }

    if (*bench) {
        const auto r = run_bench(bo);
        Output o(bench_out);
        write_bench_csv(r, o.stream());
        o.close();
        return kOk;
    }

    if (*orc) {
        auto in = orc_in.load();
        require_cap(orc_cap, in.scenario);
        const auto r = oracle_plan(in.scenario, in.profile, orc_cap);
        std::cout << "energy_linear " << fmt9(r.energy * in.scenario.slot_duration) << '\n'
                  << "instants " << join(r.instants) << '\n'
                  << "sequences " << r.sequences << '\n';
        return kOk;
    }
    return kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const NoFeasiblePlan& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const BudgetInfeasible& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kInvalid;
    } catch (const ParseError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kInvalid;
    } catch (const PlanFormatError& e) {
        std::cerr << "invalid plan: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::invalid_argument& e) {
        // Usage errors, monotonicity failures, oracle budget refusals.
        std::cerr << "invalid input: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        // Remaining runtime errors come from unreadable profile dumps.
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    }
}
