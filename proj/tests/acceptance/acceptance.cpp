// Acceptance suite: one pass/fail line per criterion, nonzero exit if any fail.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "m3sim/accuracy.hpp"
#include "m3sim/config.hpp"
#include "m3sim/error.hpp"
#include "m3sim/experiment.hpp"
#include "m3sim/meta_model.hpp"
#include "m3sim/migration.hpp"
#include "m3sim/multi_model.hpp"
#include "m3sim/rng.hpp"
#include "m3sim/simulation.hpp"
#include "m3sim/synth.hpp"
#include "test_support.hpp"

using namespace m3sim;
namespace mt = m3sim::testing;
namespace fs = std::filesystem;

namespace {

/// Collects failed checks with a short reason; the first few are reported.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        ++checks_;
        if (!ok) failures_.push_back(what);
    }
    void note(const std::string& text) { notes_ += (notes_.empty() ? "" : "; ") + text; }

    bool ok() const { return failures_.empty(); }
    std::string summary() const {
        std::ostringstream out;
        out << checks_ << " checks";
        if (!notes_.empty()) out << "; " << notes_;
        for (std::size_t i = 0; i < failures_.size() && i < 3; ++i) out << "\n       failed: " << failures_[i];
        if (failures_.size() > 3) out << "\n       ... " << failures_.size() - 3 << " more";
        return out.str();
    }

private:
    std::size_t checks_ = 0;
    std::vector<std::string> failures_;
    std::string notes_;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream out;
    out.precision(precision);
    out << v;
    return out.str();
}

// ---- 1 ---------------------------------------------------------------------

void power_oracles(Check& c) {
    // Evaluated independently at 40 significant digits, then rounded to double.
    const std::vector<std::pair<std::string, std::array<double, 5>>> table = {
        {"M1", {32.0, 106.0, 136.65180361560903, 160.17175976009692, 180.0}},
        {"M3", {32.0, 69.0, 106.0, 143.0, 180.0}},
        {"M5", {32.0, 41.25, 69.0, 115.25, 180.0}},
        {"M7", {32.0, 34.3125, 50.5, 94.4375, 180.0}},
        {"M9", {32.0, 105.99985885620117, 179.85546875, 245.66559982299805, 180.0}},
        {"M10", {32.0, 49.918487039115271, 88.895313412476195, 132.99464230980204, 180.0}},
        {"M12", {32.0, 92.339732570476211, 129.02320539002042, 155.42571010183149, 177.36012449230332}},
        {"M13", {32.0, 69.356027541002441, 101.90732839785566, 130.87820066087461, 157.18097757565297}},
        {"M15", {32.0, 36.911767804387033, 66.466193365167163, 119.08427009583108, 177.36012449230332}},
        {"M16", {32.0, 34.504117673285141, 51.370003428570698, 92.170165460563294, 157.18097757565297}},
        {"M18", {32.0, 33.762307204465298, 45.961730573696825, 77.953352508993833, 136.28246397130886}},
    };
    const std::array<double, 5> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    std::set<PowerKind> kinds;
    for (const auto& [id, expected] : table) {
        const auto& spec = builtin_archive().at(id).spec;
        kinds.insert(spec.kind());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double got = spec.power(grid[i]);
            c.expect(mt::close_rel(got, expected[i], 1e-9),
                     id + " u=" + fmt(grid[i]) + " got " + fmt(got, 17) + " want " + fmt(expected[i], 17));
        }
        c.expect(spec.power(0.0) == 32.0, id + " power(0) != 32");
        if (spec.kind() != PowerKind::Asymptotic && spec.kind() != PowerKind::AsymptoticDvfs)
            c.expect(spec.power(1.0) == 180.0, id + " power(1) != 180");
    }
    c.expect(kinds.size() == 7, "table does not cover all seven formulas");
}

// ---- 2 ---------------------------------------------------------------------

void dominance(Check& c) {
    const auto s = PowerModelSpec::make(PowerKind::Sqrt, 32, 180);
    const auto l = PowerModelSpec::make(PowerKind::Linear, 32, 180);
    const auto q = PowerModelSpec::make(PowerKind::Square, 32, 180);
    const auto k = PowerModelSpec::make(PowerKind::Cubic, 32, 180);
    std::size_t violations = 0;
    for (int i = 0; i <= 10000; ++i) {
        const double u = i / 10000.0;
        violations += !(s.power(u) >= l.power(u) && l.power(u) >= q.power(u) && q.power(u) >= k.power(u));
    }
    c.expect(violations == 0, std::to_string(violations) + " grid points break the chain");

    // Constant mid-utilization workload over a week on the eight E2 models.
    std::vector<Task> tasks;
    for (std::uint64_t h = 0; h < 8; ++h) tasks.push_back(mt::single_task(h, 0, 16, {{7 * 86400, 0.5}}));
    SimScenario scenario{mt::hosts(8, 32), WorkloadTrace(tasks), 30, experiment2_models(),
                         std::nullopt, std::nullopt, 1};
    const auto r = run_scenario(scenario);
    double sqrt_total = 0.0, others = 0.0;
    for (const auto& m : r.per_model) {
        const double total = m.energy.values.back();
        if (m.model_id == "M1") sqrt_total = total;
        else others += total / 7.0;
    }
    const double excess = sqrt_total / others - 1.0;
    c.note("sqrt exceeds the mean of the other seven by " + fmt(100 * excess, 3) + " %");
    c.expect(r.per_model.size() == 8, "expected eight models");
    c.expect(excess >= 0.25, "excess below 25 %");
}

// ---- 3 ---------------------------------------------------------------------

void windowing(Check& c) {
    Rng rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(1, 3000));
        const auto m = static_cast<std::size_t>(rng.uniform_int(1, 400));
        TimeSeries s{rng.uniform_int(0, 1 << 20), rng.uniform_int(1, 60), {}, Unit::Watt};
        s.values.resize(n);
        for (double& v : s.values) v = rng.uniform(0, 1000);
        const auto w = window(s, {m});
        c.expect(w.size() == (n + m - 1) / m, "length law n=" + std::to_string(n) + " m=" + std::to_string(m));
    }
    for (int trial = 0; trial < 100; ++trial) {
        TimeSeries s{0, 30, {}, Unit::Watt};
        s.values.resize(static_cast<std::size_t>(rng.uniform_int(1, 500)));
        for (double& v : s.values) v = rng.uniform(-100, 100);
        c.expect(window(s, {1}) == s, "m=1 is not the identity");
    }
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = static_cast<std::size_t>(rng.uniform_int(1, 50));
        TimeSeries s{0, 30, {}, Unit::Watt};
        s.values.resize(m * static_cast<std::size_t>(rng.uniform_int(1, 100)));
        for (double& v : s.values) v = rng.uniform(1, 1000);
        const auto w = window(s, {m});
        const auto mean = [](const std::vector<double>& v) {
            return static_cast<double>(std::accumulate(v.begin(), v.end(), 0.0L) / static_cast<long double>(v.size()));
        };
        c.expect(mt::close_rel(mean(w.values), mean(s.values), 1e-12), "mean not preserved m=" + std::to_string(m));
    }
}

// ---- 4 ---------------------------------------------------------------------

void meta_error_reduction(Check& c) {
    const auto truth = diurnal_power_curve(20160, 300, 5000.0, 1500.0);
    const std::vector<double> biases{0.40, 0.05, -0.05, 0.05, -0.05, 0.05, -0.05, -0.08};
    Rng rng(42);
    std::vector<MemberSeries> members;
    for (std::size_t j = 0; j < biases.size(); ++j) {
        TimeSeries s = truth;
        for (double& v : s.values) v = v * (1 + biases[j]) + rng.normal(0, 0.01 * v);
        members.push_back({std::to_string(j), s});
    }
    const auto mm = assemble(members, Metric::Power, {1});
    const auto meta = build_meta_model(mm, {MetaAgg::Median, std::nullopt});
    double mean_member = 0.0;
    for (const auto& m : mm.members) mean_member += mape(truth, m.series) / static_cast<double>(mm.size());
    const double meta_mape = mape(truth, meta.series);
    c.note("mean member MAPE " + fmt(mean_member) + " %, median meta MAPE " + fmt(meta_mape) + " %");
    c.expect(meta_mape <= 0.6 * mean_member, "meta MAPE above 0.6x the mean member MAPE");
}

// ---- 5 ---------------------------------------------------------------------

void energy_co2(Check& c) {
    const auto one_hour = mt::scenario(mt::hosts(1, 1), {mt::single_task(0, 0, 1, {{3600, 1.0}})}, 60,
                                       {{"lin", mt::linear_model()}});
    const auto r = run_scenario(one_hour);
    c.expect(r.per_model[0].energy.values.back() == 180.0,
             "180 W for 1 h gave " + fmt(r.per_model[0].energy.values.back(), 17) + " Wh");

    const CarbonTrace halves{"NL", TimeSeries{0, 1800, {100, 300}, Unit::GramCo2PerKwh}};
    const auto co2 = integrate_co2(r.per_model[0].energy, halves);
    c.expect(co2.values.back() == 36.0, "piecewise intensity gave " + fmt(co2.values.back(), 17) + " g");

    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        WorkloadGenSpec g;
        g.tasks = static_cast<std::size_t>(rng.uniform_int(1, 60));
        g.horizon = 86400;
        g.seed = static_cast<std::uint64_t>(trial) + 1;
        g.max_cores = 2;
        auto s = SimScenario{mt::hosts(static_cast<std::size_t>(rng.uniform_int(1, 4)), 4), generate_workload(g),
                             rng.uniform_int(10, 600), experiment2_models(), std::nullopt,
                             FailureSpec{rng.uniform(0, 0.05), 1800, {}}, static_cast<std::uint64_t>(trial)};
        CarbonGenSpec cg;
        cg.samples = 96 * 30;
        cg.seed = static_cast<std::uint64_t>(trial);
        s.carbon = generate_carbon(cg);
        const auto out = run_scenario(s);
        for (const auto& m : out.per_model) {
            const auto monotone = [](const std::vector<double>& v) {
                return std::is_sorted(v.begin(), v.end());
            };
            c.expect(monotone(m.energy.values), "energy not monotone in scenario " + std::to_string(trial));
            c.expect(m.co2 && monotone(m.co2->values), "co2 not monotone in scenario " + std::to_string(trial));
        }
    }
}

// ---- 6 ---------------------------------------------------------------------

double failure_delta(const std::vector<Task>& tasks, Check& c, const std::string& label) {
    SimScenario base{mt::hosts(4, 4), WorkloadTrace(tasks), 60, {{"M3", builtin_archive().at("M3").spec}},
                     mt::constant_carbon("NL", 300, 0, 900, 96 * 14), std::nullopt, 7};
    auto with = base;
    // Same schedule for both workloads: three hosts fail mid-hour during the first day.
    with.failures = FailureSpec{0.0, 0,
                                {{0, 6 * 3600 + 1200, 1800}, {1, 12 * 3600 + 2400, 3600}, {3, 18 * 3600 + 600, 1800}}};
    const auto a = run_scenario(base), b = run_scenario(with);
    const double without = a.per_model[0].co2->values.back();
    const double with_f = b.per_model[0].co2->values.back();
    c.expect(with_f > without, label + ": failures did not add CO2");
    const double delta = (with_f - without) / without;
    c.note(label + " +" + fmt(100 * delta, 3) + " % CO2 (" + std::to_string(b.rerun_count) + " reruns)");
    return delta;
}

void failure_cost(Check& c) {
    // Equal CPU-hours: 16 jobs of 48 h against 768 jobs of 1 h, all one core at full load.
    std::vector<Task> long_jobs, short_jobs;
    for (std::uint64_t i = 0; i < 16; ++i) long_jobs.push_back(mt::single_task(i, 0, 1, {{48 * 3600, 1.0}}));
    for (std::uint64_t i = 0; i < 768; ++i) short_jobs.push_back(mt::single_task(i, 0, 1, {{3600, 1.0}}));
    const double long_delta = failure_delta(long_jobs, c, "long");
    const double short_delta = failure_delta(short_jobs, c, "short");
    c.expect(long_delta > short_delta, "long-job delta does not exceed short-job delta");
}

// ---- 7 ---------------------------------------------------------------------

CarbonTrace hourly(std::string loc, std::vector<double> v) {
    return CarbonTrace{std::move(loc), TimeSeries{0, 3600, std::move(v), Unit::GramCo2PerKwh}};
}

void migration(Check& c) {
    const auto energy = integrate_energy(TimeSeries{0, 3600, std::vector<double>(24, 1000.0), Unit::Watt});
    {
        std::vector<double> a, b;
        for (int h = 0; h < 24; ++h) {
            a.push_back(h % 2 == 0 ? 100 : 300);
            b.push_back(h % 2 == 0 ? 300 : 100);
        }
        const std::vector<CarbonTrace> traces{hourly("A", a), hourly("B", b)};
        const auto plan = migrate_at_granularity(energy, traces, 3600);
        c.expect(plan.migrations == 23, "(a) " + std::to_string(plan.migrations) + " migrations, want 23");
        for (const auto& s : assess_locations(energy, traces))
            c.expect(plan.total_co2 < s.total, "(a) plan not below static " + s.location);
    }
    {
        Rng rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            const auto n = static_cast<std::size_t>(rng.uniform_int(8, 400));
            std::vector<CarbonTrace> traces;
            for (std::int64_t l = 0, L = rng.uniform_int(2, 8); l < L; ++l) {
                std::vector<double> v(n);
                for (double& x : v) x = rng.uniform(0, 800);
                traces.push_back(CarbonTrace{"L" + std::to_string(l), TimeSeries{0, 900, v, Unit::GramCo2PerKwh}});
            }
            std::vector<double> watts(n);
            for (double& w : watts) w = rng.uniform(100, 5000);
            const auto e = integrate_energy(TimeSeries{0, 900, watts, Unit::Watt});
            const auto plan = migrate_at_granularity(e, traces, 900);
            for (const auto& s : assess_locations(e, traces))
                c.expect(plan.total_co2 <= s.total, "(b) trial " + std::to_string(trial) + " above " + s.location);
        }
    }
    {
        // B looks cheapest at each midnight but A is cheaper the rest of the day.
        std::vector<double> a, b;
        for (int h = 0; h < 72; ++h) {
            a.push_back(h % 24 == 0 ? 200 : 100);
            b.push_back(h % 24 == 0 ? 150 : 400);
        }
        const std::vector<CarbonTrace> traces{hourly("A", a), hourly("B", b)};
        const auto e = integrate_energy(TimeSeries{0, 3600, std::vector<double>(72, 1000.0), Unit::Watt});
        const auto daily = migrate_at_granularity(e, traces, 86400);
        const auto best = assess_locations(e, traces).front();
        c.note("(c) daily plan " + fmt(100 * (daily.total_co2 / best.total - 1), 3) + " % above best static");
        c.expect(daily.total_co2 > best.total, "(c) daily plan does not exceed the best static location");
    }
    {
        const std::vector<CarbonTrace> traces{hourly("A", std::vector<double>(24, 250)),
                                              hourly("B", std::vector<double>(24, 120)),
                                              hourly("C", std::vector<double>(24, 120))};
        for (Seconds g : {Seconds{3600}, Seconds{14400}, Seconds{28800}, Seconds{86400}}) {
            const auto plan = migrate_at_granularity(energy, traces, g);
            c.expect(plan.migrations == 0, "(d) migrations at " + format_duration(g));
        }
    }
}

// ---- 8 ---------------------------------------------------------------------

void scale_overhead(Check& c) {
    mt::TempDir dir;
    const ExperimentConfig config{reference_scenario(),
                                  AnalysisConfig{Metric::Power, {10}, {MetaAgg::Median, std::nullopt}},
                                  std::nullopt,
                                  std::nullopt,
                                  dir / "out",
                                  SeriesFormat::Csv};
    const auto start = std::chrono::steady_clock::now();
    const auto outcome = run_experiment(config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto& t = outcome.timing;
    c.note(std::to_string(config.scenario.models.size()) + " models x " + std::to_string(outcome.raw_samples) +
           " samples; simulation " + fmt(t.simulation_s, 3) + " s, analysis " + fmt(t.analysis_s, 3) +
           " s (" + fmt(100 * t.overhead_ratio(), 3) + " %), wall " + fmt(wall, 3) + " s");
    c.expect(config.scenario.models.size() >= 8, "fewer than eight models");
    c.expect(outcome.raw_samples >= 200000, "fewer than 200,000 samples");
    c.expect(outcome.windowed_samples == (outcome.raw_samples + 9) / 10, "windowed length");
    c.expect(t.analysis_s < t.simulation_s, "analysis slower than simulation");
    c.expect(wall < 300.0, "total wall time above 5 min");
}

// ---- 9 ---------------------------------------------------------------------

int run_cli(const std::string& env, const std::string& args) {
    const std::string cmd = env + " " + M3SIM_CLI_PATH + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).generic_string()] = mt::read_text(e.path());
    return files;
}

void determinism(Check& c) {
    mt::TempDir dir;
    WorkloadGenSpec g;
    g.tasks = 400;
    g.horizon = 3 * 86400;
    g.seed = 17;
    write_workload(generate_workload(g), dir / "w.csv");
    fs::create_directories(dir / "carbon");
    for (const auto& [loc, phase] : std::vector<std::pair<std::string, double>>{{"NL", 0}, {"FR", 6}, {"DE", 13}}) {
        CarbonGenSpec cg;
        cg.location = loc;
        cg.samples = 96 * 10;
        cg.phase_hours = phase;
        cg.seed = static_cast<std::uint64_t>(phase) + 3;
        write_carbon(generate_carbon(cg), dir / "carbon" / (loc + ".csv"));
    }
    const auto exp = [&](const std::string& out) {
        return R"({
  "scenario": {"hosts": [{"cores": 8, "count": 6}], "workload": "w.csv", "sample_step": 60,
               "models": ["M1", "M3", "M5", "M7", "M10", "M13", "M16", "M18"],
               "carbon": {"path": "carbon/NL.csv", "location": "NL"},
               "failures": {"rate_per_host_per_hour": 0.01, "downtime_mean_s": 3600}, "seed": 2024},
  "analysis": {"metric": "co2", "window": 10, "agg": "median", "quorum": "all"},
  "migration": {"carbon_dir": "carbon", "granularities": ["15m", "1h", "4h", "8h", "24h"]},
  "output_dir": ")" + out + "\"\n}\n";
    };
    mt::write_text(dir / "a.json", exp("run1"));
    mt::write_text(dir / "b.json", exp("run8"));
    mt::write_text(dir / "c.json", exp("run8b"));
    c.expect(run_cli("M3SIM_THREADS=1", "experiment --config " + (dir / "a.json").string()) == 0, "run 1 failed");
    c.expect(run_cli("M3SIM_THREADS=8", "experiment --config " + (dir / "b.json").string()) == 0, "run 8 failed");
    c.expect(run_cli("M3SIM_THREADS=8", "experiment --config " + (dir / "c.json").string()) == 0, "run 8b failed");
    const auto one = snapshot(dir / "run1"), eight = snapshot(dir / "run8"), again = snapshot(dir / "run8b");
    c.note(std::to_string(one.size()) + " files compared");
    c.expect(one.size() >= 12, "expected at least twelve artifacts");
    c.expect(one == eight, "threads=1 and threads=8 outputs differ");
    c.expect(eight == again, "repeated threads=8 outputs differ");
}

// ---- 10 --------------------------------------------------------------------

void accuracy(Check& c) {
    using V = std::vector<double>;
    c.expect(std::abs(mape(V{100, 100}, V{110, 90}) - 10.0) < 1e-12, "mape([100,100],[110,90]) != 10");
    c.expect(mape(V{5, 7}, V{5, 7}) == 0.0, "mape(R,R) != 0");
    bool threw = false;
    try {
        mape(V{0, 1}, V{1, 1});
    } catch (const ValidationError&) {
        threw = true;
    }
    c.expect(threw, "zero reference accepted");
    c.expect(std::abs(rmse(V{0, 0}, V{3, 4}) - std::sqrt(12.5)) < 1e-12, "rmse([0,0],[3,4])");
    c.expect(mae(V{0, 0}, V{3, 4}) == 3.5, "mae([0,0],[3,4])");
    c.expect(rmse(V{2}, V{5}) == 3.0 && mae(V{2}, V{5}) == 3.0, "n=1 collapse");
    c.expect(rmse(V{1, 2}, V{1, 2}) == 0.0 && mae(V{1, 2}, V{1, 2}) == 0.0, "identity");
    Rng rng(10);
    for (int trial = 0; trial < 100; ++trial) {
        V r, s, cr, cs;
        const double k = rng.uniform(0.01, 100) * (trial % 2 ? -1 : 1);
        for (int i = 0, n = static_cast<int>(rng.uniform_int(1, 200)); i < n; ++i) {
            r.push_back(rng.uniform(1, 1000));
            s.push_back(rng.uniform(1, 1000));
            cr.push_back(k * r.back());
            cs.push_back(k * s.back());
        }
        c.expect(mt::close_rel(mape(cr, cs), mape(r, s), 1e-10), "scale invariance trial " + std::to_string(trial));
    }
}

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<void(Check&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "power formulas match the high-precision table", 1, power_oracles},
        {2, "sqrt >= linear >= square >= cubic; sqrt overestimates the E2 ensemble", 10, dominance},
        {3, "window length law, identity and mean preservation", 5, windowing},
        {4, "median meta-model reduces MAPE against ground truth", 30, meta_error_reduction},
        {5, "energy and CO2 analytic oracles, monotone cumulative series", 10, energy_co2},
        {6, "failures cost more CO2 for long jobs than short jobs", 60, failure_cost},
        {7, "greedy migration properties", 30, migration},
        {8, "8 models x 201,600 samples, analysis cheaper than simulation", 300, scale_overhead},
        {9, "experiment output is byte-identical across runs and thread counts", 120, determinism},
        {10, "MAPE/RMSE/MAE oracle vectors and MAPE scale invariance", 1, accuracy},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.run(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        check.expect(secs < cr.budget_s, "runtime " + fmt(secs, 3) + " s over budget " + fmt(cr.budget_s) + " s");
        const bool ok = check.ok();
        failed += !ok;
        std::printf("[%s] AC%-2d %s (%.2f s / %.0f s) -- %s\n", ok ? "PASS" : "FAIL", cr.id, cr.title.c_str(), secs,
                    cr.budget_s, check.summary().c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
