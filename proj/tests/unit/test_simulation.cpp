#include <gtest/gtest.h>

#include <numeric>

#include "m3sim/error.hpp"
#include "m3sim/rng.hpp"
#include "m3sim/simulation.hpp"
#include "m3sim/synth.hpp"
#include "test_support.hpp"

using namespace m3sim;
namespace mt = m3sim::testing;

namespace {

SimScenario one_task(double utilization, Seconds duration = 3600, Seconds step = 60) {
    return mt::scenario(mt::hosts(1, 1), {mt::single_task(0, 0, 1, {{duration, utilization}})}, step,
                        {{"lin", mt::linear_model()}});
}

const TaskRecord& record(const SimResult& r, std::uint64_t id) {
    for (const auto& t : r.tasks)
        if (t.id == id) return t;
    throw std::runtime_error("no task");
}

SimScenario random_scenario(Rng& rng, std::vector<NamedModel> models, bool uniform_fleet = false) {
    const auto host_count = static_cast<std::size_t>(rng.uniform_int(1, 4));
    const auto cores = rng.uniform_int(2, 8);
    std::vector<HostSpec> fleet;
    for (std::size_t h = 0; h < host_count; ++h)
        fleet.push_back(HostSpec{h * 3 + 1, static_cast<int>(uniform_fleet ? cores : rng.uniform_int(2, 8)), 0, 0});
    std::vector<Task> tasks;
    const auto n = rng.uniform_int(1, 25);
    for (std::int64_t i = 0; i < n; ++i) {
        std::vector<Fragment> frags;
        const auto f = rng.uniform_int(1, 4);
        for (std::int64_t j = 0; j < f; ++j) frags.push_back({rng.uniform_int(1, 2000), rng.uniform()});
        tasks.push_back(mt::single_task(static_cast<std::uint64_t>(i), rng.uniform_int(0, 5000),
                                        static_cast<int>(rng.uniform_int(1, 2)), frags));
    }
    return mt::scenario(fleet, tasks, rng.uniform_int(1, 120), std::move(models));
}

}  // namespace

TEST(Simulation, ConstantFullLoadHour) {
    const auto r = run_scenario(one_task(1.0));
    ASSERT_EQ(r.per_model.size(), 1u);
    const auto& out = r.per_model[0];
    ASSERT_EQ(out.power.size(), 60u);
    for (double p : out.power.values) EXPECT_EQ(p, 180.0);
    EXPECT_EQ(out.energy.size(), 61u);
    EXPECT_DOUBLE_EQ(out.energy.values.back(), 180.0);
    EXPECT_EQ(out.power.unit, Unit::Watt);
    EXPECT_EQ(out.energy.unit, Unit::WattHour);
    EXPECT_EQ(r.makespan, 3600);
    EXPECT_EQ(r.completed_tasks, 1u);
}

TEST(Simulation, IdleFragment) {
    const auto r = run_scenario(one_task(0.0));
    ASSERT_EQ(r.per_model[0].power.size(), 60u);
    for (double p : r.per_model[0].power.values) EXPECT_EQ(p, 32.0);
    EXPECT_EQ(r.per_model[0].energy.values.back(), 32.0);
}

TEST(Simulation, ModelsShareGrid) {
    auto s = one_task(0.4);
    s.models.push_back({"sqrt", PowerModelSpec::make(PowerKind::Sqrt, 32, 180)});
    const auto r = run_scenario(s);
    ASSERT_EQ(r.per_model.size(), 2u);
    EXPECT_EQ(r.per_model[0].power.size(), r.per_model[1].power.size());
    EXPECT_EQ(r.per_model[0].power.start_time, r.per_model[1].power.start_time);
    EXPECT_EQ(r.per_model[0].power.step, r.per_model[1].power.step);
    EXPECT_EQ(r.per_model[1].model_id, "sqrt");
}

TEST(Simulation, PartialSampleIsIntervalAverage) {
    // 90 s of full load then idle until the end of the second 60 s bin.
    const auto r = run_scenario(one_task(1.0, 90, 60));
    ASSERT_EQ(r.per_model[0].power.size(), 2u);
    EXPECT_EQ(r.per_model[0].power.values[0], 180.0);
    EXPECT_DOUBLE_EQ(r.per_model[0].power.values[1], (180.0 * 30 + 32.0 * 30) / 60);
}

TEST(Simulation, TwoHostsThreeTasksFifo) {
    const auto s = mt::scenario(mt::hosts(2, 1),
                                {mt::single_task(1, 0, 1, {{100, 1}}), mt::single_task(2, 0, 1, {{200, 1}}),
                                 mt::single_task(3, 0, 1, {{50, 1}})},
                                10, {{"lin", mt::linear_model()}});
    const auto r = run_scenario(s);
    EXPECT_EQ(record(r, 1).host, 0u);
    EXPECT_EQ(record(r, 1).start, 0);
    EXPECT_EQ(record(r, 2).host, 1u);
    EXPECT_EQ(record(r, 2).start, 0);
    EXPECT_EQ(record(r, 3).start, 100);
    EXPECT_EQ(record(r, 3).host, 0u);
    EXPECT_EQ(r.makespan, 200);
}

TEST(Simulation, TaskWiderThanEveryHost) {
    const auto s = mt::scenario(mt::hosts(3, 2), {mt::single_task(42, 0, 4, {{10, 1}})}, 10,
                                {{"lin", mt::linear_model()}});
    try {
        run_scenario(s);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("42"), std::string::npos) << e.what();
        EXPECT_EQ(e.module(), "sim-core");
    }
}

TEST(Simulation, ScenarioValidation) {
    auto s = one_task(1.0);
    s.sample_step = 0;
    EXPECT_THROW(validate(s), ValidationError);
    s = one_task(1.0);
    s.models.clear();
    EXPECT_THROW(validate(s), ValidationError);
    s = one_task(1.0);
    s.hosts.clear();
    EXPECT_THROW(validate(s), ValidationError);
    s = one_task(1.0);
    s.failures = FailureSpec{-1.0, 10, {}};
    EXPECT_THROW(validate(s), ValidationError);
}

TEST(Integration, EnergyRectangleRule) {
    const TimeSeries p{0, 60, std::vector<double>(60, 180.0), Unit::Watt};
    EXPECT_DOUBLE_EQ(integrate_energy(p).values.back(), 180.0);
    const TimeSeries half{0, 30, std::vector<double>(120, 180.0), Unit::Watt};
    EXPECT_DOUBLE_EQ(integrate_energy(half).values.back(), 180.0);
    const TimeSeries zero{0, 60, std::vector<double>(10, 0.0), Unit::Watt};
    for (double e : integrate_energy(zero).values) EXPECT_EQ(e, 0.0);
}

TEST(Integration, Co2ConstantIntensity) {
    // 1000 Wh accrued over one hour.
    const TimeSeries p{0, 3600, {1000.0}, Unit::Watt};
    const auto e = integrate_energy(p);
    const auto c = integrate_co2(e, mt::constant_carbon("NL", 400, 0, 900, 4));
    EXPECT_DOUBLE_EQ(c.values.back(), 400.0);
    EXPECT_EQ(c.unit, Unit::GramCo2);
    const auto z = integrate_co2(e, mt::constant_carbon("NL", 0, 0, 900, 4));
    EXPECT_EQ(z.values.back(), 0.0);
}

TEST(Integration, Co2PiecewiseIntensity) {
    const TimeSeries p{0, 60, std::vector<double>(60, 180.0), Unit::Watt};
    const CarbonTrace carbon{"NL", TimeSeries{0, 1800, {100, 300}, Unit::GramCo2PerKwh}};
    EXPECT_EQ(integrate_co2(integrate_energy(p), carbon).values.back(), 36.0);
}

TEST(Integration, Co2CoverageGap) {
    const TimeSeries p{0, 60, std::vector<double>(60, 180.0), Unit::Watt};
    const CarbonTrace carbon{"NL", TimeSeries{0, 900, {100, 300}, Unit::GramCo2PerKwh}};
    try {
        integrate_co2(integrate_energy(p), carbon);
        FAIL();
    } catch (const RuntimeError& e) {
        EXPECT_NE(std::string(e.what()).find("does not cover simulation horizon"), std::string::npos);
    }
}

TEST(Failures, ForcedFailureRestartsTask) {
    auto s = one_task(1.0);
    s.failures = FailureSpec{0.0, 7200, {{0, 1800, 600}}};
    const auto r = run_scenario(s);
    EXPECT_EQ(record(r, 0).finish, 1800 + 600 + 3600);
    EXPECT_EQ(record(r, 0).reruns, 1u);
    EXPECT_EQ(r.rerun_count, 1u);
    EXPECT_EQ(r.makespan, 6000);
    ASSERT_EQ(r.failures.size(), 1u);
    // 1800 s busy, 600 s down at idle draw, 3600 s busy.
    const double expected_wh = (180.0 * 1800 + 32.0 * 600 + 180.0 * 3600) / 3600;
    EXPECT_DOUBLE_EQ(r.per_model[0].energy.values.back(), expected_wh);
}

TEST(Failures, ZeroRateMatchesFailureFreeRun) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto base = random_scenario(rng, {{"lin", mt::linear_model()}});
        auto with = base;
        with.failures = FailureSpec{0.0, 100, {}};
        with.seed = 99;
        const auto a = run_scenario(base), b = run_scenario(with);
        EXPECT_EQ(a.per_model[0].power, b.per_model[0].power);
        EXPECT_EQ(a.makespan, b.makespan);
    }
}

TEST(Failures, SameSeedSameFailures) {
    WorkloadGenSpec g;
    g.tasks = 200;
    g.horizon = 3 * 86400;
    g.seed = 5;
    SimScenario s{mt::hosts(4, 8), generate_workload(g), 300, {{"lin", mt::linear_model()}},
                  std::nullopt, FailureSpec{0.05, 1800, {}}, 1234};
    const auto a = run_scenario(s), b = run_scenario(s);
    ASSERT_FALSE(a.failures.empty());
    ASSERT_EQ(a.failures.size(), b.failures.size());
    for (std::size_t i = 0; i < a.failures.size(); ++i) {
        EXPECT_EQ(a.failures[i].time, b.failures[i].time);
        EXPECT_EQ(a.failures[i].host, b.failures[i].host);
        EXPECT_EQ(a.failures[i].downtime, b.failures[i].downtime);
    }
    s.seed = 1235;
    const auto c = run_scenario(s);
    bool differs = c.failures.size() != a.failures.size();
    for (std::size_t i = 0; !differs && i < a.failures.size(); ++i) differs = c.failures[i].time != a.failures[i].time;
    EXPECT_TRUE(differs);
}

// Holds where energy is linear in busy core-seconds: one core count across the
// fleet and linear models. Convex models or mixed core counts can make a
// rescheduled rerun cheaper than the original placement.
TEST(Failures, NeverDecreaseEnergy) {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        auto base = random_scenario(rng, {{"lin", mt::linear_model()}, {"lin0", mt::linear_model(0, 180)}}, true);
        auto with = base;
        FailureSpec f{0.0, 3600, {}};
        const auto n = rng.uniform_int(1, 3);
        for (std::int64_t i = 0; i < n; ++i)
            f.forced.push_back({static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(base.hosts.size()) - 1)),
                                rng.uniform_int(0, 6000), rng.uniform_int(1, 3000)});
        with.failures = f;
        const auto a = run_scenario(base), b = run_scenario(with);
        for (std::size_t m = 0; m < a.per_model.size(); ++m) {
            EXPECT_GE(b.per_model[m].energy.values.back(), a.per_model[m].energy.values.back() * (1 - 1e-12))
                << "trial " << trial;
        }
    }
}

TEST(Properties, EnergyMonotoneAndExactSum) {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = random_scenario(rng, {{"sqrt", PowerModelSpec::make(PowerKind::Sqrt, 32, 180)}});
        const auto r = run_scenario(s);
        const auto& out = r.per_model[0];
        double watt_seconds = 0.0;
        for (std::size_t i = 0; i < out.power.size(); ++i) {
            watt_seconds += out.power.values[i] * static_cast<double>(out.power.step);
            ASSERT_EQ(out.energy.values[i + 1], watt_seconds / 3600.0);
            ASSERT_GE(out.energy.values[i + 1], out.energy.values[i]);
        }
    }
}

TEST(Properties, TimelineIndependentOfModels) {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        auto a = random_scenario(rng, {{"lin", mt::linear_model()}});
        a.failures = FailureSpec{0.5, 600, {}};
        a.seed = static_cast<std::uint64_t>(trial);
        auto b = a;
        b.models = {{"cube", PowerModelSpec::make(PowerKind::Cubic, 0, 250)},
                    {"m13", PowerModelSpec::make(PowerKind::Asymptotic, 32, 180, std::nullopt, 0.85)}};
        const auto ra = run_scenario(a), rb = run_scenario(b);
        EXPECT_EQ(ra.makespan, rb.makespan);
        EXPECT_EQ(ra.per_model[0].power.size(), rb.per_model[1].power.size());
        ASSERT_EQ(ra.failures.size(), rb.failures.size());
        for (std::size_t i = 0; i < ra.failures.size(); ++i) EXPECT_EQ(ra.failures[i].time, rb.failures[i].time);
    }
}

TEST(Properties, DeterministicAcrossThreadCounts) {
    auto s = reference_scenario(2000, 30, 4, 9);
    s.failures = FailureSpec{0.01, 1200, {}};
    const auto a = run_scenario(s, 1), b = run_scenario(s, 8);
    ASSERT_EQ(a.per_model.size(), b.per_model.size());
    for (std::size_t m = 0; m < a.per_model.size(); ++m) {
        EXPECT_EQ(a.per_model[m].power, b.per_model[m].power);
        EXPECT_EQ(a.per_model[m].energy, b.per_model[m].energy);
    }
}

TEST(Properties, ConservationWithoutContention) {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Task> tasks;
        const auto n = rng.uniform_int(1, 12);
        for (std::int64_t i = 0; i < n; ++i) {
            std::vector<Fragment> frags;
            for (int j = 0; j < 3; ++j) frags.push_back({rng.uniform_int(1, 500), rng.uniform()});
            tasks.push_back(mt::single_task(static_cast<std::uint64_t>(i), rng.uniform_int(0, 1000), 1, frags));
        }
        double expected = 0.0;
        for (const auto& t : tasks) expected += t.cpu_seconds();
        // One core per task: nothing ever waits.
        const auto s = mt::scenario(mt::hosts(1, static_cast<int>(n)), tasks, 7, {{"lin", mt::linear_model()}});
        const auto tl = simulate_timeline(s);
        EXPECT_TRUE(mt::close_rel(tl.busy_core_seconds(), expected, 1e-12));
    }
}

TEST(Properties, MultiCoreLoadMatchesUtilizationOracle) {
    // Two 4-core hosts; an analytic check of one busy interval on each.
    const auto s = mt::scenario(mt::hosts(2, 4),
                                {mt::single_task(0, 0, 4, {{120, 0.5}}), mt::single_task(1, 0, 2, {{120, 1.0}})},
                                60, {{"lin", mt::linear_model()}});
    const auto r = run_scenario(s);
    // Task 0 fills host 0 (4 cores at 0.5); task 1 lands on host 1 (2 of 4 cores at 1.0).
    for (double p : r.per_model[0].power.values) EXPECT_DOUBLE_EQ(p, 2 * (32 + 148 * 0.5));
}
