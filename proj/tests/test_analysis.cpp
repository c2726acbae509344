#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <optional>
#include <stdexcept>
#include <vector>

#include "mtsched/analysis.hpp"
#include "mtsched/engine.hpp"
#include "mtsched/rng.hpp"
#include "mtsched/schedulers.hpp"
#include "reference.hpp"

using namespace mtsched;

namespace {

HierarchicalSpec dm_im_spec(const TaskSystem& sys) {
    return HierarchicalSpec{dm_order(sys), im_within(sys)};
}

}  // namespace

TEST_CASE("two-processor fixture: thread verdicts") {
    auto sys = testutil::example1();

    auto hier = ftp_fsp_test(sys, dm_order(sys), im_within(sys));
    CHECK(hier.feasible);
    CHECK(hier.interval_end == 12);
    CHECK(hier.stabilization == std::vector<Time>{0, 0, 0});
    CHECK(hier.wcrt == std::vector<Time>{2, 3, 8});
    CHECK_FALSE(hier.first_miss.has_value());
    CHECK_FALSE(hier.assumes_constant_wcet);

    auto flat = fsp_test(sys, flatten_hierarchical(sys, dm_order(sys), im_within(sys)));
    CHECK(flat.feasible);
    CHECK(flat.interval_end == 12);
    CHECK(flat.stabilization.size() == 4);
    CHECK(flat.wcrt == hier.wcrt);
}

TEST_CASE("two-processor fixture: gang verdict is infeasible") {
    auto sys = testutil::example1();
    auto verdict = gang_test(sys, dm_order(sys));
    CHECK_FALSE(verdict.feasible);
    CHECK(verdict.interval_end == 12);
    CHECK(verdict.assumes_constant_wcet);
    CHECK(verdict.wcrt.empty());
    REQUIRE(verdict.first_miss.has_value());
    CHECK(verdict.first_miss->thread == ThreadKey{2, 0, 0});
    CHECK(verdict.first_miss->deadline == 12);
    CHECK(verdict.first_miss->executed == 1);
}

TEST_CASE("three-processor fixture: verdicts flip between the two policies") {
    auto sys = testutil::example2();

    auto hier = ftp_fsp_test(sys, dm_order(sys), im_within(sys));
    CHECK_FALSE(hier.feasible);
    REQUIRE(hier.first_miss.has_value());
    CHECK(hier.first_miss->thread == ThreadKey{2, 0, 0});
    CHECK(hier.first_miss->deadline == 10);
    CHECK(hier.first_miss->executed == 6);

    auto gang = gang_test(sys, dm_order(sys));
    CHECK(gang.feasible);
    CHECK(gang.interval_end == 20);
    CHECK(gang.wcrt == std::vector<Time>{3, 4, 9});
}

TEST_CASE("offsets shift the analysis window") {
    std::vector<Task> tasks;
    tasks.emplace_back(2, std::vector<Time>{1}, 2, 4);
    tasks.emplace_back(1, std::vector<Time>{1}, 3, 6);
    TaskSystem sys(std::move(tasks), 1);

    auto verdict = ftp_fsp_test(sys, dm_order(sys), im_within(sys));
    CHECK(verdict.stabilization == std::vector<Time>{2, 7});
    CHECK(verdict.interval_end == 19);
    CHECK(verdict.feasible);
    CHECK(verdict.wcrt == std::vector<Time>{1, 1});
}

TEST_CASE("hierarchical test equals the flat test on the flattened order") {
    Rng rng(0x5eed0020);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto sys = testutil::random_system(rng);
        auto task_order = testutil::random_task_order(sys, rng);
        auto within = im_within(sys);
        for (auto& w : within) testutil::shuffle(w, rng);

        auto hier = ftp_fsp_test(sys, task_order, within);
        auto flat = fsp_test(sys, flatten_hierarchical(sys, task_order, within));
        CAPTURE(trial);
        REQUIRE(hier.feasible == flat.feasible);
        REQUIRE(hier.interval_end == flat.interval_end);
        if (hier.feasible) {
            REQUIRE(hier.wcrt == flat.wcrt);
        } else {
            REQUIRE(hier.first_miss->thread == flat.first_miss->thread);
            REQUIRE(hier.first_miss->deadline == flat.first_miss->deadline);
            REQUIRE(hier.first_miss->executed == flat.first_miss->executed);
        }
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("feasible verdicts hold over several extra hyperperiods") {
    Rng rng(0x5eed0021);
    int feasible_seen = 0;
    for (int trial = 0; trial < 300 && feasible_seen < 40; ++trial) {
        auto sys = testutil::random_system(rng);
        if (hyperperiod(sys) > 4000) continue;
        auto verdict = ftp_fsp_test(sys, dm_order(sys), im_within(sys));
        if (!verdict.feasible) continue;
        ++feasible_seen;

        const Time S = verdict.stabilization.back();
        const Time P = verdict.interval_end - S;
        Time max_d = 0;
        for (const Task& t : sys.tasks) max_d = std::max(max_d, t.deadline);

        SimOptions opt;
        opt.record_trace = false;
        opt.record_completions = false;
        opt.assert_window = S + 5 * P;
        auto order = flatten_hierarchical(sys, dm_order(sys), im_within(sys));
        auto sim = simulate_threads(sys, order, S + 5 * P + max_d, nullptr, opt);
        CAPTURE(trial);
        CHECK(sim.misses.empty());
    }
    CHECK(feasible_seen >= 20);
}

TEST_CASE("feasible response times never exceed the deadline") {
    Rng rng(0x5eed0022);
    int feasible_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto sys = testutil::random_system(rng);
        auto verdict = ftp_fsp_test(sys, dm_order(sys), im_within(sys));
        if (!verdict.feasible) continue;
        ++feasible_seen;
        REQUIRE(verdict.wcrt.size() == static_cast<std::size_t>(sys.task_count()));
        for (int i = 0; i < sys.task_count(); ++i) {
            CHECK(verdict.wcrt[static_cast<std::size_t>(i)] >= 1);
            CHECK(verdict.wcrt[static_cast<std::size_t>(i)] <=
                  sys.tasks[static_cast<std::size_t>(i)].deadline);
        }
    }
    CHECK(feasible_seen >= 10);
}

TEST_CASE("response times recomputed from completions match the engine") {
    Rng rng(0x5eed0023);
    for (int trial = 0; trial < 120; ++trial) {
        auto sys = testutil::random_system(rng);
        if (hyperperiod(sys) > 4000) continue;
        auto order = lsf_global(sys);
        auto stab = stabilization_points([&] {
            std::vector<OffsetPeriod> entries;
            for (const SubRef& s : order)
                entries.push_back(OffsetPeriod{sys.tasks[s.task].offset,
                                               sys.tasks[s.task].period});
            return entries;
        }());
        const Time window = stab.back() + hyperperiod(sys);
        Time max_d = 0;
        for (const Task& t : sys.tasks) max_d = std::max(max_d, t.deadline);

        SimOptions opt;
        opt.assert_window = window;
        auto sim = simulate_threads(sys, order, window + max_d, nullptr, opt);
        CAPTURE(trial);
        CHECK(sim.task_wcrt == wcrt_per_task(sim, sys, window));
    }
}

TEST_CASE("per-task response recomputation on the gang fixture") {
    auto sys = testutil::example1();
    auto sim = simulate_gang(sys, dm_order(sys), 12);
    auto wcrt = wcrt_per_task(sim, sys, 12);
    REQUIRE(wcrt.size() == 3);
    CHECK(wcrt[0] == 2);
    CHECK(wcrt[1] == 3);
    CHECK(wcrt[2] == -1);
}

TEST_CASE("feasible schedules repeat with the hyperperiod") {
    auto ex1 = testutil::example1();
    auto r1 = periodicity_probe(ex1, dm_im_spec(ex1));
    CHECK(r1.periodic);
    CHECK(r1.window_start == 0);
    CHECK(r1.window_end == 12);

    auto ex2 = testutil::example2();
    auto r2 = periodicity_probe(ex2, GangSpec{dm_order(ex2)});
    CHECK(r2.periodic);
    CHECK(r2.window_end == 20);
}

TEST_CASE("an overloaded gang schedule is not periodic") {
    auto sys = testutil::example1();
    auto report = periodicity_probe(sys, GangSpec{dm_order(sys)});
    CHECK_FALSE(report.periodic);
    CHECK(report.mismatch_time >= 0);
    CHECK(report.mismatch_proc >= 0);
}

TEST_CASE("periodicity holds for random feasible systems under all policies") {
    Rng rng(0x5eed0024);
    int probed = 0;
    for (int trial = 0; trial < 200 && probed < 60; ++trial) {
        auto sys = testutil::random_gang_system(rng);
        if (hyperperiod(sys) > 4000) continue;

        if (ftp_fsp_test(sys, dm_order(sys), im_within(sys)).feasible) {
            CHECK(periodicity_probe(sys, dm_im_spec(sys)).periodic);
            ++probed;
        }
        if (fsp_test(sys, lsf_global(sys)).feasible) {
            CHECK(periodicity_probe(sys, GlobalFspSpec{lsf_global(sys)}).periodic);
            ++probed;
        }
        if (gang_test(sys, dm_order(sys)).feasible) {
            CHECK(periodicity_probe(sys, GangSpec{dm_order(sys)}).periodic);
            ++probed;
        }
    }
    CHECK(probed >= 30);
}

TEST_CASE("thread scheduling never finishes later when demands shrink") {
    auto sys = testutil::example1();
    CHECK_FALSE(predictability_probe(sys, dm_im_spec(sys), 0x5eed0025, 25).has_value());

    auto ex2 = testutil::example2();
    CHECK_FALSE(
        predictability_probe(ex2, GlobalFspSpec{lsf_global(ex2)}, 0x5eed0026, 25)
            .has_value());
}

TEST_CASE("predictability probe rejects infeasible systems") {
    auto sys = testutil::example2();
    CHECK_THROWS_AS(predictability_probe(sys, dm_im_spec(sys), 1, 5),
                    std::invalid_argument);
}

TEST_CASE("the analysis refuses hyperperiods beyond its bound") {
    auto sys = testutil::example1();
    AnalysisLimits tight;
    tight.hyperperiod_bound = 10;
    CHECK_THROWS_AS(ftp_fsp_test(sys, dm_order(sys), im_within(sys), tight),
                    std::invalid_argument);
    CHECK_THROWS_AS(gang_test(sys, dm_order(sys), tight), std::invalid_argument);

    AnalysisLimits exact;
    exact.hyperperiod_bound = 12;
    CHECK_NOTHROW(ftp_fsp_test(sys, dm_order(sys), im_within(sys), exact));
}

TEST_CASE("run_analysis dispatches on the policy kind") {
    auto sys = testutil::example1();

    auto hier = run_analysis(sys, dm_im_spec(sys));
    CHECK(hier.feasible);
    CHECK(hier.wcrt == std::vector<Time>{2, 3, 8});

    auto flat = run_analysis(
        sys, GlobalFspSpec{flatten_hierarchical(sys, dm_order(sys), im_within(sys))});
    CHECK(flat.feasible);

    auto gang = run_analysis(sys, GangSpec{dm_order(sys)});
    CHECK_FALSE(gang.feasible);
    CHECK(gang.assumes_constant_wcet);
}
