// End-to-end acceptance checks. Each numbered criterion prints exactly one
// PASS/FAIL line; the process exits with the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "mtsched/analysis.hpp"
#include "mtsched/engine.hpp"
#include "mtsched/experiment.hpp"
#include "mtsched/io.hpp"
#include "mtsched/model.hpp"
#include "mtsched/multiphase.hpp"
#include "mtsched/rng.hpp"
#include "mtsched/schedulers.hpp"
#include "mtsched/taskgen.hpp"
#include "reference.hpp"

using namespace mtsched;

namespace {

// Pinned thresholds. Counts are minima, times are hard caps.
constexpr double kFixtureTimeLimit = 1.0;          // seconds, criterion 1
constexpr int kPeriodicSystemsPerPlatform = 500;   // criterion 4
constexpr int kPredictableSystems = 500;           // criterion 5
constexpr int kReductionTrials = 20;               // criterion 5
constexpr int kStabilizationLists = 10'000;        // criterion 6
constexpr int kExtendedVerdicts = 300;             // criterion 6
constexpr int kEquivalenceSystems = 500;           // criterion 6
constexpr int kStudySystemsPerPlatform = 2'000;    // criterion 7
constexpr int kBucketMinSamples = 30;              // criterion 7
constexpr double kStudyTimeLimit = 600.0;          // seconds, criterion 7
constexpr Time kStudyHyperperiodBound = 5'000'000;  // criterion 7
constexpr int kConformanceTasks = 100'000;         // criterion 8
constexpr int kConformanceSystems = 1'000;         // criterion 8
constexpr Time kConformanceHyperperiodBound = 5'000'000;

// Generation profile for the randomized suites (criteria 4, 5, 6): short
// periods keep the hyperperiods, and with them the simulations, small.
GenConfig suite_config(int m, std::uint64_t base, std::uint64_t salt) {
    GenConfig cfg;
    cfg.m = m;
    cfg.dist = kAllDistributions[salt % 5];
    cfg.period_min = 1;
    cfg.period_max = 30;
    cfg.hyperperiod_bound = 10'000;
    cfg.seed = mix_seed(base, salt);
    return cfg;
}

struct Outcome {
    bool pass = true;
    std::string note;
};

void fail(Outcome& o, const std::string& msg) {
    o.pass = false;
    if (!o.note.empty()) o.note += "; ";
    o.note += msg;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

Outcome criterion1() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    const TaskSystem sys = testutil::example1();

    const AnalysisVerdict gang = gang_test(sys, dm_order(sys));
    if (gang.feasible) fail(o, "gang verdict should be infeasible");
    else if (gang.first_miss->thread.task != 2 || gang.first_miss->deadline != 12)
        fail(o, "gang first miss should be task 3 at t=12");

    const AnalysisVerdict threads = ftp_fsp_test(sys, dm_order(sys), im_within(sys));
    if (!threads.feasible) fail(o, "thread verdict should be feasible");
    else if (threads.wcrt[2] != 8) fail(o, "task 3 response should be 8");

    const auto sim = simulate_threads(
        sys, flatten_hierarchical(sys, dm_order(sys), im_within(sys)), 12);
    Time process_done = -1;
    if (sim.completions.count(ThreadKey{2, 0, 0}) &&
        sim.completions.count(ThreadKey{2, 1, 0}))
        process_done = std::max(sim.completions.at(ThreadKey{2, 0, 0}),
                                sim.completions.at(ThreadKey{2, 1, 0}));
    if (process_done != 8) fail(o, "first process of task 3 should complete at 8");

    const double elapsed = seconds_since(start);
    if (elapsed >= kFixtureTimeLimit) fail(o, "took " + std::to_string(elapsed) + "s");
    if (o.pass)
        o.note = "gang misses task 3 at t=12, thread policy feasible with response 8";
    return o;
}

Outcome criterion2() {
    Outcome o;
    const TaskSystem sys = testutil::example2();

    const AnalysisVerdict gang = gang_test(sys, dm_order(sys));
    if (!gang.feasible) fail(o, "gang verdict should be feasible");
    else if (gang.interval_end != 20) fail(o, "gang interval should be [0, 20)");

    const AnalysisVerdict threads = ftp_fsp_test(sys, dm_order(sys), im_within(sys));
    if (threads.feasible) fail(o, "thread verdict should be infeasible");
    else {
        if (threads.first_miss->thread.task != 2 || threads.first_miss->deadline != 10)
            fail(o, "thread first miss should be task 3 at t=10");
        if (threads.first_miss->executed != 6)
            fail(o, "missed job should have exactly 6 units done, got " +
                        std::to_string(threads.first_miss->executed));
    }
    if (o.pass)
        o.note = "gang feasible over [0, 20), thread policy misses with 6 of 9 units";
    return o;
}

Outcome criterion3() {
    Outcome o;
    const UnpredictabilityDemo first = unpredictability_demo();
    const UnpredictabilityDemo second = unpredictability_demo();
    if (first.full_completion != 2 || first.reduced_completion != 4)
        fail(o, "expected completions (2, 4), got (" +
                    std::to_string(first.full_completion) + ", " +
                    std::to_string(first.reduced_completion) + ")");
    if (!first.anomaly) fail(o, "anomaly flag not set");
    if (first.full_completion != second.full_completion ||
        first.reduced_completion != second.reduced_completion)
        fail(o, "demo is not deterministic");
    if (o.pass) o.note = "shrinking one demand moves the completion from 2 to 4";
    return o;
}

Outcome criterion4() {
    Outcome o;
    std::string counts;
    for (int m : {2, 4}) {
        int systems = 0;
        long probes = 0;
        std::uint64_t salt = 0;
        const AnalysisLimits limits{10'000};
        while (systems < kPeriodicSystemsPerPlatform && salt < 20'000) {
            const GenConfig cfg = suite_config(m, 0xACC40000u + m, salt++);
            const TaskSystem sys = generate_system(cfg);

            const SchedulerSpec specs[] = {
                SchedulerSpec{HierarchicalSpec{dm_order(sys), im_within(sys)}},
                SchedulerSpec{GlobalFspSpec{lsf_global(sys)}},
                SchedulerSpec{GangSpec{dm_order(sys)}},
            };
            bool any = false;
            for (const SchedulerSpec& spec : specs) {
                if (!run_analysis(sys, spec, limits).feasible) continue;
                any = true;
                ++probes;
                const PeriodicityReport rep = periodicity_probe(sys, spec, limits);
                if (!rep.periodic) {
                    fail(o, "m=" + std::to_string(m) + " seed " +
                                std::to_string(cfg.seed) + ": trace differs at t=" +
                                std::to_string(rep.mismatch_time));
                    return o;
                }
            }
            if (any) ++systems;
        }
        if (systems < kPeriodicSystemsPerPlatform)
            fail(o, "only " + std::to_string(systems) + " feasible systems for m=" +
                        std::to_string(m));
        if (!counts.empty()) counts += ", ";
        counts += "m=" + std::to_string(m) + ": " + std::to_string(systems) +
                  " systems / " + std::to_string(probes) + " schedules";
    }
    if (o.pass) o.note = "hyperperiod-shifted slices identical (" + counts + ")";
    return o;
}

Outcome criterion5() {
    Outcome o;
    int systems = 0;
    long probes = 0;
    std::uint64_t salt = 0;
    const AnalysisLimits limits{10'000};
    Rng order_rng(0xACC50001);
    while (systems < kPredictableSystems && salt < 40'000) {
        const int m = (salt % 2 == 0) ? 2 : 4;
        const GenConfig cfg = suite_config(m, 0xACC50000u, salt++);
        const TaskSystem sys = generate_system(cfg);

        std::vector<SchedulerSpec> specs;
        specs.push_back(HierarchicalSpec{dm_order(sys), im_within(sys)});
        specs.push_back(GlobalFspSpec{testutil::random_subprogram_order(sys, order_rng)});

        bool any = false;
        for (const SchedulerSpec& spec : specs) {
            if (!run_analysis(sys, spec, limits).feasible) continue;
            any = true;
            ++probes;
            const auto violation = predictability_probe(
                sys, spec, mix_seed(cfg.seed, 0xD), kReductionTrials, limits);
            if (violation) {
                fail(o, "seed " + std::to_string(cfg.seed) + ": task " +
                            std::to_string(violation->thread.task + 1) +
                            " completed at " +
                            std::to_string(violation->reduced_completion) +
                            " instead of " +
                            std::to_string(violation->full_completion));
                return o;
            }
        }
        if (any) ++systems;
    }
    if (systems < kPredictableSystems)
        fail(o, "only " + std::to_string(systems) + " feasible systems");
    if (o.pass)
        o.note = std::to_string(systems) + " systems / " + std::to_string(probes) +
                 " schedules x " + std::to_string(kReductionTrials) +
                 " reduced-demand runs, none later";
    return o;
}

Outcome criterion6() {
    Outcome o;

    // (a) closed form of the window start against plain enumeration
    Rng rng(0xACC60001);
    for (int i = 0; i < kStabilizationLists; ++i) {
        const int n = static_cast<int>(rng.uniform_int(1, 6));
        std::vector<OffsetPeriod> entries;
        for (int k = 0; k < n; ++k)
            entries.push_back(
                OffsetPeriod{rng.uniform_int(0, 60), rng.uniform_int(1, 40)});
        if (stabilization_points(entries) !=
            testutil::stabilization_by_enumeration(entries)) {
            fail(o, "window start disagrees with enumeration on list " +
                        std::to_string(i));
            return o;
        }
    }

    // (b) feasible verdicts stay clean for five extra hyperperiods
    int verified = 0;
    std::uint64_t salt = 0;
    const AnalysisLimits limits{5'000};
    while (verified < kExtendedVerdicts && salt < 40'000) {
        const int m = (salt % 2 == 0) ? 2 : 4;
        GenConfig cfg = suite_config(m, 0xACC60002u, salt++);
        cfg.hyperperiod_bound = 5'000;
        const TaskSystem sys = generate_system(cfg);
        Time max_d = 0;
        for (const Task& t : sys.tasks) max_d = std::max(max_d, t.deadline);

        const bool use_gang = salt % 3 == 0;
        const AnalysisVerdict verdict =
            use_gang ? gang_test(sys, dm_order(sys), limits)
                     : ftp_fsp_test(sys, dm_order(sys), im_within(sys), limits);
        if (!verdict.feasible) continue;

        const Time S = verdict.stabilization.back();
        const Time P = verdict.interval_end - S;
        SimOptions opt;
        opt.record_trace = false;
        opt.record_completions = false;
        opt.assert_window = S + 5 * P;
        const SimulationResult sim =
            use_gang
                ? simulate_gang(sys, dm_order(sys), S + 5 * P + max_d, nullptr, opt)
                : simulate_threads(
                      sys, flatten_hierarchical(sys, dm_order(sys), im_within(sys)),
                      S + 5 * P + max_d, nullptr, opt);
        if (!sim.misses.empty()) {
            fail(o, "seed " + std::to_string(cfg.seed) +
                        ": a miss appeared after the decision window");
            return o;
        }
        ++verified;
    }
    if (verified < kExtendedVerdicts)
        fail(o, "only " + std::to_string(verified) + " feasible verdicts re-checked");

    // (c) the hierarchical test equals the flat test on the flattened order
    Rng order_rng(0xACC60003);
    for (int i = 0; i < kEquivalenceSystems; ++i) {
        const GenConfig cfg = suite_config(i % 2 == 0 ? 2 : 4, 0xACC60004u,
                                           static_cast<std::uint64_t>(i));
        const TaskSystem sys = generate_system(cfg);
        auto task_order = testutil::random_task_order(sys, order_rng);
        auto within = im_within(sys);
        for (auto& w : within) testutil::shuffle(w, order_rng);

        const AnalysisLimits wide{10'000};
        const AnalysisVerdict hier = ftp_fsp_test(sys, task_order, within, wide);
        const AnalysisVerdict flat =
            fsp_test(sys, flatten_hierarchical(sys, task_order, within), wide);
        const bool same_miss =
            hier.feasible
                ? hier.wcrt == flat.wcrt
                : hier.first_miss->thread == flat.first_miss->thread &&
                      hier.first_miss->deadline == flat.first_miss->deadline &&
                      hier.first_miss->executed == flat.first_miss->executed;
        if (hier.feasible != flat.feasible || hier.interval_end != flat.interval_end ||
            !same_miss) {
            fail(o, "hierarchical and flat tests disagree on seed " +
                        std::to_string(cfg.seed));
            return o;
        }
    }

    if (o.pass)
        o.note = std::to_string(kStabilizationLists) + " window starts, " +
                 std::to_string(verified) + " extended re-checks, " +
                 std::to_string(kEquivalenceSystems) + " order equivalences";
    return o;
}

Outcome criterion7() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();

    ExperimentConfig cfg;
    cfg.platform_sizes = {2, 4, 8};
    cfg.count_per_cell = kStudySystemsPerPlatform / 5;  // five distributions per m
    cfg.seed = 1;
    cfg.jobs = 1;
    cfg.hyperperiod_bound = kStudyHyperperiodBound;
    const ExperimentResult result = run_experiment(cfg);

    // (i) aggregate success ratio: the thread policy dominates per bucket
    for (const SuccessBucket& b : success_table_normalized(result.records)) {
        if (b.total < kBucketMinSamples) continue;
        if (b.dmim < b.gang)
            fail(o, "bucket " + std::to_string(b.index) + ": dmim " +
                        std::to_string(b.dmim) + " < gang " + std::to_string(b.gang));
    }

    // (ii) the two policies are incomparable
    bool dmim_only = false, gang_only = false;
    for (const ExperimentRecord& r : result.records) {
        dmim_only |= r.dmim_feasible && !r.gang_feasible;
        gang_only |= r.gang_feasible && !r.dmim_feasible;
    }
    if (!dmim_only) fail(o, "no system feasible under dm-im only");
    if (!gang_only) fail(o, "no system feasible under gang-dm only");

    // (iii) response-time wins on the larger platforms
    int dmim_wins = 0, gang_wins = 0, considered = 0;
    for (int m : {4, 8}) {
        const WcrtComparison cmp = compare_wcrt(result.records, m);
        dmim_wins += cmp.dmim_wins;
        gang_wins += cmp.gang_wins;
        considered += cmp.considered;
    }
    if (dmim_wins <= gang_wins)
        fail(o, "dmim wins " + std::to_string(dmim_wins) + " vs gang " +
                    std::to_string(gang_wins) + " over " + std::to_string(considered));

    const double elapsed = seconds_since(start);
    if (elapsed >= kStudyTimeLimit)
        fail(o, "study took " + std::to_string(elapsed) + "s");
    if (o.pass) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "%zu systems; dominance per bucket; both-way examples; "
                      "wins %d vs %d of %d; %.1fs",
                      result.records.size(), dmim_wins, gang_wins, considered,
                      elapsed);
        o.note = buf;
    }
    return o;
}

Outcome criterion8() {
    Outcome o;

    int checked = 0;
    std::uint64_t cell = 0;
    for (int m : {1, 2, 4, 8, 16}) {
        for (Distribution dist : kAllDistributions) {
            GenConfig cfg;
            cfg.m = m;
            cfg.dist = dist;
            cfg.hyperperiod_bound = kConformanceHyperperiodBound;
            Rng rng(mix_seed(0xACC80001, cell++));
            for (int i = 0; i < kConformanceTasks / 25; ++i) {
                const Task t = generate_task(cfg, rng);
                const bool ok =
                    t.period >= 1 && t.period <= 250 && t.offset >= 1 &&
                    t.offset <= t.period && t.thread_count() >= 1 &&
                    t.thread_count() <= m && t.subprograms[0].wcet >= 1 &&
                    t.subprograms[0].wcet <= t.deadline && t.deadline <= t.period;
                if (!ok) {
                    fail(o, "task constraint violated (m=" + std::to_string(m) + ")");
                    return o;
                }
                ++checked;
            }
        }
    }

    for (int i = 0; i < kConformanceSystems; ++i) {
        GenConfig cfg;
        cfg.m = (i % 3 == 0) ? 2 : (i % 3 == 1) ? 4 : 8;
        cfg.dist = kAllDistributions[static_cast<std::size_t>(i) % 5];
        cfg.hyperperiod_bound = kConformanceHyperperiodBound;
        cfg.seed = mix_seed(0xACC80002, static_cast<std::uint64_t>(i));
        const TaskSystem sys = generate_system(cfg);
        if (total_utilization(sys) > Rational(cfg.m)) {
            fail(o, "system " + std::to_string(i) + " exceeds the platform capacity");
            return o;
        }
        if (hyperperiod(sys) > cfg.hyperperiod_bound) {
            fail(o, "system " + std::to_string(i) + " exceeds the hyperperiod bound");
            return o;
        }
        if (i % 5 == 0 &&
            system_to_json(generate_system(cfg)).dump() != system_to_json(sys).dump()) {
            fail(o, "seed " + std::to_string(cfg.seed) + " is not reproducible");
            return o;
        }
    }

    if (o.pass)
        o.note = std::to_string(checked) + " tasks conform; " +
                 std::to_string(kConformanceSystems) +
                 " systems within capacity and bound; regeneration byte-identical";
    return o;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* title;
        Outcome (*run)();
    };
    const Entry entries[] = {
        {1, "two-processor example", criterion1},
        {2, "three-processor example", criterion2},
        {3, "phased-task anomaly demo", criterion3},
        {4, "schedule periodicity", criterion4},
        {5, "reduced demands never finish later", criterion5},
        {6, "analysis window and test equivalence", criterion6},
        {7, "policy comparison study", criterion7},
        {8, "generator conformance", criterion8},
    };

    int failures = 0;
    for (const Entry& e : entries) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = e.run();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.note = std::string("exception: ") + ex.what();
        }
        const double elapsed = seconds_since(start);
        std::printf("%s criterion %d: %s - %s (%.1fs)\n", o.pass ? "PASS" : "FAIL",
                    e.id, e.title, o.note.c_str(), elapsed);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures;
}
