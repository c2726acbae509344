#include "mtsched/experiment.hpp"

#include <atomic>
#include <stdexcept>
#include <thread>

#include "mtsched/rng.hpp"
#include "mtsched/schedulers.hpp"

namespace mtsched {

ExperimentRecord analyze_generated(const ExperimentConfig& cfg, std::int64_t id,
                                   int m, Distribution dist) {
    GenConfig gen;
    gen.m = m;
    gen.dist = dist;
    gen.period_min = cfg.period_min;
    gen.period_max = cfg.period_max;
    gen.hyperperiod_bound = cfg.hyperperiod_bound;
    gen.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(id));

    const TaskSystem system = generate_system(gen);

    ExperimentRecord rec;
    rec.id = id;
    rec.seed = gen.seed;
    rec.m = m;
    rec.dist = dist;
    rec.utilization = total_utilization(system);
    rec.tasks = system.task_count();

    const AnalysisLimits limits{cfg.hyperperiod_bound};
    const TaskOrder dm = dm_order(system);
    const AnalysisVerdict thread_verdict =
        ftp_fsp_test(system, dm, im_within(system), limits);
    const AnalysisVerdict gang_verdict = gang_test(system, dm, limits);

    rec.dmim_feasible = thread_verdict.feasible;
    rec.gang_feasible = gang_verdict.feasible;
    rec.lowest_task = dm.back();
    if (thread_verdict.feasible && gang_verdict.feasible) {
        rec.dmim_wcrt = thread_verdict.wcrt[rec.lowest_task];
        rec.gang_wcrt = gang_verdict.wcrt[rec.lowest_task];
    }
    return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.count_per_cell < 0) throw std::invalid_argument("negative count");
    struct Cell {
        int m;
        Distribution dist;
    };
    std::vector<Cell> cells;
    for (int m : cfg.platform_sizes)
        for (Distribution dist : cfg.distributions) cells.push_back({m, dist});

    const std::int64_t total =
        static_cast<std::int64_t>(cells.size()) * cfg.count_per_cell;
    ExperimentResult result;
    result.records.resize(static_cast<std::size_t>(total));

    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::int64_t id = next.fetch_add(1);
            if (id >= total) return;
            const Cell& cell = cells[static_cast<std::size_t>(id / cfg.count_per_cell)];
            result.records[static_cast<std::size_t>(id)] =
                analyze_generated(cfg, id, cell.m, cell.dist);
        }
    };

    const int jobs = std::max(1, cfg.jobs);
    std::vector<std::thread> pool;
    for (int i = 1; i < jobs; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool) th.join();
    return result;
}

namespace {

constexpr int kBuckets = 20;

// Bucket i covers [i*width, (i+1)*width); utilization exactly at capacity
// lands in the last bucket.
int bucket_of(const Rational& utilization, int m) {
    const Rational scaled = utilization * 20 / m;
    auto idx = static_cast<int>(scaled.numerator() / scaled.denominator());
    if (idx >= kBuckets) idx = kBuckets - 1;
    if (idx < 0) idx = 0;
    return idx;
}

std::vector<SuccessBucket> make_buckets(const Rational& width) {
    std::vector<SuccessBucket> buckets(kBuckets);
    for (int i = 0; i < kBuckets; ++i) {
        buckets[i].index = i;
        buckets[i].lo = width * i;
        buckets[i].hi = width * (i + 1);
    }
    return buckets;
}

void count_into(std::vector<SuccessBucket>& buckets, const ExperimentRecord& rec,
                int bucket) {
    SuccessBucket& b = buckets[static_cast<std::size_t>(bucket)];
    ++b.total;
    if (rec.dmim_feasible) ++b.dmim;
    if (rec.gang_feasible) ++b.gang;
    if (rec.dmim_feasible && rec.gang_feasible) ++b.both;
}

}  // namespace

std::vector<SuccessBucket> success_table(const std::vector<ExperimentRecord>& records,
                                         int m) {
    std::vector<SuccessBucket> buckets = make_buckets(Rational(m, kBuckets));
    for (const ExperimentRecord& rec : records) {
        if (rec.m != m) continue;
        count_into(buckets, rec, bucket_of(rec.utilization, m));
    }
    return buckets;
}

std::vector<SuccessBucket> success_table_normalized(
    const std::vector<ExperimentRecord>& records) {
    std::vector<SuccessBucket> buckets = make_buckets(Rational(1, kBuckets));
    for (const ExperimentRecord& rec : records)
        count_into(buckets, rec, bucket_of(rec.utilization, rec.m));
    return buckets;
}

WcrtComparison compare_wcrt(const std::vector<ExperimentRecord>& records, int m) {
    WcrtComparison cmp;
    const Rational lo(m, 4);       // m/4
    const Rational hi(9 * m, 10);  // 9m/10
    for (const ExperimentRecord& rec : records) {
        if (rec.m != m || !rec.dmim_feasible || !rec.gang_feasible) continue;
        if (!(rec.utilization > lo && rec.utilization < hi)) continue;
        ++cmp.considered;
        if (rec.dmim_wcrt < rec.gang_wcrt)
            ++cmp.dmim_wins;
        else if (rec.gang_wcrt < rec.dmim_wcrt)
            ++cmp.gang_wins;
        else
            ++cmp.ties;
    }
    return cmp;
}

}  // namespace mtsched
