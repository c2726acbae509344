#include "mtsched/multiphase.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mtsched {

MultiPhaseTask::MultiPhaseTask(Time offset_, std::vector<std::vector<Time>> phases_,
                               Time deadline_, Time period_)
    : offset(offset_), phases(std::move(phases_)), deadline(deadline_), period(period_) {
    if (offset < 0) throw std::invalid_argument("offset must be non-negative");
    if (phases.empty()) throw std::invalid_argument("need at least one phase");
    for (const auto& phase : phases) {
        if (phase.empty()) throw std::invalid_argument("empty phase");
        for (Time c : phase)
            if (c < 1) throw std::invalid_argument("wcet must be at least 1");
    }
    if (deadline < 1 || period < deadline)
        throw std::invalid_argument("need 1 <= deadline <= period");
}

int MultiPhaseTask::thread_count() const {
    int n = 0;
    for (const auto& phase : phases) n += static_cast<int>(phase.size());
    return n;
}

int MultiPhaseTask::flat_index(int phase, int sub) const {
    int n = 0;
    for (int j = 0; j < phase; ++j) n += static_cast<int>(phases[j].size());
    return n + sub;
}

namespace {

struct Proc {
    std::int64_t k = 0;
    Time arrival = 0;
    int phase = 0;
    std::vector<Time> remaining;  // threads of the current phase
    bool asserted = false;
    bool done = false;
    bool miss_checked = false;
    Time executed = 0;
};

}  // namespace

SimulationResult simulate_multiphase(const std::vector<MultiPhaseTask>& tasks,
                                     const TaskOrder& order, int processors,
                                     Time horizon, const PhaseDemands* demands,
                                     const SimOptions& options) {
    if (processors < 1) throw std::invalid_argument("need at least one processor");
    if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
    {
        std::vector<int> seen(tasks.size(), 0);
        if (order.size() != tasks.size())
            throw std::invalid_argument("order must cover every task exactly once");
        for (int idx : order) {
            if (idx < 0 || idx >= static_cast<int>(tasks.size()) || seen[idx]++)
                throw std::invalid_argument("order must cover every task exactly once");
        }
    }
    const int m = processors;
    const Time window = options.assert_window < 0 ? horizon : options.assert_window;

    SimulationResult result;
    result.task_wcrt.assign(static_cast<int>(tasks.size()), -1);

    struct Stream {
        int task;
        const MultiPhaseTask* def;
        std::int64_t next_k = 0;
        std::vector<Proc> procs;  // release order, oldest first
    };
    std::vector<Stream> streams;
    streams.reserve(order.size());
    for (int idx : order) streams.push_back(Stream{idx, &tasks[idx], 0, {}});

    auto phase_demand = [&](const Stream& st, std::int64_t k, int phase, int sub) {
        Time demand = st.def->phases[phase][sub];
        if (demands) {
            auto it = demands->find(PhaseThreadKey{st.task, phase, sub, k});
            if (it != demands->end()) {
                demand = it->second;
                if (demand < 0 || demand > st.def->phases[phase][sub])
                    throw std::invalid_argument("thread demand outside [0, wcet]");
            }
        }
        return demand;
    };

    // Loads proc.phase's demands, skipping over phases that are entirely
    // zero; marks the process done after the last phase.
    auto load_phase = [&](Stream& st, Proc& p, Time now) {
        while (!p.done) {
            if (p.phase == st.def->phase_count()) {
                p.done = true;
                if (p.asserted)
                    result.task_wcrt[st.task] =
                        std::max(result.task_wcrt[st.task], now - p.arrival);
                return;
            }
            const auto& wcets = st.def->phases[p.phase];
            p.remaining.assign(wcets.size(), 0);
            bool any = false;
            for (int s = 0; s < static_cast<int>(wcets.size()); ++s) {
                p.remaining[s] = phase_demand(st, p.k, p.phase, s);
                if (p.remaining[s] > 0) any = true;
                else if (options.record_completions)
                    result.completions[ThreadKey{st.task, st.def->flat_index(p.phase, s),
                                                 p.k}] = now;
            }
            if (any) return;
            ++p.phase;
        }
    };

    TraceCell idle{};
    std::vector<TraceCell> cells(m);
    std::vector<TraceSegment> segments;
    auto emit = [&](Time begin, Time end) {
        if (!options.record_trace || begin == end) return;
        if (!segments.empty() && segments.back().end == begin &&
            segments.back().procs == cells) {
            segments.back().end = end;
        } else {
            segments.push_back(TraceSegment{begin, end, cells});
        }
    };

    struct Running {
        Stream* st;
        Proc* p;
        int sub;
    };
    std::vector<Running> running;

    bool stop = false;
    auto drain_misses = [&](Time upto) {
        struct Pending {
            Time deadline;
            int rank;
            std::int64_t k;
        };
        std::vector<Pending> batch;
        for (int r = 0; r < static_cast<int>(streams.size()); ++r)
            for (Proc& p : streams[r].procs)
                if (p.asserted && !p.done && !p.miss_checked &&
                    p.arrival + streams[r].def->deadline <= upto)
                    batch.push_back({p.arrival + streams[r].def->deadline, r, p.k});
        std::sort(batch.begin(), batch.end(), [](const Pending& a, const Pending& b) {
            return std::tie(a.deadline, a.rank, a.k) < std::tie(b.deadline, b.rank, b.k);
        });
        for (const Pending& pe : batch) {
            Stream& st = streams[pe.rank];
            auto it = std::find_if(st.procs.begin(), st.procs.end(),
                                   [&](const Proc& p) { return p.k == pe.k; });
            it->miss_checked = true;
            result.misses.push_back(Miss{ThreadKey{st.task, 0, pe.k}, pe.deadline,
                                         it->executed});
            if (options.stop_at_first_miss) stop = true;
        }
    };

    Time t = 0;
    while (t < horizon) {
        // releases due now
        for (Stream& st : streams) {
            for (;;) {
                const Time arrival = st.def->offset + st.next_k * st.def->period;
                if (arrival > t || arrival >= horizon) break;
                Proc p;
                p.k = st.next_k++;
                p.arrival = arrival;
                p.asserted = arrival < window;
                st.procs.push_back(std::move(p));
                load_phase(st, st.procs.back(), arrival);
            }
        }
        drain_misses(t);
        if (stop) break;

        for (Stream& st : streams)
            std::erase_if(st.procs, [](const Proc& p) { return p.done; });

        // the m highest priority active threads, by (rank, process, thread)
        running.clear();
        Time min_remaining = std::numeric_limits<Time>::max();
        for (Stream& st : streams) {
            for (Proc& p : st.procs) {
                if (p.done) continue;
                for (int s = 0; s < static_cast<int>(p.remaining.size()) &&
                                static_cast<int>(running.size()) < m;
                     ++s) {
                    if (p.remaining[s] == 0) continue;
                    running.push_back(Running{&st, &p, s});
                    min_remaining = std::min(min_remaining, p.remaining[s]);
                }
            }
            if (static_cast<int>(running.size()) == m) break;
        }

        Time next_release = horizon;
        for (Stream& st : streams) {
            const Time arrival = st.def->offset + st.next_k * st.def->period;
            if (arrival < next_release) next_release = arrival;
        }
        Time next_deadline = horizon;
        for (Stream& st : streams)
            for (Proc& p : st.procs)
                if (p.asserted && !p.done && !p.miss_checked)
                    next_deadline = std::min(next_deadline, p.arrival + st.def->deadline);

        if (running.empty()) {
            std::fill(cells.begin(), cells.end(), idle);
            Time t_next = std::min(next_release, next_deadline);
            emit(t, t_next);
            t = t_next;
            continue;
        }

        Time t_next = std::min({t + min_remaining, next_release, next_deadline});
        if (options.record_trace) {
            std::fill(cells.begin(), cells.end(), idle);
            for (int i = 0; i < static_cast<int>(running.size()); ++i) {
                const Running& r = running[i];
                cells[i] = TraceCell{r.st->task,
                                     r.st->def->flat_index(r.p->phase, r.sub), r.p->k};
            }
        }
        emit(t, t_next);

        const Time delta = t_next - t;
        for (const Running& r : running) {
            r.p->remaining[r.sub] -= delta;
            r.p->executed += delta;
            if (r.p->remaining[r.sub] == 0 && options.record_completions)
                result.completions[ThreadKey{
                    r.st->task, r.st->def->flat_index(r.p->phase, r.sub), r.p->k}] = t_next;
        }
        for (const Running& r : running) {
            if (r.p->done || r.p->phase >= r.st->def->phase_count()) continue;
            bool all_done = std::all_of(r.p->remaining.begin(), r.p->remaining.end(),
                                        [](Time x) { return x == 0; });
            if (all_done) {
                ++r.p->phase;
                load_phase(*r.st, *r.p, t_next);
            }
        }
        t = t_next;
    }
    drain_misses(t);

    result.stopped_early = stop;
    result.trace.processors = m;
    result.trace.horizon = options.record_trace ? t : 0;
    result.trace.segments = std::move(segments);
    return result;
}

UnpredictabilityDemo unpredictability_demo() {
    UnpredictabilityDemo demo;
    demo.tasks.push_back(MultiPhaseTask(0, {{2}, {2, 2, 2}}, 100, 100));
    demo.tasks.push_back(MultiPhaseTask(1, {{1}}, 100, 100));
    demo.processors = 3;
    demo.observer = ThreadKey{1, 0, 0};
    demo.reduced_job = PhaseThreadKey{0, 0, 0, 0};
    demo.reduced_demand = 1;

    const TaskOrder order{0, 1};
    const Time horizon = 16;

    SimulationResult full = simulate_multiphase(demo.tasks, order, demo.processors,
                                                horizon);
    PhaseDemands reduced_demands{{demo.reduced_job, demo.reduced_demand}};
    SimulationResult reduced = simulate_multiphase(demo.tasks, order, demo.processors,
                                                   horizon, &reduced_demands);

    demo.full_completion = full.completions.at(demo.observer);
    demo.reduced_completion = reduced.completions.at(demo.observer);
    demo.anomaly = demo.reduced_completion > demo.full_completion;
    return demo;
}

}  // namespace mtsched
