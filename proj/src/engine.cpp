#include "mtsched/engine.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

namespace mtsched {

namespace {

constexpr Time kHorizonLimit = Time{1} << 60;

void check_horizon(Time horizon) {
    if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
    if (horizon > kHorizonLimit) throw std::invalid_argument("horizon too large");
}

// Appends [begin, end) with the given assignment, merging with the previous
// segment when the assignment did not change.
struct TraceBuilder {
    bool enabled = false;
    std::vector<TraceSegment> segments;

    void emit(Time begin, Time end, const std::vector<TraceCell>& cells) {
        if (!enabled || begin == end) return;
        if (!segments.empty() && segments.back().end == begin &&
            segments.back().procs == cells) {
            segments.back().end = end;
        } else {
            segments.push_back(TraceSegment{begin, end, cells});
        }
    }
};

using ReleaseEvent = std::pair<Time, int>;  // (arrival, stream rank)
using ReleaseQueue = std::priority_queue<ReleaseEvent, std::vector<ReleaseEvent>,
                                         std::greater<>>;
// (deadline, stream rank, process)
using DeadlineEvent = std::tuple<Time, int, std::int64_t>;
using DeadlineQueue = std::priority_queue<DeadlineEvent, std::vector<DeadlineEvent>,
                                          std::greater<>>;

}  // namespace

TraceCell ScheduleTrace::at(Time t, int proc) const {
    if (t < 0 || t >= horizon || proc < 0 || proc >= processors)
        throw std::out_of_range("trace lookup outside the recorded schedule");
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](Time v, const TraceSegment& s) { return v < s.begin; });
    --it;
    return it->procs[proc];
}

SimulationResult simulate_threads(const TaskSystem& system,
                                  const SubprogramOrder& order, Time horizon,
                                  const ThreadDemands* demands,
                                  const SimOptions& options) {
    check_horizon(horizon);
    validate_subprogram_order(system, order);
    const int m = system.processors;
    const Time window = options.assert_window < 0 ? horizon : options.assert_window;

    struct ActiveJob {
        std::int64_t k;
        Time remaining;
        Time demand;
        bool asserted;
    };
    struct Stream {
        int task;
        int sub;
        Time offset, wcet, deadline, period;
        std::vector<ActiveJob> active;  // release order, oldest first
        std::int64_t next_k = 0;
    };

    std::vector<Stream> streams;
    streams.reserve(order.size());
    for (const SubRef& s : order) {
        const Task& t = system.tasks[s.task];
        streams.push_back(Stream{s.task, s.sub, t.offset, t.subprograms[s.sub].wcet,
                                 t.deadline, t.period, {}, 0});
    }

    SimulationResult result;
    result.task_wcrt.assign(system.task_count(), -1);

    // Threads still pending per asserted process, to detect process completion.
    std::vector<std::unordered_map<std::int64_t, int>> open(system.task_count());

    auto complete_thread = [&](int rank, std::int64_t k, Time at, bool asserted) {
        const Stream& st = streams[rank];
        if (options.record_completions)
            result.completions[ThreadKey{st.task, st.sub, k}] = at;
        if (!asserted) return;
        auto it = open[st.task].find(k);
        if (it != open[st.task].end() && --(it->second) == 0) {
            Time arrival = st.offset + k * st.period;
            result.task_wcrt[st.task] = std::max(result.task_wcrt[st.task], at - arrival);
            open[st.task].erase(it);
        }
    };

    ReleaseQueue releases;
    DeadlineQueue deadlines;
    std::set<int> nonempty;  // ranks with at least one active thread

    for (int r = 0; r < static_cast<int>(streams.size()); ++r)
        if (streams[r].offset < horizon) releases.emplace(streams[r].offset, r);

    auto release_job = [&](int rank, Time arrival) {
        Stream& st = streams[rank];
        const std::int64_t k = st.next_k++;
        Time demand = st.wcet;
        if (demands) {
            auto it = demands->find(ThreadKey{st.task, st.sub, k});
            if (it != demands->end()) {
                demand = it->second;
                if (demand < 0 || demand > st.wcet)
                    throw std::invalid_argument("thread demand outside [0, wcet]");
            }
        }
        const bool asserted = arrival < window;
        if (asserted) {
            // First thread of the process to arrive creates the counter; all
            // of them arrive at this same instant.
            open[st.task].try_emplace(k, system.tasks[st.task].thread_count());
            deadlines.emplace(arrival + st.deadline, rank, k);
        }
        if (demand == 0) {
            complete_thread(rank, k, arrival, asserted);
            return;
        }
        if (st.active.empty()) nonempty.insert(rank);
        st.active.push_back(ActiveJob{k, demand, demand, asserted});
    };

    bool stop = false;
    auto drain_deadlines = [&](Time upto) {
        while (!deadlines.empty() && std::get<0>(deadlines.top()) <= upto) {
            const Time d = std::get<0>(deadlines.top());
            std::vector<Miss> batch;
            while (!deadlines.empty() && std::get<0>(deadlines.top()) == d) {
                auto [at, rank, k] = deadlines.top();
                deadlines.pop();
                Stream& st = streams[rank];
                auto it = std::find_if(st.active.begin(), st.active.end(),
                                       [&](const ActiveJob& a) { return a.k == k; });
                if (it != st.active.end())
                    batch.push_back(Miss{ThreadKey{st.task, st.sub, k}, d,
                                         it->demand - it->remaining});
            }
            std::sort(batch.begin(), batch.end(),
                      [](const Miss& a, const Miss& b) { return a.thread < b.thread; });
            for (Miss& miss : batch) {
                result.misses.push_back(std::move(miss));
                if (options.stop_at_first_miss) stop = true;
            }
        }
    };

    TraceBuilder tb;
    tb.enabled = options.record_trace;
    std::vector<TraceCell> cells(m);
    std::vector<std::pair<int, int>> running;  // (rank, jobs taken from its front)
    running.reserve(m);

    Time t = 0;
    while (t < horizon) {
        while (!releases.empty() && releases.top().first <= t) {
            auto [at, rank] = releases.top();
            releases.pop();
            release_job(rank, at);
            const Time next = at + streams[rank].period;
            if (next < horizon) releases.emplace(next, rank);
        }
        drain_deadlines(t);
        if (stop) break;

        running.clear();
        int slots = m;
        Time min_remaining = std::numeric_limits<Time>::max();
        for (auto it = nonempty.begin(); it != nonempty.end() && slots > 0; ++it) {
            Stream& st = streams[*it];
            const int take = std::min<int>(slots, static_cast<int>(st.active.size()));
            for (int j = 0; j < take; ++j)
                min_remaining = std::min(min_remaining, st.active[j].remaining);
            running.emplace_back(*it, take);
            slots -= take;
        }

        const Time next_release = releases.empty() ? horizon
                                                   : std::min(horizon, releases.top().first);
        if (running.empty()) {
            if (tb.enabled) {
                std::fill(cells.begin(), cells.end(), TraceCell{});
                tb.emit(t, next_release, cells);
            }
            t = next_release;
            continue;
        }

        Time t_next = std::min(t + min_remaining, next_release);
        if (!deadlines.empty())
            t_next = std::min(t_next, std::get<0>(deadlines.top()));

        if (tb.enabled) {
            std::fill(cells.begin(), cells.end(), TraceCell{});
            int p = 0;
            for (auto [rank, taken] : running) {
                const Stream& st = streams[rank];
                for (int j = 0; j < taken; ++j, ++p)
                    cells[p] = TraceCell{st.task, st.sub, st.active[j].k};
            }
            tb.emit(t, t_next, cells);
        }

        const Time delta = t_next - t;
        for (auto [rank, taken] : running) {
            Stream& st = streams[rank];
            bool finished = false;
            for (int j = 0; j < taken; ++j) {
                st.active[j].remaining -= delta;
                if (st.active[j].remaining == 0) finished = true;
            }
            if (!finished) continue;
            for (int j = 0; j < taken; ++j)
                if (st.active[j].remaining == 0)
                    complete_thread(rank, st.active[j].k, t_next, st.active[j].asserted);
            st.active.erase(std::remove_if(st.active.begin(), st.active.begin() + taken,
                                           [](const ActiveJob& a) { return a.remaining == 0; }),
                            st.active.begin() + taken);
            if (st.active.empty()) nonempty.erase(rank);
        }
        t = t_next;
    }
    drain_deadlines(t);

    result.stopped_early = stop;
    result.trace.processors = m;
    result.trace.horizon = options.record_trace ? t : 0;
    result.trace.segments = std::move(tb.segments);
    return result;
}

SimulationResult simulate_gang(const TaskSystem& system, const TaskOrder& order,
                               Time horizon, const ProcessDemands* demands,
                               const SimOptions& options) {
    check_horizon(horizon);
    validate_task_order(system, order);
    const int m = system.processors;
    for (const Task& task : system.tasks) {
        if (task.thread_count() > m)
            throw std::invalid_argument("gang task wider than the platform");
        for (const Subprogram& q : task.subprograms)
            if (q.wcet != task.subprograms[0].wcet)
                throw std::invalid_argument("gang tasks need equal wcets across subprograms");
    }
    const Time window = options.assert_window < 0 ? horizon : options.assert_window;

    struct ActiveProc {
        std::int64_t k;
        Time remaining;
        Time demand;
        bool asserted;
    };
    struct Stream {
        int task;
        Time offset, wcet, deadline, period;
        int width;
        std::vector<ActiveProc> active;
        std::int64_t next_k = 0;
    };

    std::vector<Stream> streams;
    streams.reserve(order.size());
    for (int taskIdx : order) {
        const Task& t = system.tasks[taskIdx];
        streams.push_back(Stream{taskIdx, t.offset, t.subprograms[0].wcet, t.deadline,
                                 t.period, t.thread_count(), {}, 0});
    }

    SimulationResult result;
    result.task_wcrt.assign(system.task_count(), -1);

    auto complete_process = [&](int rank, std::int64_t k, Time at, bool asserted) {
        const Stream& st = streams[rank];
        if (options.record_completions)
            for (int j = 0; j < st.width; ++j)
                result.completions[ThreadKey{st.task, j, k}] = at;
        if (asserted) {
            Time arrival = st.offset + k * st.period;
            result.task_wcrt[st.task] = std::max(result.task_wcrt[st.task], at - arrival);
        }
    };

    ReleaseQueue releases;
    DeadlineQueue deadlines;
    std::set<int> nonempty;

    for (int r = 0; r < static_cast<int>(streams.size()); ++r)
        if (streams[r].offset < horizon) releases.emplace(streams[r].offset, r);

    auto release_process = [&](int rank, Time arrival) {
        Stream& st = streams[rank];
        const std::int64_t k = st.next_k++;
        Time demand = st.wcet;
        if (demands) {
            auto it = demands->find(ProcessKey{st.task, k});
            if (it != demands->end()) {
                demand = it->second;
                if (demand < 0 || demand > st.wcet)
                    throw std::invalid_argument("process demand outside [0, wcet]");
            }
        }
        const bool asserted = arrival < window;
        if (asserted) deadlines.emplace(arrival + st.deadline, rank, k);
        if (demand == 0) {
            complete_process(rank, k, arrival, asserted);
            return;
        }
        if (st.active.empty()) nonempty.insert(rank);
        st.active.push_back(ActiveProc{k, demand, demand, asserted});
    };

    bool stop = false;
    auto drain_deadlines = [&](Time upto) {
        while (!deadlines.empty() && std::get<0>(deadlines.top()) <= upto) {
            const Time d = std::get<0>(deadlines.top());
            std::vector<Miss> batch;
            while (!deadlines.empty() && std::get<0>(deadlines.top()) == d) {
                auto [at, rank, k] = deadlines.top();
                deadlines.pop();
                Stream& st = streams[rank];
                auto it = std::find_if(st.active.begin(), st.active.end(),
                                       [&](const ActiveProc& a) { return a.k == k; });
                if (it != st.active.end())
                    batch.push_back(Miss{ThreadKey{st.task, 0, k}, d,
                                         it->demand - it->remaining});
            }
            std::sort(batch.begin(), batch.end(),
                      [](const Miss& a, const Miss& b) { return a.thread < b.thread; });
            for (Miss& miss : batch) {
                result.misses.push_back(std::move(miss));
                if (options.stop_at_first_miss) stop = true;
            }
        }
    };

    TraceBuilder tb;
    tb.enabled = options.record_trace;
    std::vector<TraceCell> cells(m);
    std::vector<std::pair<int, int>> running;  // (rank, index into active)
    running.reserve(m);

    Time t = 0;
    while (t < horizon) {
        while (!releases.empty() && releases.top().first <= t) {
            auto [at, rank] = releases.top();
            releases.pop();
            release_process(rank, at);
            const Time next = at + streams[rank].period;
            if (next < horizon) releases.emplace(next, rank);
        }
        drain_deadlines(t);
        if (stop) break;

        running.clear();
        int free_procs = m;
        Time min_remaining = std::numeric_limits<Time>::max();
        for (auto it = nonempty.begin(); it != nonempty.end() && free_procs > 0; ++it) {
            Stream& st = streams[*it];
            for (int j = 0; j < static_cast<int>(st.active.size()) &&
                            free_procs >= st.width;
                 ++j) {
                running.emplace_back(*it, j);
                free_procs -= st.width;
                min_remaining = std::min(min_remaining, st.active[j].remaining);
            }
        }

        const Time next_release = releases.empty() ? horizon
                                                   : std::min(horizon, releases.top().first);
        if (running.empty()) {
            if (tb.enabled) {
                std::fill(cells.begin(), cells.end(), TraceCell{});
                tb.emit(t, next_release, cells);
            }
            t = next_release;
            continue;
        }

        Time t_next = std::min(t + min_remaining, next_release);
        if (!deadlines.empty())
            t_next = std::min(t_next, std::get<0>(deadlines.top()));

        if (tb.enabled) {
            std::fill(cells.begin(), cells.end(), TraceCell{});
            int p = 0;
            for (auto [rank, j] : running) {
                const Stream& st = streams[rank];
                for (int sub = 0; sub < st.width; ++sub, ++p)
                    cells[p] = TraceCell{st.task, sub, st.active[j].k};
            }
            tb.emit(t, t_next, cells);
        }

        const Time delta = t_next - t;
        for (auto [rank, j] : running) streams[rank].active[j].remaining -= delta;
        for (auto [rank, j] : running) {
            (void)j;
            Stream& st = streams[rank];
            if (st.active.empty()) continue;
            bool finished = false;
            for (const ActiveProc& a : st.active)
                if (a.remaining == 0) finished = true;
            if (!finished) continue;
            for (const ActiveProc& a : st.active)
                if (a.remaining == 0) complete_process(rank, a.k, t_next, a.asserted);
            st.active.erase(std::remove_if(st.active.begin(), st.active.end(),
                                           [](const ActiveProc& a) { return a.remaining == 0; }),
                            st.active.end());
            if (st.active.empty()) nonempty.erase(rank);
        }
        t = t_next;
    }
    drain_deadlines(t);

    result.stopped_early = stop;
    result.trace.processors = m;
    result.trace.horizon = options.record_trace ? t : 0;
    result.trace.segments = std::move(tb.segments);
    return result;
}

}  // namespace mtsched
