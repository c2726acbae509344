#include "mtsched/io.hpp"

#include <boost/rational.hpp>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace mtsched {

namespace {

const nlohmann::json& expect_field(const nlohmann::json& j, const char* field,
                                   const std::string& where) {
    auto it = j.find(field);
    if (it == j.end()) throw ParseError(where + ": missing field \"" + field + "\"");
    return *it;
}

Time expect_int(const nlohmann::json& j, const char* field, const std::string& where) {
    const nlohmann::json& v = expect_field(j, field, where);
    if (!v.is_number_integer())
        throw ParseError(where + ": field \"" + field + "\" must be an integer");
    return v.get<Time>();
}

}  // namespace

TaskSystem system_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("top level: expected a JSON object");
    const Time m = expect_int(j, "m", "top level");
    const nlohmann::json& tasks = expect_field(j, "tasks", "top level");
    if (!tasks.is_array())
        throw ParseError("top level: field \"tasks\" must be an array");

    std::vector<Task> parsed;
    parsed.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const std::string where = "tasks[" + std::to_string(i) + "]";
        const nlohmann::json& t = tasks[i];
        if (!t.is_object()) throw ParseError(where + ": expected a JSON object");
        const Time offset = expect_int(t, "offset", where);
        const nlohmann::json& wcets = expect_field(t, "wcets", where);
        if (!wcets.is_array())
            throw ParseError(where + ": field \"wcets\" must be an array");
        std::vector<Time> ws;
        ws.reserve(wcets.size());
        for (std::size_t s = 0; s < wcets.size(); ++s) {
            if (!wcets[s].is_number_integer())
                throw ParseError(where + ".wcets[" + std::to_string(s) +
                                 "]: must be an integer");
            ws.push_back(wcets[s].get<Time>());
        }
        const Time deadline = expect_int(t, "deadline", where);
        const Time period = expect_int(t, "period", where);
        try {
            parsed.emplace_back(offset, std::move(ws), deadline, period);
        } catch (const std::invalid_argument& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    try {
        return TaskSystem(std::move(parsed), static_cast<int>(m));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("top level: ") + e.what());
    }
}

nlohmann::json system_to_json(const TaskSystem& system) {
    nlohmann::json tasks = nlohmann::json::array();
    for (const Task& t : system.tasks) {
        nlohmann::json wcets = nlohmann::json::array();
        for (const Subprogram& q : t.subprograms) wcets.push_back(q.wcet);
        tasks.push_back({{"offset", t.offset},
                         {"wcets", std::move(wcets)},
                         {"deadline", t.deadline},
                         {"period", t.period}});
    }
    return {{"m", system.processors}, {"tasks", std::move(tasks)}};
}

TaskSystem load_system(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return system_from_json(j);
}

void save_system(const std::filesystem::path& path, const TaskSystem& system) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << system_to_json(system).dump(2) << '\n';
}

SchedulerSpec make_scheduler(const TaskSystem& system, const std::string& name) {
    if (name == "dm-im") return HierarchicalSpec{dm_order(system), im_within(system)};
    if (name == "rm-im") return HierarchicalSpec{rm_order(system), im_within(system)};
    if (name == "lsf") return GlobalFspSpec{lsf_global(system)};
    if (name == "gang-dm") return GangSpec{dm_order(system)};
    if (name == "gang-rm") return GangSpec{rm_order(system)};
    throw ParseError("unknown scheduler \"" + name +
                     "\" (expected dm-im, rm-im, lsf, gang-dm, or gang-rm)");
}

SchedulerSpec scheduler_from_order(const TaskSystem& system, const std::string& list) {
    SubprogramOrder order;
    std::istringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto dot = item.find('.');
        if (dot == std::string::npos)
            throw ParseError("order item \"" + item + "\": expected task.subprogram");
        int task = 0, sub = 0;
        try {
            task = std::stoi(item.substr(0, dot));
            sub = std::stoi(item.substr(dot + 1));
        } catch (const std::exception&) {
            throw ParseError("order item \"" + item + "\": expected task.subprogram");
        }
        order.push_back(SubRef{task - 1, sub - 1});
    }
    try {
        validate_subprogram_order(system, order);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("order: ") + e.what());
    }
    return GlobalFspSpec{std::move(order)};
}

nlohmann::json scheduler_to_json(const SchedulerSpec& spec, const TaskSystem& system) {
    nlohmann::json order = nlohmann::json::array();
    if (const auto* gang = std::get_if<GangSpec>(&spec)) {
        for (int task : gang->task_order) order.push_back(task + 1);
        return {{"mode", "gang"}, {"order", std::move(order)}};
    }
    SubprogramOrder flat;
    if (const auto* h = std::get_if<HierarchicalSpec>(&spec))
        flat = flatten_hierarchical(system, h->task_order, h->within);
    else
        flat = std::get<GlobalFspSpec>(spec).order;
    for (const SubRef& s : flat)
        order.push_back(nlohmann::json::array({s.task + 1, s.sub + 1}));
    return {{"mode", "threads"}, {"order", std::move(order)}};
}

nlohmann::json verdict_to_json(const AnalysisVerdict& verdict) {
    nlohmann::json j{{"feasible", verdict.feasible},
                     {"interval_end", verdict.interval_end},
                     {"stabilization", verdict.stabilization},
                     {"assumes_constant_wcet", verdict.assumes_constant_wcet}};
    if (verdict.feasible) {
        j["wcrt"] = verdict.wcrt;
    } else {
        const Miss& miss = *verdict.first_miss;
        j["first_miss"] = {{"task", miss.thread.task + 1},
                           {"sub", miss.thread.sub + 1},
                           {"process", miss.thread.process + 1},
                           {"at", miss.deadline},
                           {"executed", miss.executed}};
    }
    return j;
}

void write_trace_csv(std::ostream& out, const ScheduleTrace& trace) {
    out << 't';
    for (int p = 0; p < trace.processors; ++p) out << ",proc" << p;
    out << '\n';
    for (const TraceSegment& seg : trace.segments) {
        for (Time t = seg.begin; t < seg.end; ++t) {
            out << t;
            for (const TraceCell& cell : seg.procs) {
                out << ',';
                if (cell.idle())
                    out << '-';
                else
                    out << cell.task + 1 << '.' << cell.sub + 1 << '.'
                        << cell.process + 1;
            }
            out << '\n';
        }
    }
}

namespace {

double to_double(const Rational& q) { return boost::rational_cast<double>(q); }

}  // namespace

void write_records_csv(std::ostream& out,
                       const std::vector<ExperimentRecord>& records) {
    out << "id,seed,m,dist,utilization,util_num,util_den,tasks,"
           "dmim_feasible,gang_feasible,lowest_task,dmim_wcrt,gang_wcrt\n";
    for (const ExperimentRecord& r : records) {
        out << r.id << ',' << r.seed << ',' << r.m << ','
            << distribution_name(r.dist) << ',' << std::setprecision(10)
            << to_double(r.utilization) << ',' << r.utilization.numerator() << ','
            << r.utilization.denominator() << ',' << r.tasks << ','
            << (r.dmim_feasible ? 1 : 0) << ',' << (r.gang_feasible ? 1 : 0) << ','
            << r.lowest_task + 1 << ',';
        if (r.dmim_feasible && r.gang_feasible)
            out << r.dmim_wcrt << ',' << r.gang_wcrt;
        else
            out << ',';
        out << '\n';
    }
}

void write_success_csv(std::ostream& out, const std::vector<SuccessBucket>& buckets) {
    out << "bucket,lo,hi,total,dmim,gang,both,dmim_ratio,gang_ratio,both_ratio\n";
    for (const SuccessBucket& b : buckets) {
        out << b.index << ',' << std::setprecision(10) << to_double(b.lo) << ','
            << to_double(b.hi) << ',' << b.total << ',' << b.dmim << ',' << b.gang
            << ',' << b.both;
        if (b.total > 0) {
            const double n = b.total;
            out << ',' << b.dmim / n << ',' << b.gang / n << ',' << b.both / n;
        } else {
            out << ",,,";
        }
        out << '\n';
    }
}

void write_wcrt_csv(std::ostream& out,
                    const std::vector<std::pair<int, WcrtComparison>>& rows) {
    out << "m,considered,dmim_wins,gang_wins,ties\n";
    for (const auto& [m, cmp] : rows)
        out << m << ',' << cmp.considered << ',' << cmp.dmim_wins << ','
            << cmp.gang_wins << ',' << cmp.ties << '\n';
}

}  // namespace mtsched
