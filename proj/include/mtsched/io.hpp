#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtsched/analysis.hpp"
#include "mtsched/experiment.hpp"
#include "mtsched/model.hpp"
#include "mtsched/schedulers.hpp"

namespace mtsched {

// Raised for malformed input; the message names the offending field.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// System files are JSON objects:
//   {"m": 2, "tasks": [{"offset": 0, "wcets": [2, 2], "deadline": 12,
//                       "period": 12}, ...]}
// The order of "wcets" is the task's subprogram index order.
TaskSystem system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const TaskSystem& system);
TaskSystem load_system(const std::filesystem::path& path);
void save_system(const std::filesystem::path& path, const TaskSystem& system);

// Named policies: dm-im, rm-im, lsf, gang-dm, gang-rm.
SchedulerSpec make_scheduler(const TaskSystem& system, const std::string& name);

// Explicit global thread-priority order, e.g. "1.1,3.2,2.1" (1-based
// task.subprogram pairs covering every subprogram exactly once).
SchedulerSpec scheduler_from_order(const TaskSystem& system, const std::string& list);

// The exact priority assignment a spec resolves to, with 1-based indices.
nlohmann::json scheduler_to_json(const SchedulerSpec& spec, const TaskSystem& system);
nlohmann::json verdict_to_json(const AnalysisVerdict& verdict);

// One row per instant: t, then one cell per processor, `task.sub.process`
// (1-based) or `-` when idle.
void write_trace_csv(std::ostream& out, const ScheduleTrace& trace);

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
void write_success_csv(std::ostream& out, const std::vector<SuccessBucket>& buckets);
void write_wcrt_csv(std::ostream& out,
                    const std::vector<std::pair<int, WcrtComparison>>& rows);

}  // namespace mtsched
