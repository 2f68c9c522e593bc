#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "m3sim/time_series.hpp"

namespace m3sim {

/// Piecewise-constant per-core demand.
struct Fragment {
    Seconds duration = 0;
    double utilization = 0.0;  // in [0, 1]

    friend bool operator==(const Fragment&, const Fragment&) = default;
};

struct Task {
    std::uint64_t id = 0;
    Seconds submit_time = 0;
    int cpu_count = 1;
    std::vector<Fragment> fragments;

    Seconds total_duration() const noexcept;
    /// Sum over fragments of duration * utilization * cpu_count.
    double cpu_seconds() const noexcept;

    friend bool operator==(const Task&, const Task&) = default;
};

/// Validated, immutable list of tasks sorted by (submit_time, id).
class WorkloadTrace {
public:
    /// Validates every task and sorts. Throws ValidationError naming the invariant.
    explicit WorkloadTrace(std::vector<Task> tasks);

    const std::vector<Task>& tasks() const noexcept { return tasks_; }
    std::size_t size() const noexcept { return tasks_.size(); }

    friend bool operator==(const WorkloadTrace&, const WorkloadTrace&) = default;

private:
    std::vector<Task> tasks_;
};

struct CarbonTrace {
    std::string location;
    TimeSeries series;  // unit gram_co2_per_kwh
};

struct HostSpec {
    std::uint64_t id = 0;
    int core_count = 1;
    double core_speed_mhz = 0.0;  // informational
    double memory_mib = 0.0;      // informational
};

inline constexpr Seconds kDefaultCarbonStep = 900;

/// Workload CSV: `id,submit_time,cpu_count,duration,cpu_usage`, one row per
/// fragment. Rows sharing an id form that task's fragments in row order.
WorkloadTrace load_workload(const std::filesystem::path& path);
WorkloadTrace parse_workload(std::string_view text, const std::string& source = "<memory>");
void write_workload(const WorkloadTrace& trace, const std::filesystem::path& path);

/// Carbon CSV: `timestamp,carbon_intensity` with uniformly spaced timestamps.
CarbonTrace load_carbon(const std::filesystem::path& path, std::string location);
CarbonTrace parse_carbon(std::string_view text, std::string location,
                         const std::string& source = "<memory>");
void write_carbon(const CarbonTrace& trace, const std::filesystem::path& path);

/// Every `*.csv` in `dir`, keyed by file stem (e.g. NL.csv -> "NL").
std::map<std::string, CarbonTrace> load_carbon_dir(const std::filesystem::path& dir);

enum class SeriesFormat { Csv, ColumnarBinary };

/// CSV: `# unit=<label> step=<s>` line, `timestamp,value` header, one row per
/// sample; doubles are printed shortest-round-trip so read(write(s)) == s.
void write_series(const TimeSeries& series, const std::filesystem::path& path,
                  SeriesFormat format = SeriesFormat::Csv);
/// Format is detected from the file's leading bytes.
TimeSeries read_series(const std::filesystem::path& path);

SeriesFormat format_for_path(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Reads a whole file; throws RuntimeError(module) if it cannot be opened.
std::string read_file(const std::filesystem::path& path, const std::string& module);
/// Writes a whole file; throws RuntimeError(module) on failure.
void write_file(const std::filesystem::path& path, std::string_view contents,
                const std::string& module);

}  // namespace m3sim
