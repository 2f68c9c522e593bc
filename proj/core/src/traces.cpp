#include "m3sim/traces.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "csv_util.hpp"
#include "m3sim/error.hpp"

namespace m3sim {

namespace {

constexpr const char* kModule = "traces";

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
    throw ValidationError(kModule, source + ":" + std::to_string(line) + ": " + what);
}

bool is_header(const std::vector<std::string_view>& cells, std::initializer_list<std::string_view> names) {
    if (cells.size() != names.size()) return false;
    return std::equal(cells.begin(), cells.end(), names.begin());
}

}  // namespace

Seconds Task::total_duration() const noexcept {
    Seconds total = 0;
    for (const auto& f : fragments) total += f.duration;
    return total;
}

double Task::cpu_seconds() const noexcept {
    double total = 0.0;
    for (const auto& f : fragments) {
        total += static_cast<double>(f.duration) * f.utilization * cpu_count;
    }
    return total;
}

WorkloadTrace::WorkloadTrace(std::vector<Task> tasks) : tasks_(std::move(tasks)) {
    if (tasks_.empty()) throw ValidationError(kModule, "workload has no tasks");
    for (const auto& t : tasks_) {
        const std::string who = "task " + std::to_string(t.id);
        if (t.cpu_count < 1) throw ValidationError(kModule, who + ": cpu_count must be >= 1");
        if (t.fragments.empty()) throw ValidationError(kModule, who + ": no fragments");
        for (const auto& f : t.fragments) {
            if (f.duration < 0) throw ValidationError(kModule, who + ": negative fragment duration");
            if (!(f.utilization >= 0.0 && f.utilization <= 1.0)) {
                throw ValidationError(kModule, who + ": utilization out of range");
            }
        }
        if (t.total_duration() <= 0) {
            throw ValidationError(kModule, who + ": total duration must be positive");
        }
    }
    std::sort(tasks_.begin(), tasks_.end(), [](const Task& a, const Task& b) {
        return a.submit_time != b.submit_time ? a.submit_time < b.submit_time : a.id < b.id;
    });
    for (std::size_t i = 1; i < tasks_.size(); ++i) {
        if (tasks_[i].id == tasks_[i - 1].id) {
            throw ValidationError(kModule, "duplicate task id " + std::to_string(tasks_[i].id));
        }
    }
}

WorkloadTrace parse_workload(std::string_view text, const std::string& source) {
    csv::LineReader reader(text);
    std::string_view line;
    bool saw_header = false;
    std::vector<Task> tasks;
    std::map<std::uint64_t, std::size_t> index;

    while (reader.next(line)) {
        if (line.empty() || line.front() == '#') continue;
        const auto cells = csv::split(line);
        if (!saw_header) {
            if (!is_header(cells, {"id", "submit_time", "cpu_count", "duration", "cpu_usage"})) {
                parse_fail(source, reader.line_no(),
                           "expected header id,submit_time,cpu_count,duration,cpu_usage");
            }
            saw_header = true;
            continue;
        }
        if (cells.size() != 5) {
            parse_fail(source, reader.line_no(),
                       "expected 5 columns, got " + std::to_string(cells.size()));
        }
        const auto id = csv::parse_int(cells[0]);
        const auto submit = csv::parse_int(cells[1]);
        const auto cores = csv::parse_int(cells[2]);
        const auto duration = csv::parse_int(cells[3]);
        const auto usage = csv::parse_double(cells[4]);
        if (!id || *id < 0) parse_fail(source, reader.line_no(), "bad id");
        if (!submit) parse_fail(source, reader.line_no(), "bad submit_time");
        if (!cores) parse_fail(source, reader.line_no(), "bad cpu_count");
        if (!duration) parse_fail(source, reader.line_no(), "bad duration (integer seconds)");
        if (!usage) parse_fail(source, reader.line_no(), "bad cpu_usage");

        const auto key = static_cast<std::uint64_t>(*id);
        auto [it, inserted] = index.try_emplace(key, tasks.size());
        if (inserted) {
            tasks.push_back(Task{key, *submit, static_cast<int>(*cores), {}});
        } else {
            const Task& t = tasks[it->second];
            if (t.submit_time != *submit || t.cpu_count != *cores) {
                parse_fail(source, reader.line_no(),
                           "task " + std::to_string(key) +
                               ": submit_time/cpu_count differ between fragment rows");
            }
        }
        tasks[it->second].fragments.push_back(Fragment{*duration, *usage});
    }
    if (!saw_header) throw ValidationError(kModule, source + ": empty workload file");
    return WorkloadTrace(std::move(tasks));
}

WorkloadTrace load_workload(const std::filesystem::path& path) {
    return parse_workload(read_file(path, kModule), path.string());
}

void write_workload(const WorkloadTrace& trace, const std::filesystem::path& path) {
    std::string out = "id,submit_time,cpu_count,duration,cpu_usage\n";
    for (const auto& t : trace.tasks()) {
        for (const auto& f : t.fragments) {
            out += std::to_string(t.id) + ',' + std::to_string(t.submit_time) + ',' +
                   std::to_string(t.cpu_count) + ',' + std::to_string(f.duration) + ',' +
                   format_double(f.utilization) + '\n';
        }
    }
    write_file(path, out, kModule);
}

CarbonTrace parse_carbon(std::string_view text, std::string location, const std::string& source) {
    csv::LineReader reader(text);
    std::string_view line;
    bool saw_header = false;
    std::vector<Seconds> stamps;
    std::vector<double> values;

    while (reader.next(line)) {
        if (line.empty() || line.front() == '#') continue;
        const auto cells = csv::split(line);
        if (!saw_header) {
            if (!is_header(cells, {"timestamp", "carbon_intensity"})) {
                parse_fail(source, reader.line_no(), "expected header timestamp,carbon_intensity");
            }
            saw_header = true;
            continue;
        }
        if (cells.size() != 2) {
            parse_fail(source, reader.line_no(),
                       "expected 2 columns, got " + std::to_string(cells.size()));
        }
        const auto ts = csv::parse_int(cells[0]);
        const auto v = csv::parse_double(cells[1]);
        if (!ts) parse_fail(source, reader.line_no(), "bad timestamp");
        if (!v || !std::isfinite(*v)) parse_fail(source, reader.line_no(), "bad carbon_intensity");
        if (*v < 0.0) parse_fail(source, reader.line_no(), "negative carbon intensity");
        if (!stamps.empty()) {
            const Seconds step = stamps.size() >= 2 ? stamps[1] - stamps[0] : *ts - stamps[0];
            if (step <= 0 || *ts - stamps.back() != step) {
                parse_fail(source, reader.line_no(), "timestamps must be uniformly spaced and increasing");
            }
        }
        stamps.push_back(*ts);
        values.push_back(*v);
    }
    if (values.empty()) throw ValidationError(kModule, source + ": carbon trace has no samples");

    const Seconds step = stamps.size() >= 2 ? stamps[1] - stamps[0] : kDefaultCarbonStep;
    return CarbonTrace{std::move(location),
                       TimeSeries{stamps.front(), step, std::move(values), Unit::GramCo2PerKwh}};
}

CarbonTrace load_carbon(const std::filesystem::path& path, std::string location) {
    return parse_carbon(read_file(path, kModule), std::move(location), path.string());
}

void write_carbon(const CarbonTrace& trace, const std::filesystem::path& path) {
    std::string out = "timestamp,carbon_intensity\n";
    for (std::size_t i = 0; i < trace.series.size(); ++i) {
        out += std::to_string(trace.series.timestamp(i)) + ',' +
               format_double(trace.series.values[i]) + '\n';
    }
    write_file(path, out, kModule);
}

std::map<std::string, CarbonTrace> load_carbon_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        throw ValidationError(kModule, "carbon directory not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::map<std::string, CarbonTrace> out;
    for (const auto& f : files) {
        auto loc = f.stem().string();
        out.emplace(loc, load_carbon(f, loc));
    }
    if (out.empty()) throw ValidationError(kModule, "no carbon traces in " + dir.string());
    return out;
}

std::string read_file(const std::filesystem::path& path, const std::string& module) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RuntimeError(module, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents,
                const std::string& module) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeError(module, "cannot open " + path.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.close();
    if (!out) throw RuntimeError(module, "write failed: " + path.string());
}

}  // namespace m3sim
