#include "m3sim/accuracy.hpp"

#include <algorithm>
#include <cmath>

#include "m3sim/error.hpp"

namespace m3sim {

namespace {

constexpr const char* kModule = "accuracy";

std::size_t compared(std::span<const double> real, std::span<const double> sim) {
    const std::size_t n = std::min(real.size(), sim.size());
    if (n == 0) throw ValidationError(kModule, "empty aligned range");
    return n;
}

void check_grid(const TimeSeries& real, const TimeSeries& sim) {
    if (real.start_time != sim.start_time || real.step != sim.step) {
        throw ValidationError(kModule, "real and simulated series are on different grids (step " +
                                           std::to_string(real.step) + " vs " +
                                           std::to_string(sim.step) + ")");
    }
}

}  // namespace

std::string_view to_string(AccuracyMetric metric) {
    switch (metric) {
        case AccuracyMetric::Mape: return "mape";
        case AccuracyMetric::Rmse: return "rmse";
        case AccuracyMetric::Mae: return "mae";
        case AccuracyMetric::Nad: return "nad";
    }
    return "mape";
}

std::optional<AccuracyMetric> parse_accuracy_metric(std::string_view name) {
    if (name == "mape") return AccuracyMetric::Mape;
    if (name == "rmse") return AccuracyMetric::Rmse;
    if (name == "mae") return AccuracyMetric::Mae;
    if (name == "nad") return AccuracyMetric::Nad;
    return std::nullopt;
}

double mape(std::span<const double> real, std::span<const double> sim) {
    const std::size_t n = compared(real, sim);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (real[i] == 0.0) {
            throw ValidationError(kModule, "MAPE undefined at zero reference (sample " +
                                               std::to_string(i) + ")");
        }
        sum += std::abs(real[i] - sim[i]) / std::abs(real[i]);
    }
    return 100.0 * sum / static_cast<double>(n);
}

double rmse(std::span<const double> real, std::span<const double> sim) {
    const std::size_t n = compared(real, sim);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = real[i] - sim[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(n));
}

double mae(std::span<const double> real, std::span<const double> sim) {
    const std::size_t n = compared(real, sim);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += std::abs(real[i] - sim[i]);
    return sum / static_cast<double>(n);
}

double mape(const TimeSeries& real, const TimeSeries& sim) {
    check_grid(real, sim);
    return mape(std::span<const double>(real.values), std::span<const double>(sim.values));
}

double rmse(const TimeSeries& real, const TimeSeries& sim) {
    check_grid(real, sim);
    return rmse(std::span<const double>(real.values), std::span<const double>(sim.values));
}

double mae(const TimeSeries& real, const TimeSeries& sim) {
    check_grid(real, sim);
    return mae(std::span<const double>(real.values), std::span<const double>(sim.values));
}

AccuracyReport score(AccuracyMetric metric, const TimeSeries& real, const TimeSeries& sim) {
    AccuracyReport report{metric, 0.0, std::min(real.size(), sim.size())};
    switch (metric) {
        case AccuracyMetric::Mape: report.value = mape(real, sim); break;
        case AccuracyMetric::Rmse: report.value = rmse(real, sim); break;
        case AccuracyMetric::Mae: report.value = mae(real, sim); break;
        case AccuracyMetric::Nad:
            throw ValidationError(kModule, "metric 'nad' is not implemented");
    }
    return report;
}

}  // namespace m3sim
