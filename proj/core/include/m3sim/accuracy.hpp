#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "m3sim/time_series.hpp"

namespace m3sim {

enum class AccuracyMetric { Mape, Rmse, Mae, Nad };

std::string_view to_string(AccuracyMetric metric);
std::optional<AccuracyMetric> parse_accuracy_metric(std::string_view name);

struct AccuracyReport {
    AccuracyMetric metric = AccuracyMetric::Mape;
    double value = 0.0;  // percent for MAPE, the series unit otherwise
    std::size_t n = 0;
};

// All metrics compare the first min(|real|, |sim|) samples.

/// 100/n * sum |R_i - S_i| / |R_i|. Throws ValidationError if some compared
/// R_i is zero ("MAPE undefined at zero reference") or nothing is compared.
double mape(std::span<const double> real, std::span<const double> sim);
double rmse(std::span<const double> real, std::span<const double> sim);
double mae(std::span<const double> real, std::span<const double> sim);

/// Series variants also require a shared grid (start time and step).
double mape(const TimeSeries& real, const TimeSeries& sim);
double rmse(const TimeSeries& real, const TimeSeries& sim);
double mae(const TimeSeries& real, const TimeSeries& sim);

/// NAD is declared for extensibility and throws ValidationError.
AccuracyReport score(AccuracyMetric metric, const TimeSeries& real, const TimeSeries& sim);

}  // namespace m3sim
