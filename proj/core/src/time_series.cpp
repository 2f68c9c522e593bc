#include "m3sim/time_series.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "m3sim/error.hpp"

namespace m3sim {

namespace {

constexpr std::array<std::pair<Unit, std::string_view>, 6> kUnitLabels{{
    {Unit::Watt, "watt"},
    {Unit::WattHour, "watt_hour"},
    {Unit::GramCo2, "gram_co2"},
    {Unit::Fraction, "fraction"},
    {Unit::Dimensionless, "dimensionless"},
    {Unit::GramCo2PerKwh, "gram_co2_per_kwh"},
}};

Seconds floor_div(Seconds a, Seconds b) {
    Seconds q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::string_view to_string(Unit unit) {
    for (const auto& [u, label] : kUnitLabels) {
        if (u == unit) return label;
    }
    return "dimensionless";
}

std::optional<Unit> parse_unit(std::string_view label) {
    for (const auto& [u, l] : kUnitLabels) {
        if (l == label) return u;
    }
    return std::nullopt;
}

void validate(const TimeSeries& series) {
    if (series.step <= 0) {
        throw ValidationError("traces", "series step must be positive, got " +
                                            std::to_string(series.step));
    }
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (!std::isfinite(series.values[i])) {
            throw ValidationError("traces",
                                  "non-finite value at sample " + std::to_string(i));
        }
    }
}

double value_at(const TimeSeries& series, Seconds t) {
    if (series.empty()) throw ValidationError("traces", "cannot sample an empty series");
    if (t <= series.start_time) return series.values.front();
    const auto idx = static_cast<std::size_t>(floor_div(t - series.start_time, series.step));
    return idx >= series.size() ? series.values.back() : series.values[idx];
}

TimeSeries resample_hold(const TimeSeries& series, Seconds start_time, Seconds step,
                         std::size_t count) {
    if (series.empty()) throw ValidationError("traces", "cannot resample an empty series");
    if (step <= 0) {
        throw ValidationError("traces", "resample step must be positive, got " +
                                            std::to_string(step));
    }
    TimeSeries out{start_time, step, {}, series.unit};
    out.values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.values.push_back(value_at(series, out.timestamp(i)));
    }
    return out;
}

TimeSeries resample_hold(const TimeSeries& series, Seconds new_step) {
    if (series.empty()) throw ValidationError("traces", "cannot resample an empty series");
    if (new_step <= 0) {
        throw ValidationError("traces", "resample step must be positive, got " +
                                            std::to_string(new_step));
    }
    const Seconds span = series.end_time() - series.start_time;
    const auto count = static_cast<std::size_t>((span + new_step - 1) / new_step);
    return resample_hold(series, series.start_time, new_step, count);
}

}  // namespace m3sim
