#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace m3sim {

/// Seconds since the UTC epoch (or seconds, for durations).
using Seconds = std::int64_t;

enum class Unit {
    Watt,
    WattHour,
    GramCo2,
    Fraction,
    Dimensionless,
    GramCo2PerKwh,
};

std::string_view to_string(Unit unit);
std::optional<Unit> parse_unit(std::string_view label);

/// Uniformly sampled series. Sample i sits at start_time + i * step.
struct TimeSeries {
    Seconds start_time = 0;
    Seconds step = 1;
    std::vector<double> values;
    Unit unit = Unit::Dimensionless;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
    Seconds timestamp(std::size_t i) const noexcept {
        return start_time + static_cast<Seconds>(i) * step;
    }
    /// One past the last sample's interval.
    Seconds end_time() const noexcept { return timestamp(values.size()); }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;
};

/// Throws ValidationError (module "traces") if step <= 0 or a value is not finite.
void validate(const TimeSeries& series);

/// Zero-order hold onto a grid of `new_step` starting at the source start and
/// covering the source span [start_time, end_time).
TimeSeries resample_hold(const TimeSeries& series, Seconds new_step);

/// Zero-order hold onto an explicit grid. Before the first source sample the
/// first value is used; past the end the last value persists.
TimeSeries resample_hold(const TimeSeries& series, Seconds start_time, Seconds step,
                         std::size_t count);

/// Value held at time t.
double value_at(const TimeSeries& series, Seconds t);

}  // namespace m3sim
