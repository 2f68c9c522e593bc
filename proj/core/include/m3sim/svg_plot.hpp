#pragma once

#include <string>

#include "m3sim/meta_model.hpp"
#include "m3sim/multi_model.hpp"

namespace m3sim {

struct PlotOptions {
    int width = 960;
    int height = 480;
    std::size_t max_points = 2000;  // longer series are mean-windowed for display
    std::string title;
};

/// Line chart: one gray polyline per member, the meta-model in green, and the
/// ground truth (if given) as a dashed black line. Output bytes depend only
/// on the inputs.
std::string plot_timeseries(const MultiModel& mm, const MetaModel& meta,
                            const TimeSeries* ground_truth = nullptr,
                            const PlotOptions& options = {});

/// Horizontal bar chart of cumulative totals: one gray bar per member
/// labeled with its id, then a green bar labeled "M" for the meta-model.
std::string plot_totals(const MultiModel& mm, const MetaModel& meta,
                        const PlotOptions& options = {});

}  // namespace m3sim
