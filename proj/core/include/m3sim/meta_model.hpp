#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "m3sim/multi_model.hpp"
#include "m3sim/traces.hpp"

namespace m3sim {

enum class MetaAgg { Mean, Median };

std::string_view to_string(MetaAgg agg);
std::optional<MetaAgg> parse_meta_agg(std::string_view name);

struct MetaSpec {
    MetaAgg agg = MetaAgg::Median;
    /// Minimum number of members that must cover a timestep; unset means all k.
    std::optional<std::size_t> quorum;
};

/// Members cut to the steps that survive alignment. Step j is covered by
/// every member whose length exceeds j.
struct AlignedView {
    Seconds start_time = 0;
    Seconds step = 1;
    Unit unit = Unit::Watt;
    std::size_t length = 0;
    std::size_t quorum = 0;
    std::vector<std::vector<double>> members;  // each truncated to <= length
};

/// Keeps step j iff at least `quorum` members cover it; with quorum = k this
/// is the minimum member length. Throws ValidationError "no common timesteps"
/// when nothing survives, or if quorum is outside [1, k].
AlignedView align(const MultiModel& mm, std::optional<std::size_t> quorum = std::nullopt);

struct MetaModel {
    TimeSeries series;
    MetaSpec spec;
    std::size_t member_count = 0;
};

/// Per timestep, mean or median of the covering members. Each column is
/// sorted before reduction, so the result does not depend on member order.
MetaModel aggregate(const AlignedView& view, MetaAgg agg);

MetaModel build_meta_model(const MultiModel& mm, const MetaSpec& spec);

void export_meta_model(const MetaModel& meta, const std::filesystem::path& path,
                       SeriesFormat format = SeriesFormat::Csv);

}  // namespace m3sim
