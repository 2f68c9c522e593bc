#include "m3sim/meta_model.hpp"

#include <algorithm>

#include "m3sim/error.hpp"
#include "m3sim/parallel.hpp"

namespace m3sim {

namespace {

constexpr const char* kModule = "meta-model";
constexpr std::size_t kChunk = 8192;

double reduce_sorted(const std::vector<double>& col, MetaAgg agg) {
    const std::size_t c = col.size();
    if (agg == MetaAgg::Median) {
        return c % 2 == 1 ? col[c / 2] : (col[c / 2 - 1] + col[c / 2]) / 2.0;
    }
    double sum = 0.0;
    for (double v : col) sum += v;
    // Rounding in sum / c can land one ulp outside the column's range.
    return std::clamp(sum / static_cast<double>(c), col.front(), col.back());
}

}  // namespace

std::string_view to_string(MetaAgg agg) { return agg == MetaAgg::Mean ? "mean" : "median"; }

std::optional<MetaAgg> parse_meta_agg(std::string_view name) {
    if (name == "mean") return MetaAgg::Mean;
    if (name == "median") return MetaAgg::Median;
    return std::nullopt;
}

AlignedView align(const MultiModel& mm, std::optional<std::size_t> quorum) {
    const std::size_t k = mm.members.size();
    if (k == 0) throw ValidationError(kModule, "multi-model has no members");
    const std::size_t q = quorum.value_or(k);
    if (q < 1 || q > k) {
        throw ValidationError(kModule, "quorum " + std::to_string(q) + " outside [1, " +
                                           std::to_string(k) + "]");
    }
    std::vector<std::size_t> lengths;
    for (const auto& m : mm.members) lengths.push_back(m.series.size());
    std::sort(lengths.begin(), lengths.end(), std::greater<>());
    const std::size_t length = lengths[q - 1];
    if (length == 0) throw ValidationError(kModule, "no common timesteps");

    AlignedView view;
    view.start_time = mm.start_time;
    view.step = mm.step;
    view.unit = mm.unit;
    view.length = length;
    view.quorum = q;
    view.members.reserve(k);
    for (const auto& m : mm.members) {
        const auto& v = m.series.values;
        view.members.emplace_back(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(v.size(), length)));
    }
    return view;
}

MetaModel aggregate(const AlignedView& view, MetaAgg agg) {
    if (view.length == 0 || view.members.empty()) throw ValidationError(kModule, "no common timesteps");

    MetaModel meta;
    meta.spec = MetaSpec{agg, view.quorum};
    meta.member_count = view.members.size();
    meta.series = TimeSeries{view.start_time, view.step, std::vector<double>(view.length), view.unit};

    const std::size_t chunks = (view.length + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](std::size_t chunk) {
        std::vector<double> col;
        col.reserve(view.members.size());
        const std::size_t end = std::min(view.length, (chunk + 1) * kChunk);
        for (std::size_t j = chunk * kChunk; j < end; ++j) {
            col.clear();
            for (const auto& m : view.members) {
                if (j < m.size()) col.push_back(m[j]);
            }
            std::sort(col.begin(), col.end());
            meta.series.values[j] = reduce_sorted(col, agg);
        }
    });
    return meta;
}

MetaModel build_meta_model(const MultiModel& mm, const MetaSpec& spec) {
    MetaModel meta = aggregate(align(mm, spec.quorum), spec.agg);
    meta.spec = spec;
    return meta;
}

void export_meta_model(const MetaModel& meta, const std::filesystem::path& path, SeriesFormat format) {
    write_series(meta.series, path, format);
}

}  // namespace m3sim
