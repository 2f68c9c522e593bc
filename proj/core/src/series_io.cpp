#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>

#include "csv_util.hpp"
#include "m3sim/error.hpp"
#include "m3sim/traces.hpp"

namespace m3sim {

namespace {

constexpr const char* kModule = "traces";
constexpr std::array<char, 8> kMagic{'M', '3', 'T', 'S', '\x01', '\0', '\0', '\0'};
constexpr std::size_t kHeaderBytes = 8 + 4 + 8 + 8 + 8;

template <typename T>
void put_le(std::string& out, T value) {
    auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bits.begin(), bits.end());
    }
    out.append(reinterpret_cast<const char*>(bits.data()), bits.size());
}

template <typename T>
T get_le(const std::string& in, std::size_t offset) {
    std::array<unsigned char, sizeof(T)> bits{};
    std::memcpy(bits.data(), in.data() + offset, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bits.begin(), bits.end());
    }
    return std::bit_cast<T>(bits);
}

std::string encode_binary(const TimeSeries& s) {
    std::string out;
    out.reserve(kHeaderBytes + s.size() * sizeof(double));
    out.append(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.unit));
    put_le<std::int64_t>(out, s.start_time);
    put_le<std::int64_t>(out, s.step);
    put_le<std::uint64_t>(out, s.size());
    for (double v : s.values) put_le<double>(out, v);
    return out;
}

TimeSeries decode_binary(const std::string& in, const std::string& source) {
    if (in.size() < kHeaderBytes) throw ValidationError(kModule, source + ": truncated header");
    const auto unit_raw = get_le<std::uint32_t>(in, 8);
    if (unit_raw > static_cast<std::uint32_t>(Unit::GramCo2PerKwh)) {
        throw ValidationError(kModule, source + ": unknown unit code");
    }
    TimeSeries s;
    s.unit = static_cast<Unit>(unit_raw);
    s.start_time = get_le<std::int64_t>(in, 12);
    s.step = get_le<std::int64_t>(in, 20);
    const auto count = get_le<std::uint64_t>(in, 28);
    if (in.size() != kHeaderBytes + count * sizeof(double)) {
        throw ValidationError(kModule, source + ": payload size does not match sample count");
    }
    s.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        s.values[i] = get_le<double>(in, kHeaderBytes + i * sizeof(double));
    }
    validate(s);
    return s;
}

std::string encode_csv(const TimeSeries& s) {
    std::string out;
    out.reserve(48 + s.size() * 28);
    out += "# unit=";
    out += to_string(s.unit);
    out += " step=" + std::to_string(s.step) + "\n";
    out += "timestamp,value\n";
    std::array<char, 32> buf{};
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), s.timestamp(i));
        out.append(buf.data(), p);
        out += ',';
        auto [q, ec2] = std::to_chars(buf.data(), buf.data() + buf.size(), s.values[i]);
        out.append(buf.data(), q);
        out += '\n';
    }
    return out;
}

TimeSeries decode_csv(const std::string& text, const std::string& source) {
    csv::LineReader reader(text);
    std::string_view line;
    TimeSeries s;
    bool saw_unit = false;
    bool saw_header = false;
    std::optional<Seconds> declared_step;
    std::optional<Seconds> first_ts;
    std::optional<Seconds> prev_ts;
    auto fail = [&](const std::string& what) -> void {
        throw ValidationError(kModule, source + ":" + std::to_string(reader.line_no()) + ": " + what);
    };

    while (reader.next(line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto body = csv::trim(line.substr(1));
            for (auto field : csv::split(body, ' ')) {
                if (field.starts_with("unit=")) {
                    const auto unit = parse_unit(field.substr(5));
                    if (!unit) fail("unknown unit label '" + std::string(field.substr(5)) + "'");
                    s.unit = *unit;
                    saw_unit = true;
                } else if (field.starts_with("step=")) {
                    const auto st = csv::parse_int(field.substr(5));
                    if (!st || *st <= 0) fail("bad step");
                    declared_step = *st;
                }
            }
            continue;
        }
        const auto cells = csv::split(line);
        if (!saw_header) {
            if (cells.size() != 2 || cells[0] != "timestamp" || cells[1] != "value") {
                fail("expected header timestamp,value");
            }
            saw_header = true;
            continue;
        }
        if (cells.size() != 2) fail("expected 2 columns");
        const auto ts = csv::parse_int(cells[0]);
        const auto v = csv::parse_double(cells[1]);
        if (!ts) fail("bad timestamp");
        if (!v) fail("bad value");
        if (!first_ts) {
            first_ts = *ts;
        } else {
            const Seconds step = *ts - *prev_ts;
            if (s.values.size() == 1) {
                if (step <= 0) fail("timestamps must increase");
                if (declared_step && *declared_step != step) fail("timestamp spacing disagrees with step");
                s.step = step;
            } else if (step != s.step) {
                fail("timestamps must be uniformly spaced");
            }
        }
        prev_ts = *ts;
        s.values.push_back(*v);
    }
    if (!saw_unit) throw ValidationError(kModule, source + ": missing '# unit=<label>' header");
    if (!saw_header) throw ValidationError(kModule, source + ": missing timestamp,value header");
    s.start_time = first_ts.value_or(0);
    if (s.values.size() < 2) s.step = declared_step.value_or(1);
    validate(s);
    return s;
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 32> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), p);
}

SeriesFormat format_for_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    return (ext == ".m3ts" || ext == ".bin") ? SeriesFormat::ColumnarBinary : SeriesFormat::Csv;
}

void write_series(const TimeSeries& series, const std::filesystem::path& path, SeriesFormat format) {
    validate(series);
    write_file(path, format == SeriesFormat::Csv ? encode_csv(series) : encode_binary(series),
               kModule);
}

TimeSeries read_series(const std::filesystem::path& path) {
    const std::string bytes = read_file(path, kModule);
    if (bytes.size() >= kMagic.size() &&
        std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) == 0) {
        return decode_binary(bytes, path.string());
    }
    return decode_csv(bytes, path.string());
}

}  // namespace m3sim
