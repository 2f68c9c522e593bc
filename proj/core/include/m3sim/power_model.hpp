#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace m3sim {

enum class PowerKind {
    Sqrt,
    Linear,
    Square,
    Cubic,
    Mse,
    Asymptotic,
    AsymptoticDvfs,
};

std::string_view to_string(PowerKind kind);
std::optional<PowerKind> parse_power_kind(std::string_view name);

/// CPU-utilization power-draw model. Construct through make(); an instance
/// always satisfies p_max >= p_idle >= 0 and carries exactly the parameters
/// its kind needs (r for mse, alpha for the asymptotic kinds).
class PowerModelSpec {
public:
    static PowerModelSpec make(PowerKind kind, double p_idle, double p_max,
                               std::optional<double> r = std::nullopt,
                               std::optional<double> alpha = std::nullopt);

    PowerKind kind() const noexcept { return kind_; }
    double p_idle() const noexcept { return p_idle_; }
    double p_max() const noexcept { return p_max_; }
    std::optional<double> r() const noexcept { return r_; }
    std::optional<double> alpha() const noexcept { return alpha_; }

    /// Watts drawn at utilization u; u is clamped into [0, 1].
    double power(double u) const noexcept;

    friend bool operator==(const PowerModelSpec&, const PowerModelSpec&) = default;

private:
    PowerModelSpec() = default;

    PowerKind kind_ = PowerKind::Linear;
    double p_idle_ = 0.0;
    double p_max_ = 0.0;
    std::optional<double> r_;
    std::optional<double> alpha_;
};

inline double power(const PowerModelSpec& spec, double u) noexcept { return spec.power(u); }

struct ArchiveEntry {
    std::string id;
    PowerModelSpec spec;
    bool in_e1 = false;
    bool in_e2 = false;
    bool in_e3 = false;
};

class ModelArchive {
public:
    explicit ModelArchive(std::vector<ArchiveEntry> entries);

    const std::vector<ArchiveEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    /// Throws ValidationError if `id` is unknown.
    const ArchiveEntry& at(std::string_view id) const;
    const ArchiveEntry* find(std::string_view id) const noexcept;

    enum class Experiment { E1, E2, E3 };
    std::vector<ArchiveEntry> subset(Experiment experiment) const;

private:
    std::vector<ArchiveEntry> entries_;
};

/// The eighteen reference configurations M1..M18 (P_idle 32 or 0 W, P_max 180 W).
const ModelArchive& builtin_archive();

}  // namespace m3sim
