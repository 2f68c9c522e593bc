#include "m3sim/power_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <utility>

#include "m3sim/error.hpp"

namespace m3sim {

namespace {

constexpr const char* kModule = "power-models";

constexpr std::array<std::pair<PowerKind, std::string_view>, 7> kKindNames{{
    {PowerKind::Sqrt, "sqrt"},
    {PowerKind::Linear, "linear"},
    {PowerKind::Square, "square"},
    {PowerKind::Cubic, "cubic"},
    {PowerKind::Mse, "mse"},
    {PowerKind::Asymptotic, "asymptotic"},
    {PowerKind::AsymptoticDvfs, "asymptotic_dvfs"},
}};

bool is_asymptotic(PowerKind k) {
    return k == PowerKind::Asymptotic || k == PowerKind::AsymptoticDvfs;
}

}  // namespace

std::string_view to_string(PowerKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "linear";
}

std::optional<PowerKind> parse_power_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

PowerModelSpec PowerModelSpec::make(PowerKind kind, double p_idle, double p_max,
                                    std::optional<double> r, std::optional<double> alpha) {
    const std::string who = "power model '" + std::string(to_string(kind)) + "'";
    if (!std::isfinite(p_idle) || !std::isfinite(p_max) || p_idle < 0.0) {
        throw ValidationError(kModule, who + ": p_idle must be finite and >= 0");
    }
    if (p_max < p_idle) throw ValidationError(kModule, who + ": p_max must be >= p_idle");
    if (kind == PowerKind::Mse) {
        if (!r) throw ValidationError(kModule, who + ": requires r");
        if (!std::isfinite(*r) || *r <= 0.0) throw ValidationError(kModule, who + ": r must be > 0");
    } else if (r) {
        throw ValidationError(kModule, who + ": r is only valid for mse");
    }
    if (is_asymptotic(kind)) {
        if (!alpha) throw ValidationError(kModule, who + ": requires alpha");
        if (!std::isfinite(*alpha) || *alpha <= 0.0) {
            throw ValidationError(kModule, who + ": alpha must be > 0");
        }
    } else if (alpha) {
        throw ValidationError(kModule, who + ": alpha is only valid for asymptotic kinds");
    }
    PowerModelSpec s;
    s.kind_ = kind;
    s.p_idle_ = p_idle;
    s.p_max_ = p_max;
    s.r_ = r;
    s.alpha_ = alpha;
    return s;
}

double PowerModelSpec::power(double u) const noexcept {
    u = std::isnan(u) ? 0.0 : std::clamp(u, 0.0, 1.0);
    const double span = p_max_ - p_idle_;
    switch (kind_) {
        case PowerKind::Sqrt:
            return p_idle_ + span * std::sqrt(u);
        case PowerKind::Linear:
            return p_idle_ + span * u;
        case PowerKind::Square:
            return p_idle_ + span * u * u;
        case PowerKind::Cubic:
            return p_idle_ + span * u * u * u;
        case PowerKind::Mse:
            // pow(0, r) == 0 for r > 0, so power(0) == p_idle.
            return p_idle_ + span * (2.0 * u - std::pow(u, *r_));
        case PowerKind::Asymptotic:
            return p_idle_ + span / 2.0 * (1.0 + u - std::exp(-u / *alpha_));
        case PowerKind::AsymptoticDvfs: {
            const double u3 = u * u * u;
            return p_idle_ + span / 2.0 * (1.0 + u3 - std::exp(-u3 / *alpha_));
        }
    }
    return p_idle_;
}

ModelArchive::ModelArchive(std::vector<ArchiveEntry> entries) : entries_(std::move(entries)) {
    std::set<std::string> seen;
    for (const auto& e : entries_) {
        if (!seen.insert(e.id).second) {
            throw ValidationError(kModule, "duplicate archive id " + e.id);
        }
    }
}

const ArchiveEntry* ModelArchive::find(std::string_view id) const noexcept {
    for (const auto& e : entries_) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

const ArchiveEntry& ModelArchive::at(std::string_view id) const {
    if (const auto* e = find(id)) return *e;
    throw ValidationError(kModule, "unknown model id '" + std::string(id) + "'");
}

std::vector<ArchiveEntry> ModelArchive::subset(Experiment experiment) const {
    std::vector<ArchiveEntry> out;
    for (const auto& e : entries_) {
        const bool in = experiment == Experiment::E1   ? e.in_e1
                        : experiment == Experiment::E2 ? e.in_e2
                                                       : e.in_e3;
        if (in) out.push_back(e);
    }
    return out;
}

const ModelArchive& builtin_archive() {
    static const ModelArchive archive = [] {
        using K = PowerKind;
        auto plain = [](K k, double idle) { return PowerModelSpec::make(k, idle, 180.0); };
        auto mse = [](double idle, double r) {
            return PowerModelSpec::make(K::Mse, idle, 180.0, r);
        };
        auto asym = [](K k, double idle, double alpha) {
            return PowerModelSpec::make(k, idle, 180.0, std::nullopt, alpha);
        };
        //                  id     spec                                  E1     E2     E3
        return ModelArchive({
            {"M1", plain(K::Sqrt, 32), true, true, true},
            {"M2", plain(K::Sqrt, 0), false, false, true},
            {"M3", plain(K::Linear, 32), false, true, true},
            {"M4", plain(K::Linear, 0), false, false, true},
            {"M5", plain(K::Square, 32), false, true, true},
            {"M6", plain(K::Square, 0), false, false, true},
            {"M7", plain(K::Cubic, 32), false, true, true},
            {"M8", plain(K::Cubic, 0), false, false, true},
            {"M9", mse(32, 10.0), true, false, false},
            {"M10", mse(32, 0.7), false, true, true},
            {"M11", mse(0, 0.7), false, false, true},
            {"M12", asym(K::Asymptotic, 32, 0.30), true, false, false},
            {"M13", asym(K::Asymptotic, 32, 0.85), false, true, true},
            {"M14", asym(K::Asymptotic, 0, 0.85), false, false, true},
            {"M15", asym(K::AsymptoticDvfs, 32, 0.30), true, false, true},
            {"M16", asym(K::AsymptoticDvfs, 32, 0.85), false, true, true},
            {"M17", asym(K::AsymptoticDvfs, 0, 1.90), false, false, true},
            {"M18", asym(K::AsymptoticDvfs, 32, 1.90), false, true, true},
        });
    }();
    return archive;
}

}  // namespace m3sim
