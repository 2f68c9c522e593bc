#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace m3sim {

struct QueuedTask {
    std::size_t task = 0;  // caller's task index
    int cpu_count = 1;
};

struct HostSlot {
    int free_cores = 0;
    bool up = true;
};

struct Placement {
    std::size_t task = 0;
    std::size_t host = 0;

    friend bool operator==(const Placement&, const Placement&) = default;
};

/// FIFO + first-fit. `queue` is in priority order (submit time, then id) and
/// `hosts` in ascending host id. Each task goes to the first up host with
/// enough free cores; scanning stops at the first task that fits nowhere, so
/// later tasks never overtake it.
std::vector<Placement> schedule_step(std::span<const QueuedTask> queue,
                                     std::span<const HostSlot> hosts);

}  // namespace m3sim
