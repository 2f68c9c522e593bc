#include "m3sim/scheduler.hpp"

namespace m3sim {

std::vector<Placement> schedule_step(std::span<const QueuedTask> queue,
                                     std::span<const HostSlot> hosts) {
    std::vector<Placement> placements;
    std::vector<int> free(hosts.size());
    for (std::size_t h = 0; h < hosts.size(); ++h) free[h] = hosts[h].up ? hosts[h].free_cores : 0;

    for (const auto& q : queue) {
        bool placed = false;
        for (std::size_t h = 0; h < free.size(); ++h) {
            if (free[h] >= q.cpu_count) {
                free[h] -= q.cpu_count;
                placements.push_back({q.task, h});
                placed = true;
                break;
            }
        }
        if (!placed) break;
    }
    return placements;
}

}  // namespace m3sim
