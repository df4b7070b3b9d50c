#include "follmer/mc.hpp"

#include <cstdlib>
#include <string>

namespace follmer {

std::size_t resolve_worker_count(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FOLLMER_LAB_WORKERS")) {
        char* end = nullptr;
        const unsigned long parsed = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

} // namespace follmer
