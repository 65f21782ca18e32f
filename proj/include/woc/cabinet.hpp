#pragma once

#include "woc/types.hpp"

namespace woc {

/// Which routing discipline a run uses. The cabinet baseline funnels every
/// operation, independent or not, through the leader-coordinated slow path
/// and disables conflict-aware batch selection (whole batches serialize at
/// the leader).
enum class ProtocolMode : std::uint8_t { Woc, Cabinet };

inline const char* to_string(ProtocolMode mode)
{
    return mode == ProtocolMode::Woc ? "woc" : "cabinet";
}

/// Baseline routing: the fast path does not exist.
inline Path baseline_route(const Operation&)
{
    return Path::Slow;
}

} // namespace woc
