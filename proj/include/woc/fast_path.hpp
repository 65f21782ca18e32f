#pragma once

#include <map>
#include <set>

#include "woc/types.hpp"
#include "woc/weights.hpp"

namespace woc {

enum class FastState : std::uint8_t { Collecting, Committed, FellBack };

/// One leaderless commit attempt. The weight vector is pinned when the
/// attempt starts so every accept is scored against a single epoch.
struct FastAttempt {
    Operation op;
    WeightVector object_weights;
    double threshold = 0.0;
    double accumulated = 0.0;  // own weight plus counted accepts
    std::set<ReplicaId> accepted_from;
    double start_ms = 0.0;
    double deadline_ms = 0.0;
    FastState state = FastState::Collecting;

    std::vector<ReplicaId> quorum(ReplicaId coordinator) const
    {
        std::vector<ReplicaId> q(accepted_from.begin(), accepted_from.end());
        q.push_back(coordinator);
        std::sort(q.begin(), q.end());
        return q;
    }
};

/// Coordinator bookkeeping for the attempts a replica owns.
class FastCoordinator {
public:
    explicit FastCoordinator(ReplicaId self = -1) : self_(self) {}
    void set_self(ReplicaId self) { self_ = self; }

    /// Creates the attempt with accumulated = the coordinator's own object
    /// weight. The caller broadcasts FAST_PROPOSE and arms the timeout.
    FastAttempt& start(const Operation& op, WeightVector object_weights, double now_ms,
                       double deadline_ms);

    enum class AcceptResult {
        Committed,  // this accept reached the threshold
        Counting,   // counted, still below threshold
        Duplicate,  // sender already counted
        Stale,      // attempt unknown or already terminal
    };
    AcceptResult on_accept(const OpId& id, ReplicaId sender);

    enum class AbortResult { FellBack, Ignored };
    /// CONFLICT reply or expired deadline; at most one fallback per attempt.
    AbortResult on_conflict_or_timeout(const OpId& id);

    FastAttempt* find(const OpId& id);
    void erase(const OpId& id) { attempts_.erase(id); }
    std::size_t active() const { return attempts_.size(); }

private:
    ReplicaId self_;
    std::map<OpId, FastAttempt> attempts_;
};

} // namespace woc
