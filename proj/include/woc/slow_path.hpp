#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "woc/types.hpp"
#include "woc/weights.hpp"

namespace woc {

enum class SlowState : std::uint8_t { Collecting, Committed, Failed };

/// One leader-coordinated round over a batch of operations. The priority
/// snapshot is pinned at proposal time.
struct SlowAttempt {
    std::vector<Operation> ops;
    std::uint64_t round = 0;
    WeightVector priorities;  // node weights snapshot
    double threshold = 0.0;
    double priority_sum = 0.0;  // leader's own priority plus counted accepts
    std::set<ReplicaId> accepted_from;
    double start_ms = 0.0;
    double deadline_ms = 0.0;
    SlowState state = SlowState::Collecting;

    std::vector<ReplicaId> quorum(ReplicaId leader) const
    {
        std::vector<ReplicaId> q(accepted_from.begin(), accepted_from.end());
        q.push_back(leader);
        std::sort(q.begin(), q.end());
        return q;
    }
};

/// Leader state: FIFO queue, exclusive proposal guard, current attempt,
/// per-operation retry accounting.
class SlowLeader {
public:
    explicit SlowLeader(ReplicaId self = -1) : self_(self) {}
    void set_self(ReplicaId self) { self_ = self; }
    ReplicaId self() const { return self_; }

    /// Appends unless the op id is already queued or in the current attempt.
    bool enqueue(const Operation& op);

    bool guard_held() const { return guard_; }
    std::size_t queue_depth() const { return pending_.size(); }
    std::optional<SlowAttempt>& attempt() { return current_; }

    /// Pulls the next batch off the queue. Scans in FIFO order; an op joins
    /// the batch unless it conflicts with one already taken (conflict-aware
    /// mode only) or `blocked` holds it back. `drop` removes an op without
    /// proposing it (already committed elsewhere). Returns an empty batch
    /// when nothing is eligible; queue order of skipped ops is preserved.
    std::vector<Operation> select_batch(std::size_t max_batch, bool conflict_aware,
                                        const std::function<bool(const Operation&)>& blocked,
                                        const std::function<bool(const Operation&)>& drop);

    /// Acquires the guard and pins the priority snapshot. pSum starts at the
    /// leader's own priority.
    SlowAttempt& begin(std::vector<Operation> batch, WeightVector priorities, double now_ms,
                       double deadline_ms);

    enum class AcceptResult { Committed, Counting, Duplicate, Stale };
    AcceptResult on_accept(std::uint64_t round, ReplicaId sender);

    struct TimeoutOutcome {
        std::vector<Operation> requeued;  // will be retried, FIFO position restored
        std::vector<Operation> failed;    // retry budget exhausted
    };
    /// Expired round: releases the guard, re-queues ops whose retry budget
    /// remains and fails the rest. Returns nullopt for stale rounds.
    std::optional<TimeoutOutcome> on_timeout(std::uint64_t round, int retry_limit);

    /// Releases the guard after a commit has been fully processed.
    std::vector<Operation> finish_commit();

private:
    ReplicaId self_;
    std::deque<Operation> pending_;
    std::set<OpId> queued_;  // ids in pending_ or in current_
    std::map<OpId, int> proposals_used_;
    bool guard_ = false;
    std::optional<SlowAttempt> current_;
    std::uint64_t next_round_ = 1;
};

} // namespace woc
