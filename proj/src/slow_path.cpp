#include "woc/slow_path.hpp"

#include <algorithm>

namespace woc {

bool SlowLeader::enqueue(const Operation& op)
{
    if (queued_.count(op.id))
        return false;
    queued_.insert(op.id);
    pending_.push_back(op);
    return true;
}

std::vector<Operation> SlowLeader::select_batch(std::size_t max_batch, bool conflict_aware,
                                                const std::function<bool(const Operation&)>& blocked,
                                                const std::function<bool(const Operation&)>& drop)
{
    std::vector<Operation> batch;
    std::deque<Operation> keep;

    while (!pending_.empty()) {
        Operation op = std::move(pending_.front());
        pending_.pop_front();

        if (drop && drop(op)) {
            queued_.erase(op.id);
            proposals_used_.erase(op.id);
            continue;
        }
        bool take = batch.size() < max_batch;
        if (take && blocked && blocked(op))
            take = false;
        if (take && conflict_aware) {
            for (const Operation& member : batch) {
                if (member.object == op.object && conflicts(member.kind, op.kind)) {
                    take = false;
                    break;
                }
            }
        }
        if (take)
            batch.push_back(std::move(op));
        else
            keep.push_back(std::move(op));
    }
    pending_ = std::move(keep);
    return batch;
}

SlowAttempt& SlowLeader::begin(std::vector<Operation> batch, WeightVector priorities,
                               double now_ms, double deadline_ms)
{
    protocol_check(!guard_, "slow proposal while the guard is held");
    protocol_check(!batch.empty(), "slow proposal with an empty batch");
    guard_ = true;
    for (const Operation& op : batch)
        proposals_used_[op.id] += 1;

    SlowAttempt attempt;
    attempt.ops = std::move(batch);
    attempt.round = next_round_++;
    attempt.threshold = consensus_threshold(priorities).value;
    attempt.priority_sum = priorities.weight_of(self_);
    attempt.priorities = std::move(priorities);
    attempt.start_ms = now_ms;
    attempt.deadline_ms = deadline_ms;
    current_ = std::move(attempt);
    return *current_;
}

SlowLeader::AcceptResult SlowLeader::on_accept(std::uint64_t round, ReplicaId sender)
{
    if (!current_ || current_->round != round || current_->state != SlowState::Collecting)
        return AcceptResult::Stale;
    SlowAttempt& attempt = *current_;
    if (sender == self_ || attempt.accepted_from.count(sender))
        return AcceptResult::Duplicate;

    attempt.accepted_from.insert(sender);
    attempt.priority_sum += attempt.priorities.weight_of(sender);
    if (attempt.priority_sum >= attempt.threshold) {
        attempt.state = SlowState::Committed;
        return AcceptResult::Committed;
    }
    return AcceptResult::Counting;
}

std::optional<SlowLeader::TimeoutOutcome> SlowLeader::on_timeout(std::uint64_t round, int retry_limit)
{
    if (!current_ || current_->round != round || current_->state != SlowState::Collecting)
        return std::nullopt;

    TimeoutOutcome outcome;
    for (const Operation& op : current_->ops) {
        if (proposals_used_[op.id] < retry_limit) {
            outcome.requeued.push_back(op);
        } else {
            outcome.failed.push_back(op);
            queued_.erase(op.id);
            proposals_used_.erase(op.id);
        }
    }
    // restore FIFO position of the survivors
    for (auto it = outcome.requeued.rbegin(); it != outcome.requeued.rend(); ++it)
        pending_.push_front(*it);

    current_.reset();
    guard_ = false;
    return outcome;
}

std::vector<Operation> SlowLeader::finish_commit()
{
    protocol_check(current_ && current_->state == SlowState::Committed,
                   "finish_commit without a committed attempt");
    std::vector<Operation> ops = std::move(current_->ops);
    for (const Operation& op : ops) {
        queued_.erase(op.id);
        proposals_used_.erase(op.id);
    }
    current_.reset();
    guard_ = false;
    return ops;
}

} // namespace woc
