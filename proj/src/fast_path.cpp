#include "woc/fast_path.hpp"

namespace woc {

FastAttempt& FastCoordinator::start(const Operation& op, WeightVector object_weights,
                                    double now_ms, double deadline_ms)
{
    protocol_check(attempts_.count(op.id) == 0, "fast attempt already exists for " + to_string(op.id));

    FastAttempt attempt;
    attempt.op = op;
    attempt.threshold = consensus_threshold(object_weights).value;
    attempt.accumulated = object_weights.weight_of(self_);
    attempt.object_weights = std::move(object_weights);
    attempt.start_ms = now_ms;
    attempt.deadline_ms = deadline_ms;
    return attempts_.emplace(op.id, std::move(attempt)).first->second;
}

FastCoordinator::AcceptResult FastCoordinator::on_accept(const OpId& id, ReplicaId sender)
{
    auto it = attempts_.find(id);
    if (it == attempts_.end() || it->second.state != FastState::Collecting)
        return AcceptResult::Stale;

    FastAttempt& attempt = it->second;
    if (sender == self_ || attempt.accepted_from.count(sender))
        return AcceptResult::Duplicate;

    attempt.accepted_from.insert(sender);
    attempt.accumulated += attempt.object_weights.weight_of(sender);
    if (attempt.accumulated >= attempt.threshold) {
        attempt.state = FastState::Committed;
        return AcceptResult::Committed;
    }
    return AcceptResult::Counting;
}

FastCoordinator::AbortResult FastCoordinator::on_conflict_or_timeout(const OpId& id)
{
    auto it = attempts_.find(id);
    if (it == attempts_.end() || it->second.state != FastState::Collecting)
        return AbortResult::Ignored;
    it->second.state = FastState::FellBack;
    return AbortResult::FellBack;
}

FastAttempt* FastCoordinator::find(const OpId& id)
{
    auto it = attempts_.find(id);
    return it == attempts_.end() ? nullptr : &it->second;
}

} // namespace woc
