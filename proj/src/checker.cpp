#include "woc/checker.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace woc {

namespace {

bool intersects(const std::vector<ReplicaId>& a, const std::vector<ReplicaId>& b)
{
    // both sorted
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j])
            return true;
        if (a[i] < b[j])
            ++i;
        else
            ++j;
    }
    return false;
}

std::string describe(const CommitRecord& rec)
{
    return "op " + to_string(rec.op) + " (object " + std::to_string(rec.object) + ", " +
           (rec.path == Path::Fast ? "fast" : "slow") + ", index " +
           std::to_string(rec.commit_index) + ")";
}

} // namespace

std::vector<Violation> check_quorum_intersection(const std::vector<CommitRecord>& records)
{
    std::vector<Violation> out;

    std::map<std::pair<ObjectId, Path>, std::vector<const CommitRecord*>> groups;
    for (const CommitRecord& rec : records) {
        if (rec.quorum_members.empty())
            out.push_back({"quorum_intersection", describe(rec) + " has an empty quorum"});
        if (rec.accumulated_weight < rec.threshold_used)
            out.push_back({"quorum_intersection",
                           describe(rec) + " committed below threshold: " +
                               std::to_string(rec.accumulated_weight) + " < " +
                               std::to_string(rec.threshold_used)});
        groups[{rec.object, rec.path}].push_back(&rec);
    }

    for (const auto& [key, group] : groups) {
        if (group.size() < 2)
            continue;
        // quorums that all share one member pairwise-intersect trivially
        std::set<ReplicaId> common(group.front()->quorum_members.begin(),
                                   group.front()->quorum_members.end());
        for (const CommitRecord* rec : group) {
            std::set<ReplicaId> next;
            for (ReplicaId r : rec->quorum_members)
                if (common.count(r))
                    next.insert(r);
            common = std::move(next);
            if (common.empty())
                break;
        }
        if (!common.empty())
            continue;
        for (std::size_t i = 0; i < group.size(); ++i)
            for (std::size_t j = i + 1; j < group.size(); ++j)
                if (!intersects(group[i]->quorum_members, group[j]->quorum_members))
                    out.push_back({"quorum_intersection",
                                   "disjoint quorums: " + describe(*group[i]) + " vs " +
                                       describe(*group[j])});
    }
    return out;
}

std::vector<Violation> check_cross_path_exclusion(const std::vector<CommitRecord>&,
                                                  const std::vector<AttemptSpan>& attempts)
{
    std::vector<Violation> out;

    std::map<ObjectId, std::vector<const AttemptSpan*>> fast, slow;
    for (const AttemptSpan& span : attempts) {
        if (!span.committed)
            continue;
        (span.path == Path::Fast ? fast : slow)[span.object].push_back(&span);
    }

    for (const auto& [object, fast_spans] : fast) {
        auto it = slow.find(object);
        if (it == slow.end())
            continue;
        for (const AttemptSpan* f : fast_spans) {
            for (const AttemptSpan* s : it->second) {
                if (!conflicts(f->kind, s->kind))
                    continue;
                if (f->start_ms < s->end_ms && s->start_ms < f->end_ms)
                    out.push_back({"cross_path_exclusion",
                                   "object " + std::to_string(object) + ": fast op " +
                                       to_string(f->op) + " [" + std::to_string(f->start_ms) +
                                       ", " + std::to_string(f->end_ms) + "] overlaps slow op " +
                                       to_string(s->op) + " [" + std::to_string(s->start_ms) +
                                       ", " + std::to_string(s->end_ms) + "]"});
            }
        }
    }
    return out;
}

std::vector<Violation> check_per_object_order(const RunTrace& trace)
{
    std::vector<Violation> out;

    // canonical order per object from the commit records
    std::map<ObjectId, std::map<std::uint64_t, const CommitRecord*>> canonical;
    for (const CommitRecord& rec : trace.commits) {
        auto [it, fresh] = canonical[rec.object].emplace(rec.commit_index, &rec);
        if (!fresh)
            out.push_back({"per_object_order",
                           "object " + std::to_string(rec.object) + " assigned index " +
                               std::to_string(rec.commit_index) + " twice"});
    }

    // each replica applies strictly ascending indexes matching the canon
    std::map<std::pair<ReplicaId, ObjectId>, std::uint64_t> last_applied;
    for (const ApplyEntry& entry : trace.applies) {
        auto& last = last_applied[{entry.replica, entry.object}];
        if (entry.commit_index <= last)
            out.push_back({"per_object_order",
                           "replica " + std::to_string(entry.replica) + " applied object " +
                               std::to_string(entry.object) + " index " +
                               std::to_string(entry.commit_index) + " after index " +
                               std::to_string(last)});
        last = entry.commit_index;

        const auto& canon = canonical[entry.object];
        auto slot = canon.find(entry.commit_index);
        if (slot == canon.end() || slot->second->op != entry.op)
            out.push_back({"per_object_order",
                           "replica " + std::to_string(entry.replica) + " applied op " +
                               to_string(entry.op) + " at object " + std::to_string(entry.object) +
                               " index " + std::to_string(entry.commit_index) +
                               " diverging from the committed order"});
    }

    // real time: an op committed before another was submitted precedes it
    std::map<OpId, double> submit_time;
    for (const SubmitEntry& sub : trace.submits) {
        auto [it, fresh] = submit_time.emplace(sub.op, sub.time_ms);
        if (!fresh)
            it->second = std::min(it->second, sub.time_ms);
    }
    for (const auto& [object, canon] : canonical) {
        // suffix minimum of commit times in index order
        std::vector<const CommitRecord*> in_order;
        in_order.reserve(canon.size());
        for (const auto& [index, rec] : canon)
            in_order.push_back(rec);
        std::vector<double> suffix_min(in_order.size() + 1,
                                       std::numeric_limits<double>::infinity());
        for (std::size_t i = in_order.size(); i-- > 0;)
            suffix_min[i] = std::min(suffix_min[i + 1], in_order[i]->commit_ms);
        for (std::size_t i = 0; i < in_order.size(); ++i) {
            auto sub = submit_time.find(in_order[i]->op);
            if (sub == submit_time.end())
                continue;
            if (suffix_min[i + 1] < sub->second)
                out.push_back({"per_object_order",
                               "object " + std::to_string(object) + ": " +
                                   describe(*in_order[i]) + " submitted at " +
                                   std::to_string(sub->second) +
                                   " is ordered before an op that committed earlier"});
        }
    }
    return out;
}

std::vector<Violation> check_liveness(const RunTrace& trace)
{
    std::vector<Violation> out;

    // exactly-once holds unconditionally
    std::map<OpId, int> commit_count;
    for (const CommitRecord& rec : trace.commits)
        commit_count[rec.op] += 1;
    for (const auto& [op, count] : commit_count)
        if (count > 1)
            out.push_back({"liveness", "op " + to_string(op) + " committed " +
                                           std::to_string(count) + " times"});

    std::set<ReplicaId> alive;
    for (int r = 0; r < trace.n; ++r)
        alive.insert(r);
    for (const CrashEntry& entry : trace.crashes) {
        if (entry.recover)
            alive.insert(entry.replica);
        else
            alive.erase(entry.replica);
    }
    double surviving_weight = 0.0;
    for (ReplicaId r : alive)
        surviving_weight += trace.initial_node_weights.weight_of(r);
    const double threshold = trace.initial_node_weights.total() / 2.0;
    const bool quorum_survives = surviving_weight >= threshold;

    std::set<OpId> failed;
    for (const FailEntry& f : trace.failures)
        failed.insert(f.op);

    std::set<OpId> submitted;
    for (const SubmitEntry& sub : trace.submits)
        submitted.insert(sub.op);

    for (const OpId& op : submitted) {
        const bool committed = commit_count.count(op) > 0;
        if (committed)
            continue;
        if (quorum_survives)
            out.push_back({"liveness", "op " + to_string(op) +
                                           " never committed although a quorum survived"});
        else if (!failed.count(op))
            out.push_back({"liveness",
                           "op " + to_string(op) + " left unresolved: neither committed nor failed"});
    }
    return out;
}

std::vector<Violation> check_all(const RunTrace& trace)
{
    std::vector<Violation> out = check_quorum_intersection(trace.commits);
    auto append = [&out](std::vector<Violation> more) {
        out.insert(out.end(), std::make_move_iterator(more.begin()),
                   std::make_move_iterator(more.end()));
    };
    append(check_cross_path_exclusion(trace.commits, trace.attempts));
    append(check_per_object_order(trace));
    append(check_liveness(trace));
    return out;
}

} // namespace woc
