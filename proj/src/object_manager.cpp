#include "woc/object_manager.hpp"

#include <algorithm>
#include <cmath>

namespace woc {

ObjectClass classify(const ObjectStats& stats, const ClassifierConfig& cfg)
{
    if (stats.op_count == 0)
        return ObjectClass::Independent;
    const double rate = stats.conflict_rate();
    if (rate >= cfg.hot_min_conflict_rate)
        return ObjectClass::Hot;
    if (rate <= cfg.independent_max_conflict_rate && stats.distinct_clients() <= 1)
        return ObjectClass::Independent;
    return ObjectClass::Common;
}

ObjectManager::ObjectManager(int n_replicas, WeightPolicy policy, ClassifierConfig classifier)
    : n_(n_replicas), policy_(policy), classifier_(classifier)
{
    global_ranking_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
        global_ranking_[static_cast<std::size_t>(i)] = i;

    global_object_weights_ = geometric_weights(n_, policy_.object_ratio);
    node_weights_ = geometric_weights(n_, policy_.node_ratio);
}

ObjectManager::PerObject& ObjectManager::obj(ObjectId id)
{
    return objects_[id];
}

const ObjectManager::PerObject* ObjectManager::find(ObjectId id) const
{
    auto it = objects_.find(id);
    return it == objects_.end() ? nullptr : &it->second;
}

ObjectClass ObjectManager::object_class(ObjectId id) const
{
    const PerObject* po = find(id);
    if (!po)
        return ObjectClass::Independent;
    if (po->pinned)
        return *po->pinned;
    return classify(po->stats, classifier_);
}

void ObjectManager::pin_class(ObjectId id, ObjectClass cls)
{
    obj(id).pinned = cls;
}

void ObjectManager::note_op(ObjectId id, ClientId client, bool saw_conflict, double now_ms)
{
    PerObject& po = obj(id);
    ObjectStats& st = po.stats;
    if (st.op_count >= classifier_.window_ops || now_ms - st.last_window_reset_ms >= classifier_.window_ms) {
        st.op_count = 0;
        st.conflict_count = 0;
        st.window_clients.clear();
        st.last_window_reset_ms = now_ms;
    }
    st.op_count += 1;
    if (saw_conflict)
        st.conflict_count += 1;
    st.window_clients.insert(client);
}

const ObjectStats* ObjectManager::stats(ObjectId id) const
{
    const PerObject* po = find(id);
    return po ? &po->stats : nullptr;
}

bool ObjectManager::has_conflicting_inflight(ObjectId id, OpKind kind) const
{
    const PerObject* po = find(id);
    if (!po)
        return false;
    for (const auto& [op_id, entry] : po->inflight)
        if (conflicts(entry.first, kind))
            return true;
    return false;
}

bool ObjectManager::has_inflight(ObjectId id) const
{
    const PerObject* po = find(id);
    return po && !po->inflight.empty();
}

bool ObjectManager::has_fast_inflight(ObjectId id) const
{
    const PerObject* po = find(id);
    if (!po)
        return false;
    for (const auto& [op_id, entry] : po->inflight)
        if (entry.second == Path::Fast)
            return true;
    return false;
}

bool ObjectManager::op_inflight(const Operation& op) const
{
    const PerObject* po = find(op.object);
    return po && po->inflight.count(op.id) > 0;
}

Path ObjectManager::route(const Operation& op) const
{
    if (object_class(op.object) != ObjectClass::Independent)
        return Path::Slow;
    if (has_conflicting_inflight(op.object, op.kind))
        return Path::Slow;
    return Path::Fast;
}

void ObjectManager::register_inflight(const Operation& op, Path path)
{
    PerObject& po = obj(op.object);
    protocol_check(po.inflight.count(op.id) == 0,
                   "double register of in-flight op " + to_string(op.id));
    po.inflight.emplace(op.id, std::make_pair(op.kind, path));
}

void ObjectManager::clear_inflight(const Operation& op)
{
    PerObject& po = obj(op.object);
    auto it = po.inflight.find(op.id);
    protocol_check(it != po.inflight.end(),
                   "clear of unknown in-flight op " + to_string(op.id));
    po.inflight.erase(it);
}

void ObjectManager::record_response(ReplicaId replica, ObjectId id, double latency_ms)
{
    if (!(latency_ms > 0.0) || !std::isfinite(latency_ms))
        throw std::invalid_argument("response latency must be positive");
    obj(id).latency[replica].observe(latency_ms);
    global_latency_[replica].observe(latency_ms);
}

double ObjectManager::global_ewma(ReplicaId replica) const
{
    auto it = global_latency_.find(replica);
    return it != global_latency_.end() && it->second.has_value() ? it->second.value() : 0.0;
}

bool ObjectManager::adopt_ranking(const std::vector<ReplicaId>& current,
                                  const std::vector<ReplicaId>& candidate,
                                  const std::map<ReplicaId, double>& ewma) const
{
    std::vector<int> pos(static_cast<std::size_t>(n_), 0);
    for (std::size_t i = 0; i < current.size(); ++i)
        pos[static_cast<std::size_t>(current[i])] = static_cast<int>(i);

    for (std::size_t i = 0; i < candidate.size(); ++i) {
        for (std::size_t j = i + 1; j < candidate.size(); ++j) {
            const ReplicaId a = candidate[i];
            const ReplicaId b = candidate[j];
            if (pos[static_cast<std::size_t>(a)] > pos[static_cast<std::size_t>(b)]) {
                // candidate inverts the current order of (a, b); require a
                // clear latency gap so jitter cannot flap the ranking
                const double la = ewma.at(a);
                const double lb = ewma.at(b);
                if (!(la < lb * (1.0 - policy_.hysteresis)))
                    return false;
            }
        }
    }
    return true;
}

namespace {

std::optional<std::map<ReplicaId, double>> full_coverage(const std::map<ReplicaId, Ewma>& table, int n)
{
    std::map<ReplicaId, double> out;
    for (int r = 0; r < n; ++r) {
        auto it = table.find(r);
        if (it == table.end() || !it->second.has_value())
            return std::nullopt;
        out[r] = it->second.value();
    }
    return out;
}

} // namespace

void ObjectManager::maybe_rerank_global()
{
    if (!policy_.adaptive)
        return;
    if (commits_since_global_rerank_ < policy_.rerank_window)
        return;
    commits_since_global_rerank_ = 0;

    auto cover = full_coverage(global_latency_, n_);
    if (!cover)
        return;
    WeightVector candidate = rank_and_assign(*cover, policy_.object_ratio);
    if (adopt_ranking(global_ranking_, candidate.rank_to_replica, *cover)) {
        global_ranking_ = candidate.rank_to_replica;
        global_object_weights_ = std::move(candidate);
    }
}

void ObjectManager::maybe_rerank_object(ObjectId, PerObject& po)
{
    if (!policy_.adaptive)
        return;
    if (po.commits_since_rerank < policy_.rerank_window)
        return;
    po.commits_since_rerank = 0;

    auto cover = full_coverage(po.latency, n_);
    if (!cover)
        return;
    WeightVector candidate = rank_and_assign(*cover, policy_.object_ratio);
    const std::vector<ReplicaId>& current =
        po.weights ? po.weights->rank_to_replica : global_object_weights_.rank_to_replica;
    if (adopt_ranking(current, candidate.rank_to_replica, *cover))
        po.weights = std::move(candidate);
}

const WeightVector& ObjectManager::object_weights(ObjectId id)
{
    PerObject& po = obj(id);
    if (po.weights)
        return *po.weights;
    return global_object_weights_;
}

void ObjectManager::record_node_response(ReplicaId replica, double latency_ms)
{
    if (!(latency_ms > 0.0) || !std::isfinite(latency_ms))
        throw std::invalid_argument("response latency must be positive");
    node_latency_[replica].observe(latency_ms);
}

void ObjectManager::update_node_priorities(const std::map<ReplicaId, double>& responder_latency_ms)
{
    for (const auto& [replica, latency] : responder_latency_ms)
        node_latency_[replica].observe(latency);

    slow_commits_since_node_rerank_ += 1;
    if (!policy_.adaptive || slow_commits_since_node_rerank_ < policy_.rerank_window)
        return;
    slow_commits_since_node_rerank_ = 0;

    auto cover = full_coverage(node_latency_, n_);
    if (!cover)
        return;
    WeightVector candidate = rank_and_assign(*cover, policy_.node_ratio);
    if (adopt_ranking(node_weights_.rank_to_replica, candidate.rank_to_replica, *cover))
        node_weights_ = std::move(candidate);
}

std::uint64_t ObjectManager::append_commit(CommitRecord rec)
{
    PerObject& po = obj(rec.object);
    protocol_check(committed_.count(rec.op) == 0,
                   "op " + to_string(rec.op) + " committed twice");
    rec.commit_index = po.next_commit_index++;
    committed_.insert(rec.op);
    po.commits_since_rerank += 1;
    commits_since_global_rerank_ += 1;
    maybe_rerank_object(rec.object, po);
    maybe_rerank_global();
    const std::uint64_t index = rec.commit_index;
    ledger_.push_back(std::move(rec));
    return index;
}

} // namespace woc
