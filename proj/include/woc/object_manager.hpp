#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "woc/types.hpp"
#include "woc/weights.hpp"

namespace woc {

/// Per-object access statistics over a tumbling window.
struct ObjectStats {
    std::uint64_t op_count = 0;
    std::uint64_t conflict_count = 0;  // ops that found a conflicting in-flight op
    std::set<ClientId> window_clients;
    double last_window_reset_ms = 0.0;

    std::size_t distinct_clients() const { return window_clients.size(); }
    double conflict_rate() const
    {
        return op_count == 0 ? 0.0 : static_cast<double>(conflict_count) / static_cast<double>(op_count);
    }
};

struct ClassifierConfig {
    double independent_max_conflict_rate = 0.05;
    double hot_min_conflict_rate = 0.50;
    std::uint64_t window_ops = 1000;
    double window_ms = 1000.0;
};

/// Pure classification rule. An object with no history is Independent.
ObjectClass classify(const ObjectStats& stats, const ClassifierConfig& cfg);

struct WeightPolicy {
    double object_ratio = 1.40;    // steepness for per-object vectors
    double node_ratio = 1.0;       // steepness for the global vector
    std::uint64_t rerank_window = 100;  // commits between re-ranks
    double hysteresis = 0.10;      // min relative EWMA gap to adopt a rank inversion
    bool adaptive = true;          // false pins the initial id-order ranking
};

/// Single logical authority for object metadata within a run: classes,
/// statistics, the authoritative in-flight table used for routing, latency
/// estimates, weight vectors and the commit ledger. Invoked only from the
/// simulation event loop.
class ObjectManager {
public:
    ObjectManager(int n_replicas, WeightPolicy policy, ClassifierConfig classifier);

    // ---- classification ----

    /// Learned class unless the workload pinned one.
    ObjectClass object_class(ObjectId obj) const;
    void pin_class(ObjectId obj, ObjectClass cls);
    /// Records an op against the object's stats window (call at routing time).
    void note_op(ObjectId obj, ClientId client, bool saw_conflict, double now_ms);
    const ObjectStats* stats(ObjectId obj) const;

    // ---- routing & in-flight tracking ----

    /// Fast iff the class is Independent and no conflicting operation is in
    /// flight on the object. Does not mutate state.
    Path route(const Operation& op) const;
    bool has_conflicting_inflight(ObjectId obj, OpKind kind) const;
    bool has_inflight(ObjectId obj) const;
    /// True when the object currently has an uncommitted fast-path operation.
    bool has_fast_inflight(ObjectId obj) const;
    /// True when this specific operation is registered on either path.
    bool op_inflight(const Operation& op) const;

    void register_inflight(const Operation& op, Path path);
    void clear_inflight(const Operation& op);

    // ---- latency statistics & weights ----

    /// Feeds the per-object and global EWMAs. Throws on non-positive latency.
    void record_response(ReplicaId replica, ObjectId obj, double latency_ms);
    double global_ewma(ReplicaId replica) const;

    /// Current weight vector for the object. Objects without enough history
    /// inherit the globally learned ranking.
    const WeightVector& object_weights(ObjectId obj);
    const WeightVector& node_weights() const { return node_weights_; }
    /// Feeds one slow-path responder latency into the priority estimate.
    void record_node_response(ReplicaId replica, double latency_ms);
    /// Called once per slow commit with the responders of that round; feeds
    /// the estimates and re-ranks node priorities on the cadence window.
    void update_node_priorities(const std::map<ReplicaId, double>& responder_latency_ms);

    // ---- commit ledger ----

    /// Appends the audit record, assigns the per-object commit index and
    /// advances re-rank bookkeeping. Returns the assigned index.
    std::uint64_t append_commit(CommitRecord rec);
    bool committed(const OpId& id) const { return committed_.count(id) > 0; }
    const std::vector<CommitRecord>& ledger() const { return ledger_; }

private:
    struct PerObject {
        ObjectStats stats;
        std::optional<ObjectClass> pinned;
        std::map<OpId, std::pair<OpKind, Path>> inflight;
        std::map<ReplicaId, Ewma> latency;
        std::optional<WeightVector> weights;  // unset -> inherit global ranking
        std::uint64_t commits_since_rerank = 0;
        std::uint64_t next_commit_index = 1;
    };

    PerObject& obj(ObjectId id);
    const PerObject* find(ObjectId id) const;
    void maybe_rerank_object(ObjectId id, PerObject& po);
    void maybe_rerank_global();
    /// Applies the hysteresis rule: adopt `candidate` unless some inversion
    /// relative to `current` has an EWMA gap below the configured margin.
    bool adopt_ranking(const std::vector<ReplicaId>& current,
                       const std::vector<ReplicaId>& candidate,
                       const std::map<ReplicaId, double>& ewma) const;

    int n_;
    WeightPolicy policy_;
    ClassifierConfig classifier_;
    std::map<ObjectId, PerObject> objects_;
    std::map<ReplicaId, Ewma> global_latency_;
    std::vector<ReplicaId> global_ranking_;   // rank -> replica
    WeightVector global_object_weights_;      // object_ratio over global ranking
    WeightVector node_weights_;               // node_ratio over node ranking
    std::map<ReplicaId, Ewma> node_latency_;
    std::uint64_t commits_since_global_rerank_ = 0;
    std::uint64_t slow_commits_since_node_rerank_ = 0;
    std::vector<CommitRecord> ledger_;
    std::set<OpId> committed_;
};

} // namespace woc
