#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "woc/cabinet.hpp"
#include "woc/fast_path.hpp"
#include "woc/object_manager.hpp"
#include "woc/simnet.hpp"
#include "woc/slow_path.hpp"
#include "woc/types.hpp"

namespace woc {

/// Everything a single deterministic run needs. Built by the harness from a
/// ScenarioConfig; unit tests construct it directly.
struct SimParams {
    ProtocolMode mode = ProtocolMode::Woc;
    int n_replicas = 5;
    int t = 2;
    std::uint64_t seed = 1;

    LinkModel links;
    WeightPolicy weight_policy;
    ClassifierConfig classifier;

    // workload
    int client_count = 2;
    int batch_size = 10;            // ops per client request and leader batch cap
    int max_inflight = 5;           // outstanding requests per client
    double request_interval_ms = 2.0;
    double duration_ms = 1500.0;    // 0 => budget mode
    std::uint64_t op_budget = 0;    // 0 => duration mode
    std::uint32_t payload_bytes = 512;
    double read_fraction = 0.0;

    // object pools; conflict_fraction < 0 selects the three-way mix
    double conflict_fraction = -1.0;
    double mix_independent = 0.90;
    double mix_common = 0.05;
    double mix_hot = 0.05;
    std::uint64_t hot_pool = 4;
    std::uint64_t common_pool = 64;
    std::uint64_t independent_pool = 4000;
    bool adaptive_classes = false;  // true: never pin, classification learns

    // timeouts
    double fast_timeout_mult = 4.0;  // x p99 one-way delay
    double slow_timeout_mult = 6.0;
    int slow_retry_limit = 3;
    double client_retry_ms = 250.0;
    int client_retry_limit = 8;

    // fault schedule
    std::vector<CrashEntry> crashes;  // recover=false -> crash, true -> recover

    std::uint64_t event_budget = 50'000'000;  // livelock guard
};

class Simulation {
public:
    explicit Simulation(SimParams params);

    /// Processes events in (time, seq) order until quiescence (clients done
    /// and queue empty) or the event budget trips. Call once.
    void run();

    const RunTrace& trace() const { return trace_; }
    const ObjectManager& object_manager() const { return *om_; }
    ObjectManager& object_manager() { return *om_; }
    const SimParams& params() const { return params_; }
    double now() const { return now_; }
    std::uint64_t submitted_ops() const { return trace_.submits.size(); }

    ReplicaId leader() const { return leader_; }
    double fast_timeout_ms() const { return fast_timeout_; }
    double slow_timeout_ms() const { return slow_timeout_; }

private:
    struct Replica {
        ReplicaId id = -1;
        bool alive = true;
        double busy_until = 0.0;
        // local view used for Alg-1 verdicts, keyed object -> op -> kind
        std::map<ObjectId, std::map<OpId, OpKind>> inflight;
        std::map<OpId, MsgKind> fast_verdicts;
        // in-order application
        std::map<ObjectId, std::uint64_t> next_apply;
        std::map<ObjectId, std::map<std::uint64_t, Operation>> holdback;
        FastCoordinator fast;
        std::unique_ptr<SlowLeader> slow;  // leader only
    };

    struct Request {
        std::uint64_t id = 0;
        std::vector<Operation> ops;
        std::set<OpId> open;
        double dispatched_ms = 0.0;
        int retries = 0;
        bool done() const { return open.empty(); }
    };

    struct Client {
        ClientId id = -1;
        std::uint64_t next_seq = 1;
        std::uint64_t backlog = 0;  // generated but not yet dispatched requests
        std::map<std::uint64_t, Request> inflight;
        std::uint64_t next_request_id = 1;
        int rotation = 0;
        bool generating = true;
    };

    // event handlers
    void handle(const SimEvent& ev);
    void handle_client_tick(ClientId c);
    void handle_client_arrival(const SimEvent& ev);
    void handle_client_retry(const SimEvent& ev);
    void handle_client_reply(const SimEvent& ev);
    void handle_deliver(const SimEvent& ev);
    void handle_fast_propose(Replica& at, const ProtocolMessage& msg, double when);
    void handle_fast_accept(Replica& at, const ProtocolMessage& msg, double when);
    void handle_conflict(Replica& at, const ProtocolMessage& msg, double when);
    void handle_fast_commit(Replica& at, const ProtocolMessage& msg, double when);
    void handle_slow_propose(Replica& at, const ProtocolMessage& msg, double when);
    void handle_slow_accept(Replica& at, const ProtocolMessage& msg, double when);
    void handle_slow_commit(Replica& at, const ProtocolMessage& msg, double when);
    void handle_slow_handoff(const SimEvent& ev);
    void handle_fast_timeout(const SimEvent& ev);
    void handle_slow_timeout(const SimEvent& ev);
    void handle_crash(ReplicaId r, double when);
    void handle_recover(ReplicaId r, double when);

    // protocol actions
    void route_operation(Replica& at, Operation op, double when);
    void start_fast(Replica& at, const Operation& op, double when);
    void fast_fallback(Replica& at, const OpId& id, double when, const char* reason);
    void note_fast_response(const OpId& id, ReplicaId responder, ObjectId object, double when);
    void do_fast_commit(Replica& at, const OpId& id, double when);
    void submit_slow(Replica& from, const Operation& op, double when);
    void try_slow_propose(double when);
    void do_slow_commit(Replica& leader, double when);
    void apply_commit(Replica& at, const Operation& op, std::uint64_t index, double when);

    // plumbing
    Replica& replica(ReplicaId r) { return replicas_[static_cast<std::size_t>(r)]; }
    double advance_busy(Replica& r, double arrival, double service);
    void send_message(ReplicaId from, ReplicaId to, ProtocolMessage msg, double when);
    void broadcast(ReplicaId from, const ProtocolMessage& msg, double when);
    void reply_client(ClientId c, const OpId& op, bool failed, ReplicaId from, double when);
    void try_dispatch(Client& c, double when);
    Operation make_operation(Client& c, double when);
    ObjectId draw_object(Client& c);
    ReplicaId pick_target(Client& c) const;
    bool issuing_open(double when) const;
    void note_failure(const OpId& op, double when, const std::string& reason);

    SimParams params_;
    EventQueue queue_;
    Rng rng_;
    std::unique_ptr<ObjectManager> om_;
    std::vector<Replica> replicas_;
    std::vector<Client> clients_;
    ReplicaId leader_ = 0;
    double now_ = 0.0;
    double fast_timeout_ = 0.0;
    double slow_timeout_ = 0.0;
    std::uint64_t ops_generated_ = 0;
    std::uint64_t events_processed_ = 0;
    bool ran_ = false;
    RunTrace trace_;
    // responder latencies for the attempt currently collecting at the leader
    std::map<ReplicaId, double> slow_responder_latency_;
    std::map<std::uint64_t, double> slow_round_start_;
    std::map<OpId, AttemptSpan> open_fast_spans_;
    // round-trip probes so response latencies are recorded even when the
    // accept arrives after the attempt finished
    struct RttProbe {
        double start_ms = 0.0;
        int remaining = 0;
    };
    std::map<OpId, RttProbe> fast_rtt_;
    std::set<OpId> failed_ops_;
};

} // namespace woc
