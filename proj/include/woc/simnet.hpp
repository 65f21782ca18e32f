#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "woc/types.hpp"
#include "woc/weights.hpp"

namespace woc {

/// Deterministic uniform generator. All randomness in a simulation instance
/// flows through one seeded stream; draws use a fixed 53-bit scaling so runs
/// replay bit-identically.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64()
    {
        // splitmix64; small, portable, stable across standard libraries
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

private:
    std::uint64_t state_;
};

/// Per-replica one-way delays plus processing costs. The delay of a link is
/// the sum of both endpoints' one-way delays plus a uniform jitter draw.
struct LinkModel {
    std::vector<double> replica_delay_ms;  // one-way, per replica
    double client_delay_ms = 0.25;
    double jitter_ms = 1.0;
    double proc_msg_ms = 0.01;     // per protocol message reception
    double proc_ingest_ms = 0.02;  // per operation ingested from a client

    double replica_link(ReplicaId a, ReplicaId b, Rng& rng) const
    {
        return replica_delay_ms[static_cast<std::size_t>(a)] +
               replica_delay_ms[static_cast<std::size_t>(b)] + rng.uniform(0.0, jitter_ms);
    }

    double client_link(ReplicaId r, Rng& rng) const
    {
        return client_delay_ms + replica_delay_ms[static_cast<std::size_t>(r)] +
               rng.uniform(0.0, jitter_ms);
    }

    /// 99th-percentile one-way delay across replica pairs; anchors timeouts.
    double p99_one_way() const;
};

/// Builds the named latency profile truncated to n replicas.
/// Profiles: "heterogeneous" (default ladder), "homogeneous".
std::vector<double> latency_profile(const std::string& name, int n);

enum class EventKind : std::uint8_t {
    Deliver,        // protocol message to a replica
    ClientArrival,  // request batch arriving at a replica
    SlowHandoff,    // operation forwarded to the leader
    FastTimeout,
    SlowTimeout,
    Crash,
    Recover,
    ClientTick,   // open-loop generation
    ClientRetry,  // request-level resubmission timer
    ClientReply,  // commit/fail notification reaching a client
};

struct SimEvent {
    double time = 0.0;
    std::uint64_t seq = 0;  // insertion order, breaks time ties
    EventKind kind = EventKind::Deliver;

    ProtocolMessage msg;                  // Deliver
    ReplicaId to = -1;                    // Deliver/ClientArrival/SlowHandoff target
    std::vector<Operation> request_ops;   // ClientArrival
    ClientId client = -1;                 // ClientArrival/ClientTick/ClientRetry/ClientReply
    std::uint64_t request_id = 0;         // ClientArrival/ClientRetry
    Operation handoff_op;                 // SlowHandoff
    OpId op_ref;                          // FastTimeout/ClientReply
    std::uint64_t round = 0;              // SlowTimeout
    ReplicaId replica = -1;               // Crash/Recover
    bool failed = false;                  // ClientReply
};

/// Min-heap on (time, seq); seq increases strictly at insertion.
class EventQueue {
public:
    void schedule(double time, SimEvent ev)
    {
        ev.time = time;
        ev.seq = next_seq_++;
        heap_.push(std::move(ev));
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

    SimEvent pop()
    {
        SimEvent ev = heap_.top();
        heap_.pop();
        return ev;
    }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const
        {
            if (a.time != b.time)
                return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

// ---- run trace, consumed by the checker and the trace file writer ----

struct SubmitEntry {
    OpId op;
    ObjectId object = 0;
    OpKind kind = OpKind::Write;
    ClientId client = 0;
    double time_ms = 0.0;
};

struct AttemptSpan {
    Path path = Path::Fast;
    ObjectId object = 0;
    OpId op;
    OpKind kind = OpKind::Write;
    double start_ms = 0.0;
    double end_ms = 0.0;
    bool committed = false;
    ReplicaId coordinator = -1;
};

struct ApplyEntry {
    ReplicaId replica = -1;
    ObjectId object = 0;
    OpId op;
    std::uint64_t commit_index = 0;
    double time_ms = 0.0;
};

struct FailEntry {
    OpId op;
    double time_ms = 0.0;
    std::string reason;
};

struct CrashEntry {
    ReplicaId replica = -1;
    double time_ms = 0.0;
    bool recover = false;
};

struct RunTrace {
    std::string protocol;
    int n = 0;
    int t = 0;
    std::uint64_t seed = 0;
    WeightVector initial_node_weights;
    std::vector<SubmitEntry> submits;
    std::vector<AttemptSpan> attempts;
    std::vector<CommitRecord> commits;
    std::vector<ApplyEntry> applies;
    std::vector<FailEntry> failures;
    std::vector<CrashEntry> crashes;
};

} // namespace woc
