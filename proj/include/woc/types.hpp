#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "woc/common.hpp"

namespace woc {

/// Globally unique operation identity: issuing client plus per-client sequence.
struct OpId {
    ClientId client = 0;
    std::uint64_t seq = 0;

    auto operator<=>(const OpId&) const = default;
};

inline std::string to_string(const OpId& id)
{
    return std::to_string(id.client) + ":" + std::to_string(id.seq);
}

enum class OpKind : std::uint8_t { Read, Write };

enum class Path : std::uint8_t { Fast, Slow };

/// One client request targeting a single object. The payload is modeled by
/// its length; the bytes themselves carry no information in simulation.
struct Operation {
    OpId id;
    ObjectId object = 0;
    OpKind kind = OpKind::Write;
    std::uint32_t payload_bytes = 512;
    double submit_ms = 0.0;      // dispatch time into the system
    ReplicaId coordinator = -1;  // replica that first handled the request
};

inline bool conflicts(OpKind a, OpKind b)
{
    return !(a == OpKind::Read && b == OpKind::Read);
}

enum class MsgKind : std::uint8_t {
    FastPropose,
    FastAccept,
    Conflict,
    FastCommit,
    SlowPropose,
    SlowAccept,
    SlowCommit,
};

const char* to_string(MsgKind kind);

/// Wire message. Fast-path messages carry exactly one operation; slow-path
/// messages carry the proposed batch. `priority` is present iff the kind is
/// SlowPropose or SlowAccept. FastCommit/SlowCommit additionally carry the
/// quorum membership and per-object commit indexes needed for auditing and
/// in-order application.
struct ProtocolMessage {
    MsgKind kind = MsgKind::FastPropose;
    std::vector<Operation> ops;
    ReplicaId sender = -1;
    std::optional<double> priority;         // slow path only
    std::uint64_t round = 0;                // slow attempt round, matches accepts
    std::vector<ReplicaId> quorum;          // commit messages
    std::vector<std::uint64_t> commit_indexes;  // commit messages, one per op

    const Operation& op() const { return ops.front(); }
};

enum class ObjectClass : std::uint8_t { Independent, Common, Hot };

const char* to_string(ObjectClass cls);

/// Audit entry per committed operation, consumed by the checker.
struct CommitRecord {
    OpId op;
    ObjectId object = 0;
    OpKind kind = OpKind::Write;
    Path path = Path::Fast;
    std::vector<ReplicaId> quorum_members;
    double accumulated_weight = 0.0;
    double threshold_used = 0.0;
    double commit_ms = 0.0;
    std::uint64_t commit_index = 0;  // per-object sequence number, starts at 1
};

} // namespace woc
