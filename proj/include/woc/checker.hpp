#pragma once

#include <string>
#include <vector>

#include "woc/simnet.hpp"
#include "woc/types.hpp"

namespace woc {

struct Violation {
    std::string check;  // quorum_intersection | cross_path_exclusion | per_object_order | liveness
    std::string detail;
};

inline std::string to_string(const Violation& v)
{
    return v.check + ": " + v.detail;
}

/// Every pair of commits on the same object and path domain must have
/// intersecting quorums, and each record must meet its own threshold.
std::vector<Violation> check_quorum_intersection(const std::vector<CommitRecord>& records);

/// For each object, no committed fast attempt interval may overlap a
/// committed slow attempt interval of a conflicting operation.
std::vector<Violation> check_cross_path_exclusion(const std::vector<CommitRecord>& records,
                                                  const std::vector<AttemptSpan>& attempts);

/// All replicas apply each object's operations in one order, strictly by
/// commit index, and that order respects real time (an op committed before
/// another was submitted must be ordered first).
std::vector<Violation> check_per_object_order(const RunTrace& trace);

/// If the replicas surviving all crashes still hold a node-weight quorum,
/// every submitted op must have exactly one commit record; otherwise ops may
/// fail but must be reported failed rather than left unresolved. Exactly-once
/// is enforced unconditionally.
std::vector<Violation> check_liveness(const RunTrace& trace);

/// Runs all four checks.
std::vector<Violation> check_all(const RunTrace& trace);

} // namespace woc
