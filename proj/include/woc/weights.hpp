#pragma once

#include <map>
#include <optional>
#include <vector>

#include "woc/common.hpp"

namespace woc {

/// Rank-ordered weight vector. Index 0 is the highest-ranked replica.
/// Used both per object (fast path) and globally (slow path priorities).
struct WeightVector {
    std::vector<double> weights;             // strictly positive, non-increasing
    std::vector<ReplicaId> rank_to_replica;  // rank index -> replica id
    std::optional<double> ratio;             // generator ratio, absent for hand-supplied vectors

    int size() const { return static_cast<int>(weights.size()); }
    double total() const;
    /// Weight assigned to a replica id (inverse of rank_to_replica).
    double weight_of(ReplicaId r) const;
    int rank_of(ReplicaId r) const;

    /// Throws ConfigError unless positive, non-increasing, n >= 3 and the
    /// rank map is a permutation of 0..n-1.
    void validate() const;
};

struct ConsensusThreshold {
    double value = 0.0;
};

struct InvariantReport {
    bool i1_holds = false;  // top t+1 weights strictly exceed the threshold
    bool i2_holds = false;  // top t weights stay strictly below the threshold
    double top_t_plus_1_sum = 0.0;
    double top_t_sum = 0.0;
    double threshold = 0.0;
};

struct RatioInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// w_i = R^(n-1-i) for i in 0..n-1, highest first. rank_to_replica is the
/// identity; callers re-rank via rank_and_assign.
/// Throws std::domain_error for n < 3 or R outside [1.0, 2.0].
WeightVector geometric_weights(int n, double ratio);

/// Half the total weight. Comparisons against it are exact; no epsilon.
ConsensusThreshold consensus_threshold(const WeightVector& wv);

/// Evaluates both fault-tolerance invariants for fault threshold t.
/// Throws std::invalid_argument for t outside 1..floor((n-1)/2).
InvariantReport check_invariants(const WeightVector& wv, int t);

/// Scans R in [1.0, 2.0] on a grid of the given step and returns the lowest
/// and highest grid points where both invariants hold, or nullopt if none.
std::optional<RatioInterval> feasible_ratio_interval(int n, int t, double step);

/// Sorts replicas by ascending smoothed latency (ties broken by lowest id)
/// and assigns geometric weights in that order.
/// Throws std::invalid_argument for empty input or non-positive/non-finite
/// latencies; ratio/size constraints as in geometric_weights.
WeightVector rank_and_assign(const std::map<ReplicaId, double>& latency_ms, double ratio);

/// Exponentially weighted moving average, seeded by the first observation.
class Ewma {
public:
    explicit Ewma(double alpha = 0.2) : alpha_(alpha) {}

    void observe(double sample)
    {
        if (!value_)
            value_ = sample;
        else
            value_ = alpha_ * sample + (1.0 - alpha_) * *value_;
    }

    bool has_value() const { return value_.has_value(); }
    double value() const { return value_.value(); }

private:
    double alpha_;
    std::optional<double> value_;
};

} // namespace woc
