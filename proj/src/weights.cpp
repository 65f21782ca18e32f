#include "woc/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace woc {

double WeightVector::total() const
{
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double WeightVector::weight_of(ReplicaId r) const
{
    return weights[static_cast<std::size_t>(rank_of(r))];
}

int WeightVector::rank_of(ReplicaId r) const
{
    for (std::size_t i = 0; i < rank_to_replica.size(); ++i)
        if (rank_to_replica[i] == r)
            return static_cast<int>(i);
    throw ConfigError("weight vector has no rank for replica " + std::to_string(r));
}

void WeightVector::validate() const
{
    const std::size_t n = weights.size();
    if (n < 3)
        throw ConfigError("weight vector needs at least 3 replicas");
    if (rank_to_replica.size() != n)
        throw ConfigError("rank map size does not match weight count");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
            throw ConfigError("weights must be strictly positive and finite");
        if (i > 0 && weights[i] > weights[i - 1])
            throw ConfigError("weights must be non-increasing by rank");
    }
    std::vector<bool> seen(n, false);
    for (ReplicaId r : rank_to_replica) {
        if (r < 0 || static_cast<std::size_t>(r) >= n || seen[static_cast<std::size_t>(r)])
            throw ConfigError("rank map is not a permutation of replica ids");
        seen[static_cast<std::size_t>(r)] = true;
    }
}

WeightVector geometric_weights(int n, double ratio)
{
    if (n < 3)
        throw std::domain_error("replica count must be at least 3");
    if (ratio < 1.0 || ratio > 2.0)
        throw std::domain_error("weight ratio must lie in [1.0, 2.0]");

    WeightVector wv;
    wv.ratio = ratio;
    wv.weights.resize(static_cast<std::size_t>(n));
    wv.rank_to_replica.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        wv.weights[static_cast<std::size_t>(i)] = std::pow(ratio, n - 1 - i);
        wv.rank_to_replica[static_cast<std::size_t>(i)] = i;
    }
    return wv;
}

ConsensusThreshold consensus_threshold(const WeightVector& wv)
{
    return ConsensusThreshold{wv.total() / 2.0};
}

InvariantReport check_invariants(const WeightVector& wv, int t)
{
    const int n = wv.size();
    if (t < 1 || t > (n - 1) / 2)
        throw std::invalid_argument("fault threshold t must lie in 1..floor((n-1)/2)");

    InvariantReport rep;
    rep.threshold = consensus_threshold(wv).value;
    rep.top_t_sum = std::accumulate(wv.weights.begin(), wv.weights.begin() + t, 0.0);
    rep.top_t_plus_1_sum = rep.top_t_sum + wv.weights[static_cast<std::size_t>(t)];
    rep.i1_holds = rep.top_t_plus_1_sum > rep.threshold;
    rep.i2_holds = rep.top_t_sum < rep.threshold;
    return rep;
}

std::optional<RatioInterval> feasible_ratio_interval(int n, int t, double step)
{
    if (!(step > 0.0))
        throw std::invalid_argument("grid step must be positive");

    std::optional<double> lo, hi;
    for (long k = 0;; ++k) {
        const double ratio = 1.0 + static_cast<double>(k) * step;
        if (ratio > 2.0 + step * 1e-9)
            break;
        const InvariantReport rep = check_invariants(geometric_weights(n, std::min(ratio, 2.0)), t);
        if (rep.i1_holds && rep.i2_holds) {
            if (!lo)
                lo = ratio;
            hi = ratio;
        }
    }
    if (!lo)
        return std::nullopt;
    return RatioInterval{*lo, *hi};
}

WeightVector rank_and_assign(const std::map<ReplicaId, double>& latency_ms, double ratio)
{
    if (latency_ms.empty())
        throw std::invalid_argument("latency table is empty");
    for (const auto& [replica, latency] : latency_ms)
        if (!(latency > 0.0) || !std::isfinite(latency))
            throw std::invalid_argument("latency for replica " + std::to_string(replica) +
                                        " must be positive and finite");

    std::vector<std::pair<ReplicaId, double>> order(latency_ms.begin(), latency_ms.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second < b.second;
        return a.first < b.first;
    });

    WeightVector wv = geometric_weights(static_cast<int>(order.size()), ratio);
    for (std::size_t i = 0; i < order.size(); ++i)
        wv.rank_to_replica[i] = order[i].first;
    return wv;
}

} // namespace woc
