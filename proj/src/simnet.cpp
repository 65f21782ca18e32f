#include "woc/simnet.hpp"

#include <algorithm>

#include "woc/common.hpp"

namespace woc {

double LinkModel::p99_one_way() const
{
    double worst = 0.0;
    for (std::size_t i = 0; i < replica_delay_ms.size(); ++i)
        for (std::size_t j = 0; j < replica_delay_ms.size(); ++j)
            if (i != j)
                worst = std::max(worst, replica_delay_ms[i] + replica_delay_ms[j]);
    return worst + 0.99 * jitter_ms;
}

std::vector<double> latency_profile(const std::string& name, int n)
{
    if (n < 3 || n > 9)
        throw ConfigError("latency profiles cover 3..9 replicas");

    if (name == "homogeneous")
        return std::vector<double>(static_cast<std::size_t>(n), 2.0);

    if (name == "heterogeneous") {
        // One-way delays; low replica ids are the slow machines, so the
        // id-ordered initial ranking starts out pessimal and has to be
        // learned away.
        static const double ladder[9] = {4.0, 3.5, 3.5, 3.0, 3.0, 2.5, 2.5, 2.0, 2.0};
        return std::vector<double>(ladder, ladder + n);
    }

    throw ConfigError("unknown latency profile: " + name);
}

} // namespace woc
