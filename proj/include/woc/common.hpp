#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace woc {

using ReplicaId = int;
using ClientId = int;
using ObjectId = std::uint64_t;

/// Raised when a protocol-level precondition is violated (double register,
/// clear of an unknown entry, guard misuse). These are bugs in the caller,
/// not recoverable runtime conditions.
class ProtocolBug : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void protocol_check(bool cond, const std::string& msg)
{
    if (!cond)
        throw ProtocolBug(msg);
}

/// Raised for malformed scenario/weight configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace woc
