#include "woc/types.hpp"

namespace woc {

const char* to_string(MsgKind kind)
{
    switch (kind) {
    case MsgKind::FastPropose: return "FAST_PROPOSE";
    case MsgKind::FastAccept: return "FAST_ACCEPT";
    case MsgKind::Conflict: return "CONFLICT";
    case MsgKind::FastCommit: return "FAST_COMMIT";
    case MsgKind::SlowPropose: return "SLOW_PROPOSE";
    case MsgKind::SlowAccept: return "SLOW_ACCEPT";
    case MsgKind::SlowCommit: return "SLOW_COMMIT";
    }
    return "?";
}

const char* to_string(ObjectClass cls)
{
    switch (cls) {
    case ObjectClass::Independent: return "independent";
    case ObjectClass::Common: return "common";
    case ObjectClass::Hot: return "hot";
    }
    return "?";
}

} // namespace woc
