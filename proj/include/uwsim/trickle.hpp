#pragma once

#include <cstdint>

namespace uwsim {

struct TrickleState {
    std::int64_t i_min_ms = 4096;
    int i_doublings = 4;
    std::int64_t i_max_ms = 65536;
    std::int64_t current_interval_ms = 4096;
    int inconsistency_count = 0;
    int inconsistency_threshold = 1;

    /// Fresh state at i_min with i_max = i_min * 2^doublings.
    static TrickleState make(std::int64_t i_min_ms, int i_doublings, int threshold);
};

enum class TrickleEvent { interval_expired, consistency, inconsistency };

struct TrickleStep {
    TrickleState state;
    bool emit_dio = false;
    bool reset = false;  // interval was forced back to i_min
};

/// interval_expired: emit, double (capped at i_max) and clear the inconsistency
/// count. inconsistency: count it; once the threshold is reached the interval
/// drops to i_min and the count clears. consistency: no change.
TrickleStep trickle_step(const TrickleState& trickle, TrickleEvent event);

}  // namespace uwsim
