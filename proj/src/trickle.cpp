#include "uwsim/trickle.hpp"

#include <algorithm>

#include "uwsim/types.hpp"

namespace uwsim {

TrickleState TrickleState::make(std::int64_t i_min_ms, int i_doublings, int threshold) {
    if (i_min_ms <= 0) throw DomainError("trickle i_min must be > 0");
    if (i_doublings < 0 || i_doublings > 30) throw DomainError("trickle doublings must be in [0, 30]");
    if (threshold < 1) throw DomainError("trickle inconsistency threshold must be >= 1");
    TrickleState t;
    t.i_min_ms = i_min_ms;
    t.i_doublings = i_doublings;
    t.i_max_ms = i_min_ms << i_doublings;
    t.current_interval_ms = i_min_ms;
    t.inconsistency_count = 0;
    t.inconsistency_threshold = threshold;
    return t;
}

TrickleStep trickle_step(const TrickleState& trickle, TrickleEvent event) {
    TrickleStep step{trickle, false, false};
    TrickleState& t = step.state;
    switch (event) {
        case TrickleEvent::interval_expired:
            step.emit_dio = true;
            t.current_interval_ms = std::min(t.current_interval_ms * 2, t.i_max_ms);
            t.inconsistency_count = 0;
            break;
        case TrickleEvent::inconsistency:
            ++t.inconsistency_count;
            if (t.inconsistency_count >= t.inconsistency_threshold) {
                t.current_interval_ms = t.i_min_ms;
                t.inconsistency_count = 0;
                step.reset = true;
            }
            break;
        case TrickleEvent::consistency:
            break;
    }
    return step;
}

}  // namespace uwsim
