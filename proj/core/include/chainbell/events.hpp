#pragma once

#include <cstdint>

#include "chainbell/chain.hpp"

namespace chainbell {

/// One local detection: which station, which setting, the +-1 outcome and the
/// arrival timestamp (trial base time plus the model's emission offset).
struct DetectionEvent {
    std::uint64_t trial_id;
    Side side;
    int setting;
    int outcome;
    double timestamp;

    bool operator==(const DetectionEvent&) const = default;
};

}  // namespace chainbell
