#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "chainbell/bounds.hpp"

namespace chainbell {

enum class Side { Alice, Bob };

/// One of the 2n setting pairs entering the chained Bell sum, in chain order.
/// Bob's settings run {1,1,2,2,...,n,n}; Alice's are rotated one step to
/// {1,2,2,3,3,...,n,n,1}. Every term carries sign +1 except the closing pair
/// (1, n), which enters the last group with a minus.
struct ChainedPair {
    int index;          // 1-based position in the chain, 1..2n
    int alice_setting;  // 1..n
    int bob_setting;    // 1..n
    int sign;           // +1, or -1 for index == 2n

    bool operator==(const ChainedPair&) const = default;
};

/// The full chain for n settings: 2n pairs, each local setting appearing
/// exactly twice.
std::vector<ChainedPair> chained_pairs(SettingsCount n);

/// Position (0-based) of (alice_setting, bob_setting) in the chain, or
/// nullopt when the combination is not a chained pair.
std::optional<std::size_t> pair_index_of(SettingsCount n, int alice_setting, int bob_setting);

}  // namespace chainbell
