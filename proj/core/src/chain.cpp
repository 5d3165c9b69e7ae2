#include "chainbell/chain.hpp"

namespace chainbell {

std::vector<ChainedPair> chained_pairs(SettingsCount n) {
    const int nn = n.value();
    std::vector<ChainedPair> pairs;
    pairs.reserve(2 * static_cast<std::size_t>(nn));
    for (int i = 1; i <= 2 * nn; ++i) {
        const int bob = (i + 1) / 2;                     // 1,1,2,2,...,n,n
        const int alice = (i == 2 * nn) ? 1 : (i + 2) / 2;  // 1,2,2,3,...,n,n,1
        const int sign = (i == 2 * nn) ? -1 : +1;
        pairs.push_back({i, alice, bob, sign});
    }
    return pairs;
}

std::optional<std::size_t> pair_index_of(SettingsCount n, int alice_setting, int bob_setting) {
    const int nn = n.value();
    if (alice_setting < 1 || alice_setting > nn || bob_setting < 1 || bob_setting > nn) {
        return std::nullopt;
    }
    // Pair 2k-1 is (k, k), pair 2k is (k+1, k), pair 2n is (1, n).
    if (alice_setting == bob_setting) {
        return static_cast<std::size_t>(2 * bob_setting - 2);
    }
    if (alice_setting == bob_setting + 1) {
        return static_cast<std::size_t>(2 * bob_setting - 1);
    }
    if (alice_setting == 1 && bob_setting == nn) {
        return static_cast<std::size_t>(2 * nn - 1);
    }
    return std::nullopt;
}

}  // namespace chainbell
