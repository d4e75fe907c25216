#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dagsearch/search_dag.hpp"

namespace dagsearch {

/// Feature bags are encoded as sorted 16-bit big-endian feature indices, so
/// insertion order never matters and lexicographic key order equals
/// numeric bag order.
namespace feature_bag {

inline StateKey encode(const std::vector<int>& sorted_features) {
    StateKey key;
    key.reserve(sorted_features.size() * 2);
    for (int f : sorted_features) {
        key.push_back(static_cast<char>((f >> 8) & 0xff));
        key.push_back(static_cast<char>(f & 0xff));
    }
    return key;
}

inline std::vector<int> decode(const StateKey& key) {
    std::vector<int> features;
    features.reserve(key.size() / 2);
    for (std::size_t i = 0; i + 1 < key.size(); i += 2) {
        features.push_back((static_cast<unsigned char>(key[i]) << 8) |
                           static_cast<unsigned char>(key[i + 1]));
    }
    return features;
}

inline std::size_t size(const StateKey& key) { return key.size() / 2; }

/// Key with one feature appended, preserving sort order.
StateKey with_feature(const StateKey& key, int feature);

/// Size of the intersection of two sorted bags.
int shared_count(const StateKey& a, const StateKey& b);

}  // namespace feature_bag

}  // namespace dagsearch
