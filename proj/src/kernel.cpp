#include "dagsearch/kernel.hpp"

#include "dagsearch/feature_bag.hpp"

namespace dagsearch {

namespace feature_bag {

StateKey with_feature(const StateKey& key, int feature) {
    char hi = static_cast<char>((feature >> 8) & 0xff);
    char lo = static_cast<char>(feature & 0xff);
    StateKey out;
    out.reserve(key.size() + 2);
    std::size_t i = 0;
    unsigned int fv = static_cast<unsigned int>(feature);
    while (i + 1 < key.size()) {
        unsigned int v = (static_cast<unsigned char>(key[i]) << 8) |
                         static_cast<unsigned char>(key[i + 1]);
        if (v < fv) {
            out.push_back(key[i]);
            out.push_back(key[i + 1]);
            i += 2;
        } else {
            break;
        }
    }
    out.push_back(hi);
    out.push_back(lo);
    out.append(key, i, key.size() - i);
    return out;
}

int shared_count(const StateKey& a, const StateKey& b) {
    int count = 0;
    std::size_t i = 0, j = 0;
    while (i + 1 < a.size() && j + 1 < b.size()) {
        unsigned int va = (static_cast<unsigned char>(a[i]) << 8) |
                          static_cast<unsigned char>(a[i + 1]);
        unsigned int vb = (static_cast<unsigned char>(b[j]) << 8) |
                          static_cast<unsigned char>(b[j + 1]);
        if (va < vb) {
            i += 2;
        } else if (vb < va) {
            j += 2;
        } else {
            ++count;
            i += 2;
            j += 2;
        }
    }
    return count;
}

}  // namespace feature_bag

double SharedFeatureKernel::cov(const StateKey& a, const StateKey& b) const {
    return (feature_bag::shared_count(a, b) + 1.0) / (bag_limit_ + 1.0);
}

double SharedCountKernel::cov(const StateKey& a, const StateKey& b) const {
    double c = feature_bag::shared_count(a, b);
    if (a == b) c += 1.0;
    return c;
}

double BoardOverlapKernel::cov(const StateKey& a, const StateKey& b) const {
    int overlap = 0;
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] != '.' && a[i] == b[i]) ++overlap;
    }
    return overlap / 10.0;
}

}  // namespace dagsearch
