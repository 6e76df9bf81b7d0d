#include "slitstrip/geometry.hpp"

#include <algorithm>

namespace slitstrip {

HalfIntegerSet::HalfIntegerSet(std::vector<int> twok_values) : elems_(std::move(twok_values)) {
    std::sort(elems_.begin(), elems_.end());
    for (size_t i = 0; i < elems_.size(); ++i) {
        if (elems_[i] <= 0 || elems_[i] % 2 == 0)
            throw std::domain_error("half-integer encoding must be a positive odd integer, got " +
                                    std::to_string(elems_[i]));
        if (i > 0 && elems_[i] == elems_[i - 1])
            throw std::domain_error("half-integer set has a repeated element " +
                                    std::to_string(elems_[i]));
    }
}

bool HalfIntegerSet::contains(HalfInt twok) const {
    return std::binary_search(elems_.begin(), elems_.end(), twok);
}

HalfIntegerSet HalfIntegerSet::without(HalfInt twok) const {
    HalfIntegerSet out;
    out.elems_.reserve(elems_.size());
    bool found = false;
    for (int v : elems_) {
        if (v == twok) {
            found = true;
            continue;
        }
        out.elems_.push_back(v);
    }
    if (!found) throw std::domain_error("element to remove is not in the set");
    return out;
}

HalfIntegerSet HalfIntegerSet::with(HalfInt twok) const {
    if (contains(twok)) throw std::domain_error("element to add is already in the set");
    std::vector<int> v = elems_;
    v.push_back(twok);
    return HalfIntegerSet(std::move(v));
}

int signed_indicator(const HalfIntegerSet& s, HalfInt twok) {
    const int m = s.size();
    for (int j = 1; j <= m; ++j) {
        if (s.at(j - 1) == twok) return ((m - j) % 2 == 0) ? +1 : -1;
    }
    return 0;
}

std::vector<int> index_set(int width) {
    std::vector<int> ks;
    ks.reserve(static_cast<size_t>(width));
    for (int j = 0; j < width; ++j) ks.push_back(2 * j + 1);
    return ks;
}

StripGeometry make_geometry(int a, int b) {
    if (a >= 0) throw std::domain_error("a must be negative");
    if (b <= 0) throw std::domain_error("b must be positive");
    StripGeometry g;
    g.a = a;
    g.b = b;
    g.width = b - a;
    g.leg_left = -a;
    g.leg_right = b;
    g.k_full = index_set(g.width);
    g.k_left = index_set(g.leg_left);
    g.k_right = index_set(g.leg_right);
    return g;
}

} // namespace slitstrip
