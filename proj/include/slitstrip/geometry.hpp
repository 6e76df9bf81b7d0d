#pragma once

#include <stdexcept>
#include <string>
#include <vector>

// Strip and slit-strip lattice geometry: integer boundary positions,
// half-integer cross-section index sets, signed removal indicators.
//
// Half-integers are represented exactly as odd integers 2k throughout;
// no floating-point encoding of indices is ever used.

namespace slitstrip {

// Encoded half-integer: value 2k, always odd. Positive for mode indices
// k in {1/2, 3/2, ...}; negated encodings denote reflected modes.
using HalfInt = int;

inline double half_value(HalfInt twok) { return 0.5 * static_cast<double>(twok); }

// Ordered set of distinct positive half-integers (2k encoding, ascending).
class HalfIntegerSet {
public:
    HalfIntegerSet() = default;
    // Accepts encodings in any order; sorts and validates.
    explicit HalfIntegerSet(std::vector<int> twok_values);

    static HalfIntegerSet from_halves(std::initializer_list<int> twok) {
        return HalfIntegerSet(std::vector<int>(twok));
    }

    bool empty() const { return elems_.empty(); }
    int size() const { return static_cast<int>(elems_.size()); }
    HalfInt max() const { return elems_.back(); }
    HalfInt at(int j) const { return elems_[static_cast<size_t>(j)]; }
    const std::vector<int>& values() const { return elems_; }
    bool contains(HalfInt twok) const;

    // Set with one element removed; element must be present.
    HalfIntegerSet without(HalfInt twok) const;
    // Set with one element added; element must be absent.
    HalfIntegerSet with(HalfInt twok) const;

    bool operator==(const HalfIntegerSet& o) const { return elems_ == o.elems_; }
    bool operator<(const HalfIntegerSet& o) const { return elems_ < o.elems_; }

private:
    std::vector<int> elems_; // ascending, distinct, odd, positive
};

// (-1)^(m-j) when k is the j-th smallest of the m elements, else 0.
int signed_indicator(const HalfIntegerSet& s, HalfInt twok);

// Vertical strip over columns [a..b], a < 0 < b. The slit variant shares
// the same cross-section; the slit splits it into legs of widths -a and b.
struct StripGeometry {
    int a = 0;
    int b = 0;
    int width = 0;     // b - a
    int leg_left = 0;  // -a
    int leg_right = 0; // b

    // Positive index sets K^(w) = {1/2, ..., w - 1/2} as 2k encodings.
    std::vector<int> k_full;
    std::vector<int> k_left;
    std::vector<int> k_right;

    // Dual cross-section sites x' = a + i + 1/2 for i in [0, width).
    int dual_site_count() const { return width; }
    double dual_site(int i) const { return a + i + 0.5; }
    // Index of the dual site immediately right of the slit column (x' = 1/2).
    int slit_dual_index() const { return leg_left; }
};

// Validates a < 0 < b and materializes the index sets.
// Throws std::domain_error naming the violated bound.
StripGeometry make_geometry(int a, int b);

// K^(w) as 2k encodings: {1, 3, ..., 2w-1}.
std::vector<int> index_set(int width);

} // namespace slitstrip
