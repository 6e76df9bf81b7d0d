#pragma once
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "slitstrip/crosssection.hpp"
#include "slitstrip/geometry.hpp"
#include "slitstrip/statespace.hpp"
#include "slitstrip/transfer.hpp"

// Fusion coefficients of the strip / two-leg junction: overlap amplitudes
// between the outgoing full-width eigenstates and the incoming leg
// eigenstates of the two transfer matrices. Two independent routes are
// provided: explicit state vectors (exponential in the width) and a peeling
// recursion over cross-section inner-product tables (polynomial, usable at
// widths in the hundreds).
namespace slitstrip {

// One coefficient is indexed by three ascending sets of positive
// half-integers (2k encodings): top-extremity modes over the full width and
// modes of the two legs.
struct FusionKey {
    HalfIntegerSet top;
    HalfIntegerSet left;
    HalfIntegerSet right;

    int total_size() const { return top.size() + left.size() + right.size(); }
    // Canonical "[1,3];[1];[]" form, used for reporting and JSON keys.
    std::string to_string() const;
};

// Parse a comma-separated list of odd 2k encodings ("" -> empty set).
HalfIntegerSet parse_half_set(const std::string& csv);

// Throws std::domain_error when an index does not fit its family width.
void validate_key(const StripGeometry& g, const FusionKey& key);

// Peeling recursion over a 3x3 family of inner-product tables between test
// functions and pole functions. ip[pe][te](j', j) pairs the family-te test
// function of index j'+1/2 with the extremity-pe pole function of index
// j+1/2. The recursion itself is geometry-agnostic: the lattice engine and
// the continuum engine feed it their own tables.
class PeelRecursion {
public:
    using IpTables = std::array<std::array<Eigen::MatrixXd, 3>, 3>;

    // Keeps a reference; the tables must outlive the recursion object.
    explicit PeelRecursion(const IpTables& ip) : ip_(ip) {}

    PeelRecursion(const PeelRecursion&) = delete;
    PeelRecursion& operator=(const PeelRecursion&) = delete;

    // Ratio-normalized coefficient: repeatedly remove the largest index of
    // the preferred family (top, then left, then right when top_first; the
    // reverse order otherwise). The all-empty key is normalized to one.
    // The two orders use independent memo tables, so their agreement is a
    // genuine cross-check of the three peeling identities.
    double value(const FusionKey& key, bool top_first) const;

private:
    using MemoKey = std::tuple<std::vector<int>, std::vector<int>, std::vector<int>>;
    using Memo = std::map<MemoKey, double>;

    double eval(const HalfIntegerSet& top, const HalfIntegerSet& left,
                const HalfIntegerSet& right, bool top_first, Memo& memo) const;
    double peel(Extremity family, HalfInt twok, const HalfIntegerSet& top,
                const HalfIntegerSet& left, const HalfIntegerSet& right, bool top_first,
                Memo& memo) const;

    const IpTables& ip_;
    mutable std::mutex memo_mutex_;
    mutable Memo memo_primary_;
    mutable Memo memo_alternate_;
};

struct RenormalizationConstants {
    double z_mono = 0.0; // locally monochromatic boundaries
    double z_mpp = 0.0;  // minus/plus/plus fixed boundaries
};

// Worst-case residuals of the explicit eigenstate construction across every
// index set of both transfer matrices.
struct DiagonalizationReport {
    double vacuum_eigenvalue = 0.0;
    double vacuum_closed_form = 0.0;
    double max_residual = 0.0;     // eigen-residual relative to the eigenvalue
    double max_gram_defect = 0.0;  // orthonormality of the full state family
    double max_annihilation = 0.0; // positive modes applied to the vacuum
    double slit_vacuum_eigenvalue = 0.0;
    double slit_max_residual = 0.0;
    double slit_max_gram_defect = 0.0;
    double slit_max_annihilation = 0.0;
};

class FusionEngine {
public:
    explicit FusionEngine(const StripGeometry& g);

    FusionEngine(const FusionEngine&) = delete;
    FusionEngine& operator=(const FusionEngine&) = delete;

    const StripGeometry& geometry() const { return g_; }
    const FusionInputs& inputs() const { return in_; }

    // Ratio-normalized coefficient from the peeling recursion: repeatedly
    // remove the largest top index, then the largest left index, then the
    // largest right index; the all-empty key is normalized to one. No
    // state-space objects are involved.
    double recursive(const FusionKey& key) const;

    // Identical values peeled in the opposite family order (right, left,
    // top) with an independent memo; agreement with recursive() is a
    // cross-check of the three peeling identities.
    double recursive_alternate(const FusionKey& key) const;

    // Explicit route: Hermitian inner product of the indexed eigenstates.
    // Requires width <= 14; the imaginary part must vanish.
    double direct(const FusionKey& key) const;
    double direct_vacuum() const;
    double direct_ratio(const FusionKey& key) const;

    // The eigenstates themselves (explicit route, width <= 14). Modes are
    // applied in ascending index order, left leg before right leg.
    StateVector strip_state(const HalfIntegerSet& top) const;
    StateVector slit_state(const HalfIntegerSet& left, const HalfIntegerSet& right) const;
    const PerronData& strip_vacuum() const;
    const PerronData& slit_vacuum() const;

private:
    void require_direct_width() const;

    StripGeometry g_;
    FusionInputs in_;
    PeelRecursion rec_;

    mutable std::mutex vacuum_mutex_;
    mutable std::optional<PerronData> strip_vacuum_;
    mutable std::optional<PerronData> slit_vacuum_;
    mutable std::optional<TransferOperator> t_strip_;
    mutable std::optional<TransferOperator> t_slit_;
};

// z_mono = 2 (v0 . ones-lift)(ones-lift . w0); z_mpp replaces the vacua by
// the single lowest-mode states at the top and in the left leg. Both are
// strictly positive.
RenormalizationConstants renormalization_constants(const StripGeometry& g);

// Closed form for the largest strip transfer-matrix eigenvalue at a width.
double vacuum_eigenvalue_closed_form(int width);

// Builds every eigenstate of both transfer matrices and measures the worst
// eigen-residual, Gram defect, and vacuum annihilation defect (width <= 14).
DiagonalizationReport verify_diagonalization(const StripGeometry& g);

} // namespace slitstrip
