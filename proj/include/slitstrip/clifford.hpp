#pragma once
#include <Eigen/Dense>

#include "slitstrip/statespace.hpp"
#include "slitstrip/transfer.hpp"

// Fermion generators on the spin state space, the coefficient-level action of
// transfer-matrix conjugation on them, and the extension of the generator
// valued field from horizontal to vertical lattice edges.
namespace slitstrip {

enum class Gen { psi, psi_star };

// Apply one generator, indexed by its dual site, to a state in V.
StateVector apply_generator(const StripGeometry& g, Gen kind, int dual_index, const StateVector& v);

// Coefficient vector over the generator basis: entries 0..w-1 multiply the
// psi family, entries w..2w-1 the psi* family, both ordered by dual site.
using GeneratorSpan = Eigen::VectorXcd;

GeneratorSpan unit_span(int width, Gen kind, int dual_index);
StateVector apply_span(const StripGeometry& g, const GeneratorSpan& coeffs, const StateVector& v);

// Dense matrix of a generator on V (small widths only).
Eigen::MatrixXcd dense_generator(const StripGeometry& g, Gen kind, int dual_index);

// Coefficient matrix of X -> T^{-1} X T on the generator basis; column j is
// the expansion of the conjugated j-th basis generator.
Eigen::MatrixXcd conjugation_matrix(int width);

// Same map computed directly on the state space by materializing T, the
// generators, and the conjugated products (small widths only).
Eigen::MatrixXcd conjugation_matrix_dense(const StripGeometry& g, Variant variant);

// Generator-valued field on lattice edges, in height-zero coefficients.
// Horizontal edge midpoints are x' + i y (dual site, integer height);
// vertical edge midpoints are x + i (y + 1/2) with x a site index 0..w.
class EdgeFermions {
public:
    explicit EdgeFermions(int width);
    int width() const { return width_; }

    GeneratorSpan at_height(const GeneratorSpan& coeffs, int y) const;
    GeneratorSpan horizontal(Gen kind, int dual_index, int y) const;

    // One-sided expressions for vertical edges; the equality of overlapping
    // forms is a nontrivial identity verified by tests.
    GeneratorSpan vertical_east(Gen kind, int site_index, int y_below) const;
    GeneratorSpan vertical_west(Gen kind, int site_index, int y_below) const;
    GeneratorSpan vertical_boundary(Gen kind, int site_index, int y_below) const;
    // The common value used by consumers.
    GeneratorSpan vertical(Gen kind, int site_index, int y_below) const;

    const Eigen::MatrixXcd& conjugation() const { return m_; }

private:
    int width_;
    Eigen::MatrixXcd m_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> m_lu_;
};

} // namespace slitstrip
