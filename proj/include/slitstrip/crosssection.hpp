#pragma once
#include <Eigen/Dense>
#include <array>
#include <vector>

#include "slitstrip/clifford.hpp"
#include "slitstrip/geometry.hpp"

// Functions on the cross-section dual sites, the vertical-translation
// eigenfunction basis, distinguished pole functions in the slit-strip, and
// the coefficient tables consumed by the fusion recursion.
namespace slitstrip {

using CsFunction = Eigen::VectorXcd;

// Real inner product under which multiplication by i is an isometry.
double cs_inner(const CsFunction& f, const CsFunction& g);
// Direction reversal f -> -i conj(f).
CsFunction direction_reversal(const CsFunction& f);

// Coefficients of the operator obtained by integrating the pair
// (i f, -i conj f) against the fermion field across the zero-height
// cross-section, with the conventional normalizing prefactor.
GeneratorSpan mode_span(const CsFunction& f);

// Real-linear action on functions induced by transfer-matrix conjugation of
// the corresponding operators; acts on [Re f; Im f] stacked vectors.
Eigen::MatrixXd function_rotation(int width);
CsFunction apply_function_rotation(const Eigen::MatrixXd& rot, const CsFunction& f);

Eigen::VectorXd realify(const CsFunction& f);
CsFunction unrealify(const Eigen::VectorXd& v);

// Propagation frequency of the j-th vertical-translation eigenfunction
// (j = 0-based, half-integer index j + 1/2) and the associated eigenvalue.
double solve_omega(int width, int j);
double lambda_of_omega(double omega);

struct SpectralBasis {
    int width = 0;
    Eigen::VectorXd omega;    // ascending
    Eigen::VectorXd lambda;   // > 1, ascending
    Eigen::MatrixXcd f_plus;  // column j: upward-growing eigenfunction
    Eigen::MatrixXcd f_minus; // column j: direction-reversed partner
    Eigen::MatrixXd rotation; // the function rotation used to build these
};

// Aborts (throws) on degenerate, complex, or non-reciprocal spectra.
SpectralBasis eigenfunction_basis(int width);

// Zero-extensions of leg functions into the full cross-section.
CsFunction extend_left(const StripGeometry& g, const CsFunction& leg);
CsFunction extend_right(const StripGeometry& g, const CsFunction& leg);

// Value of an s-holomorphic function on a vertical edge from its values on
// the adjacent horizontal edges (corner relations with the east/west face).
std::complex<double> vertical_value_east(std::complex<double> se, std::complex<double> ne);
std::complex<double> vertical_value_west(std::complex<double> sw, std::complex<double> nw);

enum class Extremity { top = 0, left = 1, right = 2 };

struct FusionInputs {
    StripGeometry geom;
    SpectralBasis basis_top, basis_left, basis_right;
    // pole[e][j]: the cross-section function with prescribed singular part
    // only in extremity e, unit index j + 1/2 there.
    std::array<std::vector<CsFunction>, 3> pole;
    // ip[e1][e2](j', j): pairing of the family-e2 test function of index
    // j' + 1/2 with the pole function of extremity e1 and index j + 1/2.
    // Top-family test functions enter direction reversed; leg families do not.
    std::array<std::array<Eigen::MatrixXd, 3>, 3> ip;

    const SpectralBasis& basis(Extremity e) const {
        return e == Extremity::top ? basis_top : (e == Extremity::left ? basis_left : basis_right);
    }
};

FusionInputs prepare_fusion_inputs(const StripGeometry& g);

// Residuals of the defining identities of the edge-extended fermion field.
struct ExtensionReport {
    double equality = 0.0;   // overlapping one-sided vertical-edge forms agree
    double csh = 0.0;        // corner relations around every vertex/face pair
    double crbv = 0.0;       // boundary phase relations
    double closedness = 0.0; // plaquette integrals of eigenmode one-forms
    double slide = 0.0;      // mode eigen-relations and closed loop integrals

    double max() const;
};

ExtensionReport verify_edge_extension(int width, int y_min, int y_max);

} // namespace slitstrip
