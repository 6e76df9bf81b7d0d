#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "slitstrip/geometry.hpp"

// Spin rows, the irreducible transfer-matrix state space V, row-weight
// lifts of boundary functions, and an exhaustive-enumeration oracle for
// partition functions and correlations on truncated (slit-)strips.

namespace slitstrip {

// Coupling fixed at the critical point; the discrete complex analysis
// identities used throughout hold only there.
inline const double beta_critical = 0.5 * std::log(std::sqrt(2.0) + 1.0);

// A spin row over sites a..b packed into bits 0..width; bit = 1 means spin +1.
using SpinRow = std::uint32_t;

// Complex amplitudes over the rows of V (rows with spin +1 at site b),
// indexed by the low `width` bits; bit `width` is implicitly set.
using StateVector = Eigen::VectorXcd;

inline int spin_at(SpinRow row, int site_index) { return (row >> site_index) & 1u ? +1 : -1; }

// Full row for a V-index: sets the implicit +1 at site b.
inline SpinRow v_row(const StripGeometry& g, std::uint32_t v_index) {
    return v_index | (SpinRow{1} << g.width);
}

inline std::uint32_t v_dimension(const StripGeometry& g) { return std::uint32_t{1} << g.width; }

// Negates all spins strictly left of the dual site with index `dual_index`
// (sites a .. a+dual_index); the site-b spin is never touched.
inline SpinRow fold_involution(const StripGeometry& g, SpinRow row, int dual_index) {
    if (dual_index < 0 || dual_index >= g.width) throw std::domain_error("dual site out of range");
    return row ^ ((SpinRow{1} << (dual_index + 1)) - 1u);
}

// Row weight c_rho = exp(beta/2 * sum of horizontal bond products) over the
// width bonds between consecutive sites of the full row.
double row_weight(const StripGeometry& g, SpinRow row);

// Sum over V rows of c_rho f(rho) e_rho.
StateVector lift_boundary_function(const StripGeometry& g,
                                   const std::function<std::complex<double>(SpinRow)>& f);

// Product lift: f_left sees sites a..0, f_right sees sites 0..b (both
// receive the full row; they must only inspect their own sites).
StateVector lift_boundary_product(const StripGeometry& g,
                                  const std::function<std::complex<double>(SpinRow)>& f_left,
                                  const std::function<std::complex<double>(SpinRow)>& f_right);

// Lift of the constant function 1.
StateVector lift_ones(const StripGeometry& g);

// Strip sectors on V are labeled by the spin at site a (site b is +1).
// Slit sectors additionally fix the spin at site 0.
std::vector<std::uint32_t> sector_rows(const StripGeometry& g, int spin_a);
std::vector<std::uint32_t> sector_rows_slit(const StripGeometry& g, int spin_a, int spin_mid);

// A spin inserted at integer column x in [a..b] and integer height y.
struct SpinInsertion {
    int x = 0;
    int y = 0;
};

// Exhaustive enumeration over the truncated lattice with rows at heights
// -h_bottom..h_top. Boundary components (left column, right column, and for
// the slit variant the column {0} x [-h_bottom..0]) are each held constant;
// the constants are summed over. Every lattice edge contributes its weight
// exactly once.
struct OracleResult {
    double z_conditioned = 0.0; // all component constants summed
    double z_right_plus = 0.0;  // right component pinned to +1
};

struct OracleRequest {
    int h_top = 0;
    int h_bottom = 0;
    bool slit = false;
    std::vector<SpinInsertion> insertions; // spin product to average
};

// Refuses instances with more than 24 lattice sites.
OracleResult oracle_partition(const StripGeometry& g, const OracleRequest& req);

// Expectation of the requested spin product under the summed-constant
// conditioning; the empty product gives 1.
double oracle_correlation(const StripGeometry& g, const OracleRequest& req);

} // namespace slitstrip
