#pragma once
#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "slitstrip/fusion.hpp"

// Continuum counterpart of the lattice junction: analytic mode functions on
// the unit-width slit strip, the uniformizing map onto the upper half plane,
// Pfaffian multipoint kernels integrated over cross sections, and explicit
// pole functions whose inner-product tables drive the same peeling recursion
// as the lattice engine.
namespace slitstrip {

using Complex = std::complex<double>;

// Conformal data at one point of the slit strip: the uniformizing map
// phi(z) = sqrt(1 - exp(-2 pi i z)) / 2 (upper half plane image), its
// derivative, and the branch of sqrt(phi') that is real and positive at the
// interior basepoint z = i. Because phi avoids the lower half plane, both
// sqrt(phi) and sqrt(phi') are single-valued on the whole slit strip.
struct ConformalPoint {
    Complex z;
    Complex phi;
    Complex dphi;
    Complex sqrt_dphi;
};

// side is consulted only on the cut {x = 0, y < 0}: -1 evaluates the left
// prime end, +1 the right one. Points on the cut with side 0 throw
// std::domain_error, as does the tip z = 0 itself.
ConformalPoint conformal_eval(Complex z, int side = 0);

// Analytic modes, indexed by odd twok = 2k. The top family lives on the
// full-width strip, the leg families on the half-width legs; all three
// restrict to orthonormal systems on their cross sections under the real
// inner product int Re(f conj(g)) dx.
Complex mode_phase_constant(Extremity family, int twok);
Complex mode_value(Extremity family, int twok, Complex z);

// The four two-point kernels: hh is holomorphic in both points, ha/ah/aa
// conjugate the second/first/both mode-and-sqrt(phi') factors together with
// the corresponding phi images in the denominator.
enum class KernelVariant { hh, ha, ah, aa };
Complex two_point_kernel(KernelVariant variant, Extremity fam1, int twok1,
                         const ConformalPoint& p1, Extremity fam2, int twok2,
                         const ConformalPoint& p2);

// Sum of the four kernels; real because the variants are pairwise
// conjugate. These are the entries of the skew multipoint matrix.
double kernel_matrix_entry(Extremity fam1, int twok1, const ConformalPoint& p1,
                           Extremity fam2, int twok2, const ConformalPoint& p2);

// Pfaffian of a real skew-symmetric matrix by first-row expansion
// (odd order gives zero, empty order gives one), plus an independent
// pair-partition evaluation used as a cross-check.
double pfaffian(const Eigen::MatrixXd& a);
double pfaffian_pair_partitions(const Eigen::MatrixXd& a);

struct QuadratureConfig {
    // Pairwise double integrals double their Gauss-Legendre order from
    // initial_nodes until successive values differ by less than tol;
    // exceeding max_nodes throws std::runtime_error.
    double tol = 1e-8;
    int initial_nodes = 16;
    int max_nodes = 128;
    // One-dimensional cross-section integrals (mode pairings and pole
    // tables) use their own, tighter ladder.
    double tol_1d = 1e-11;
    int max_nodes_1d = 2048;
};

struct QuadratureStats {
    int max_nodes = 0;       // largest Gauss-Legendre order any pair needed
    double last_delta = 0.0; // worst final refinement step across pairs
};

// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};
const GaussLegendre& gauss_legendre(int n);

// Cross-section quadrature nodes on [lo, hi] at a given order. Intervals
// touching x = 0 are substituted x = +-t^4 there, which absorbs the
// |x|^{-1/4} growth of sqrt(phi') at the slit tip into a smooth integrand.
void cross_section_nodes(double lo, double hi, int n, std::vector<double>& x,
                         std::vector<double>& w);

// int_lo^hi Re(f(x) conj(g(x))) dx on the height-0 cross section, refined
// until two successive orders agree within cfg.tol_1d.
double cross_section_inner(const std::function<Complex(double)>& f,
                           const std::function<Complex(double)>& g, double lo, double hi,
                           const QuadratureConfig& cfg);

// One insertion slot of the multipoint kernel: a mode family, a signed
// index, and the height of the cross section the slot is integrated over.
// Top slots integrate x over [-1/2, 1/2] at height > 0, leg slots over
// their half cross sections at height < 0.
struct KernelSlot {
    Extremity family;
    int twok;
    double height;
};

// Slots for index tuples at the standard heights: top positions run from
// the highest point downward (y = 0.15 (m - i + 1) for position i counted
// from 1), leg positions from the deepest point upward
// (y = -0.15 (m' - i + 1)). The compressed spacing keeps the exponentially
// growing modes and the pinched map images in the legs well conditioned.
std::vector<KernelSlot> canonical_slots(const std::vector<int>& top,
                                        const std::vector<int>& left,
                                        const std::vector<int>& right);

// Integral of the multipoint kernel over the slot cross sections with the
// prefactor (-i / (2 sqrt(pi)))^n. The Pfaffian expands over pair
// partitions in which every slot appears exactly once, so the integral
// equals the Pfaffian of the matrix of pairwise double integrals; that
// identity is exact and is how the value is computed. The result is
// independent of the slot heights as long as their ordering is admissible.
double integrated_kernel(const std::vector<KernelSlot>& slots, const QuadratureConfig& cfg,
                         QuadratureStats* stats = nullptr);

// An explicit pole function of one extremity: a finite expansion in the
// half-plane coordinate w = phi(z), times sqrt(phi'). Top functions use
// polynomials in w, leg functions use inverse powers of (w +- 1/2), so each
// carries singular growth only toward its own extremity. The coefficients
// are pinned by Kronecker pairings against the growing modes of the same
// extremity; pairings with every other singular direction vanish. The
// function as a whole does not depend on the branch choice in sqrt(phi'):
// flipping it flips the basis and the coefficients together.
struct ContinuumPole {
    Extremity family = Extremity::top;
    int twok = 1;
    Eigen::VectorXd coeffs;
    double solve_residual = 0.0;   // worst deviation of the pinned pairings
    double stray_projection = 0.0; // worst pairing with a foreign singular mode

    Complex eval(const ConformalPoint& p) const;
    Complex eval_at(double x) const; // height-0 cross section
};

// Continuum fusion coefficients by two independent routes: integrated
// Pfaffian kernels evaluated by quadrature, and the same peeling recursion
// the lattice engine uses, driven by pole-function inner-product tables.
class ContinuumFusion {
public:
    explicit ContinuumFusion(int max_twok, QuadratureConfig cfg = {});

    ContinuumFusion(const ContinuumFusion&) = delete;
    ContinuumFusion& operator=(const ContinuumFusion&) = delete;

    int max_twok() const { return max_twok_; }
    const QuadratureConfig& config() const { return cfg_; }

    // Kernel route: the key maps to slots via canonical_slots with the leg
    // indices negated (leg pole directions grow downward).
    double pfaffian_route(const FusionKey& key, QuadratureStats* stats = nullptr) const;

    // Recursion route, normalized to one at the empty key. The alternate
    // order peels the opposite family first (independent memo).
    double recursive(const FusionKey& key) const;
    double recursive_alternate(const FusionKey& key) const;

    const ContinuumPole& pole(Extremity family, int twok) const;
    const PeelRecursion::IpTables& ip() const { return ip_; }

private:
    void require_twok(const FusionKey& key) const;

    int max_twok_;
    QuadratureConfig cfg_;
    std::array<std::vector<ContinuumPole>, 3> poles_;
    PeelRecursion::IpTables ip_;
    std::unique_ptr<PeelRecursion> rec_;
};

} // namespace slitstrip
