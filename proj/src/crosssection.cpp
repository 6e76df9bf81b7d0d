#include "slitstrip/crosssection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace slitstrip {

namespace {
using C = std::complex<double>;
constexpr double pi = std::numbers::pi;

Eigen::MatrixXd realify_operator(const Eigen::MatrixXcd& m) {
    const Eigen::Index n = m.rows();
    Eigen::MatrixXd r(2 * n, 2 * m.cols());
    r.topLeftCorner(n, m.cols()) = m.real();
    r.topRightCorner(n, m.cols()) = -m.imag();
    r.bottomLeftCorner(n, m.cols()) = m.imag();
    r.bottomRightCorner(n, m.cols()) = m.real();
    return r;
}

// Solve Re(c1 z) = r1, Re(c2 z) = r2 for z.
C solve_two_re(C c1, double r1, C c2, double r2) {
    const double det = c1.real() * (-c2.imag()) - (-c1.imag()) * c2.real();
    if (std::abs(det) < 1e-12) throw std::runtime_error("degenerate corner relation pair");
    const double x = (r1 * (-c2.imag()) - (-c1.imag()) * r2) / det;
    const double y = (c1.real() * r2 - r1 * c2.real()) / det;
    return {x, y};
}

const C phase_se = std::polar(1.0, 3.0 * pi / 8.0);
const C phase_ne = std::polar(1.0, pi / 8.0);
const C phase_sw = std::polar(1.0, -3.0 * pi / 8.0);
const C phase_nw = std::polar(1.0, -pi / 8.0);

} // namespace

double cs_inner(const CsFunction& f, const CsFunction& g) {
    if (f.size() != g.size()) throw std::domain_error("inner product size mismatch");
    return std::real(g.dot(f)); // Eigen conjugates the first argument of dot
}

CsFunction direction_reversal(const CsFunction& f) { return C(0.0, -1.0) * f.conjugate(); }

GeneratorSpan mode_span(const CsFunction& f) {
    const int w = static_cast<int>(f.size());
    const C pref = std::polar(0.5, pi / 4.0);
    GeneratorSpan s(2 * w);
    s.head(w) = pref * C(0.0, 1.0) * f;
    s.tail(w) = pref * C(0.0, -1.0) * f.conjugate();
    return s;
}

Eigen::VectorXd realify(const CsFunction& f) {
    Eigen::VectorXd v(2 * f.size());
    v.head(f.size()) = f.real();
    v.tail(f.size()) = f.imag();
    return v;
}

CsFunction unrealify(const Eigen::VectorXd& v) {
    const Eigen::Index n = v.size() / 2;
    CsFunction f(n);
    f.real() = v.head(n);
    f.imag() = v.tail(n);
    return f;
}

Eigen::MatrixXd function_rotation(int width) {
    const Eigen::MatrixXd m_real = realify_operator(conjugation_matrix(width));
    // Columns of the embedding of functions into operator coefficients.
    Eigen::MatrixXd a(4 * width, 2 * width);
    Eigen::MatrixXd b(4 * width, 2 * width);
    for (int j = 0; j < 2 * width; ++j) {
        CsFunction f = CsFunction::Zero(width);
        f(j % width) = j < width ? C(1.0, 0.0) : C(0.0, 1.0);
        const Eigen::VectorXd col = realify_operator(Eigen::MatrixXcd(mode_span(f))).col(0);
        a.col(j) = col;
        b.col(j) = m_real * col;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd p = qr.solve(b);
    if ((a * p - b).norm() > 1e-10 * b.norm())
        throw std::runtime_error("conjugation does not preserve the space of integrated modes");
    return p;
}

CsFunction apply_function_rotation(const Eigen::MatrixXd& rot, const CsFunction& f) {
    return unrealify(rot * realify(f));
}

double solve_omega(int width, int j) {
    if (j < 0 || j >= width) throw std::domain_error("frequency index out of range");
    const double q = 3.0 - 2.0 * std::sqrt(2.0);
    const auto h = [&](double w) {
        return std::cos((width + 0.5) * w) - q * std::cos((width - 0.5) * w);
    };
    double lo = j * pi / width;
    double hi = (j + 0.5) * pi / width;
    double flo = h(lo);
    if (h(hi) * flo >= 0.0) throw std::runtime_error("frequency bracket failed");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = h(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-16) break;
    }
    return 0.5 * (lo + hi);
}

double lambda_of_omega(double omega) {
    const double c = std::cos(omega);
    return 2.0 - c + std::sqrt((3.0 - c) * (1.0 - c));
}

std::complex<double> vertical_value_east(C se, C ne) {
    return solve_two_re(phase_se, std::real(phase_se * se), phase_ne, std::real(phase_ne * ne));
}

std::complex<double> vertical_value_west(C sw, C nw) {
    return solve_two_re(phase_sw, std::real(phase_sw * sw), phase_nw, std::real(phase_nw * nw));
}

namespace {

// Left-boundary edge value of the vertical-translation eigenfunction with
// cross-section restriction f and one-step growth factor lam.
C left_boundary_value(const CsFunction& f, double lam) {
    return vertical_value_east(f(0), lam * f(0));
}

} // namespace

SpectralBasis eigenfunction_basis(int width) {
    if (width < 1 || width > 512) throw std::domain_error("width out of supported range");
    SpectralBasis out;
    out.width = width;
    out.rotation = function_rotation(width);
    out.omega.resize(width);
    out.lambda.resize(width);
    out.f_plus.resize(width, width);
    out.f_minus.resize(width, width);
    for (int j = 0; j < width; ++j) {
        out.omega(j) = solve_omega(width, j);
        out.lambda(j) = lambda_of_omega(out.omega(j));
    }

    const Eigen::EigenSolver<Eigen::MatrixXd> es(out.rotation);
    if (es.info() != Eigen::Success) throw std::runtime_error("rotation eigensolve failed");
    const Eigen::VectorXcd evals = es.eigenvalues();
    std::vector<int> order(static_cast<size_t>(2 * width));
    for (int i = 0; i < 2 * width; ++i) {
        if (std::abs(evals(i).imag()) > 1e-10)
            throw std::runtime_error("rotation spectrum is not real");
        order[static_cast<size_t>(i)] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return evals(a).real() < evals(b).real(); });
    for (int i = 0; i + 1 < 2 * width; ++i) {
        const double lo = evals(order[static_cast<size_t>(i)]).real();
        const double hi = evals(order[static_cast<size_t>(i + 1)]).real();
        if (hi - lo <= 1e-10 * std::max(1.0, std::abs(hi)))
            throw std::runtime_error("rotation spectrum is degenerate");
    }
    for (int i = 0; i < 2 * width; ++i) {
        const double lo = evals(order[static_cast<size_t>(i)]).real();
        const double hi = evals(order[static_cast<size_t>(2 * width - 1 - i)]).real();
        if (std::abs(lo * hi - 1.0) > 1e-10)
            throw std::runtime_error("rotation spectrum is not reciprocal");
    }

    for (int j = 0; j < width; ++j) {
        // The eigenvalue 1/lambda_j sits at descending position j below one.
        const int idx = order[static_cast<size_t>(width - 1 - j)];
        if (std::abs(evals(idx).real() * out.lambda(j) - 1.0) > 1e-8)
            throw std::runtime_error("rotation spectrum disagrees with the frequency equation");
        Eigen::VectorXcd vec = es.eigenvectors().col(idx);
        Eigen::Index imax = 0;
        vec.cwiseAbs().maxCoeff(&imax);
        vec *= std::polar(1.0, -std::arg(vec(imax)));
        if (vec.imag().norm() > 1e-9 * vec.norm())
            throw std::runtime_error("eigenvector of a real eigenvalue is not real");
        CsFunction f = unrealify(vec.real());
        f /= f.norm();
        // Fix the residual sign so the left boundary value has phase -pi/4
        // with a positive multiplier.
        const C bv = left_boundary_value(f, out.lambda(j));
        const C t = std::polar(1.0, pi / 4.0) * bv;
        if (std::abs(t.imag()) > 1e-8 * std::abs(t) || std::abs(t) < 1e-10)
            throw std::runtime_error("boundary phase normalization failed");
        if (t.real() < 0.0) f = -f;
        out.f_plus.col(j) = f;
        out.f_minus.col(j) = direction_reversal(f);
        // Validate the direction bookkeeping of the reversed partner.
        const Eigen::VectorXd pr = out.rotation * realify(out.f_minus.col(j));
        if ((pr - out.lambda(j) * realify(out.f_minus.col(j))).norm() > 1e-8)
            throw std::runtime_error("direction-reversed function is not an eigenfunction");
    }
    return out;
}

CsFunction extend_left(const StripGeometry& g, const CsFunction& leg) {
    if (leg.size() != g.leg_left) throw std::domain_error("left leg function has wrong size");
    CsFunction f = CsFunction::Zero(g.width);
    f.head(g.leg_left) = leg;
    return f;
}

CsFunction extend_right(const StripGeometry& g, const CsFunction& leg) {
    if (leg.size() != g.leg_right) throw std::domain_error("right leg function has wrong size");
    CsFunction f = CsFunction::Zero(g.width);
    f.tail(g.leg_right) = leg;
    return f;
}

FusionInputs prepare_fusion_inputs(const StripGeometry& g) {
    FusionInputs in;
    in.geom = g;
    in.basis_top = eigenfunction_basis(g.width);
    in.basis_left = eigenfunction_basis(g.leg_left);
    in.basis_right = eigenfunction_basis(g.leg_right);

    const int w = g.width;
    // Constraint rows: pairings with the upward-growing full-strip family and
    // the downward-growing leg families (zero-extended).
    Eigen::MatrixXd sys(2 * w, 2 * w);
    std::vector<CsFunction> rows;
    rows.reserve(static_cast<size_t>(2 * w));
    for (int j = 0; j < w; ++j) rows.push_back(in.basis_top.f_plus.col(j));
    for (int j = 0; j < g.leg_left; ++j)
        rows.push_back(extend_left(g, in.basis_left.f_minus.col(j)));
    for (int j = 0; j < g.leg_right; ++j)
        rows.push_back(extend_right(g, in.basis_right.f_minus.col(j)));
    for (int r = 0; r < 2 * w; ++r) sys.row(r) = realify(rows[static_cast<size_t>(r)]);

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
    if (lu.rcond() < 1e-10)
        throw std::runtime_error("pole-function system is too ill-conditioned");
    const Eigen::MatrixXd sols = lu.solve(Eigen::MatrixXd::Identity(2 * w, 2 * w));

    const std::array<int, 3> counts = {w, g.leg_left, g.leg_right};
    int col = 0;
    for (int e = 0; e < 3; ++e)
        for (int j = 0; j < counts[static_cast<size_t>(e)]; ++j)
            in.pole[static_cast<size_t>(e)].push_back(unrealify(sols.col(col++)));

    for (int pe = 0; pe < 3; ++pe) {
        const auto& poles = in.pole[static_cast<size_t>(pe)];
        for (int te = 0; te < 3; ++te) {
            Eigen::MatrixXd tab(counts[static_cast<size_t>(te)], counts[static_cast<size_t>(pe)]);
            for (int jp = 0; jp < counts[static_cast<size_t>(te)]; ++jp) {
                CsFunction test;
                if (te == 0)
                    test = in.basis_top.f_minus.col(jp);
                else if (te == 1)
                    test = extend_left(g, in.basis_left.f_plus.col(jp));
                else
                    test = extend_right(g, in.basis_right.f_plus.col(jp));
                for (int jk = 0; jk < counts[static_cast<size_t>(pe)]; ++jk)
                    tab(jp, jk) = cs_inner(test, poles[static_cast<size_t>(jk)]);
            }
            in.ip[static_cast<size_t>(pe)][static_cast<size_t>(te)] = tab;
        }
    }
    return in;
}

double ExtensionReport::max() const {
    return std::max({equality, csh, crbv, closedness, slide});
}

namespace {

struct EdgeRef {
    bool horizontal;
    int index; // dual site or site index
    int y;     // integer height (horizontal) or height below midpoint (vertical)
};

EdgeRef edge_between(int x0, int y0, int x1, int y1) {
    if (y0 == y1) return {true, std::min(x0, x1), y0};
    return {false, x0, std::min(y0, y1)};
}

} // namespace

ExtensionReport verify_edge_extension(int width, int y_min, int y_max) {
    ExtensionReport rep;
    const EdgeFermions field(width);
    const SpectralBasis basis = eigenfunction_basis(width);
    const int w = width;

    const auto psi_at = [&](const EdgeRef& e) {
        return e.horizontal ? field.horizontal(Gen::psi, e.index, e.y)
                            : field.vertical(Gen::psi, e.index, e.y);
    };
    const auto psi_star_at = [&](const EdgeRef& e) {
        return e.horizontal ? field.horizontal(Gen::psi_star, e.index, e.y)
                            : field.vertical(Gen::psi_star, e.index, e.y);
    };

    // Overlapping one-sided vertical-edge expressions agree.
    for (int y = y_min; y < y_max; ++y) {
        for (Gen kind : {Gen::psi, Gen::psi_star}) {
            for (int s = 1; s < w; ++s)
                rep.equality = std::max(rep.equality,
                                        (field.vertical_east(kind, s, y) -
                                         field.vertical_west(kind, s, y)).norm());
            rep.equality = std::max(rep.equality, (field.vertical_east(kind, 0, y) -
                                                   field.vertical_boundary(kind, 0, y)).norm());
            rep.equality = std::max(rep.equality, (field.vertical_west(kind, w, y) -
                                                   field.vertical_boundary(kind, w, y)).norm());
        }
    }

    // Corner relations: for every face and corner, the two edges meeting
    // there give the same combined value.
    for (int y = y_min; y < y_max; ++y) {
        for (int d = 0; d < w; ++d) {
            const std::array<std::tuple<int, int, int>, 4> corners = {{
                {d, y, -1},     // below-left: vertical edge at site d
                {d + 1, y, -1}, // below-right
                {d, y + 1, +1}, // above-left
                {d + 1, y + 1, +1},
            }};
            for (const auto& [site, hy, up] : corners) {
                const C v_minus_p =
                    C(site - (d + 0.5), (up > 0 ? (y + 1) : y) - (y + 0.5));
                const C nu = C(0.0, 1.0) * std::abs(v_minus_p) / v_minus_p;
                const GeneratorSpan x1 =
                    field.horizontal(Gen::psi, d, hy) + nu * field.horizontal(Gen::psi_star, d, hy);
                const GeneratorSpan x2 =
                    field.vertical(Gen::psi, site, y) + nu * field.vertical(Gen::psi_star, site, y);
                // Equality of the full combination (the complexified form).
                rep.csh = std::max(rep.csh, (x1 - x2).norm());
            }
        }
    }

    // Boundary relations.
    for (int y = y_min; y < y_max; ++y) {
        rep.crbv = std::max(rep.crbv, (field.vertical(Gen::psi, 0, y) +
                                       C(0.0, 1.0) * field.vertical(Gen::psi_star, 0, y)).norm());
        rep.crbv = std::max(rep.crbv, (field.vertical(Gen::psi, w, y) -
                                       C(0.0, 1.0) * field.vertical(Gen::psi_star, w, y)).norm());
    }

    // Eigenmode one-forms: closed around plaquettes, and invariant under
    // sliding the integration contour (closed rectangle integrals vanish).
    const auto contour_integral = [&](const std::vector<std::pair<int, int>>& verts,
                                      const auto& f_value) {
        GeneratorSpan total = GeneratorSpan::Zero(2 * w);
        for (size_t i = 0; i + 1 < verts.size(); ++i) {
            const auto [x0, y0] = verts[i];
            const auto [x1, y1] = verts[i + 1];
            const EdgeRef e = edge_between(x0, y0, x1, y1);
            const C dz = C(x1 - x0, y1 - y0);
            const C fz = f_value(e);
            total += C(0.0, 1.0) * fz * dz * psi_at(e) -
                     C(0.0, 1.0) * std::conj(fz) * std::conj(dz) * psi_star_at(e);
        }
        return total;
    };

    for (int j = 0; j < w; ++j) {
        for (int sign : {+1, -1}) {
            const CsFunction f =
                sign > 0 ? CsFunction(basis.f_plus.col(j)) : CsFunction(basis.f_minus.col(j));
            const double lam = sign > 0 ? basis.lambda(j) : 1.0 / basis.lambda(j);
            const auto f_value = [&](const EdgeRef& e) -> C {
                if (e.horizontal) return std::pow(lam, e.y) * f(e.index);
                const C below = std::pow(lam, e.y) *
                                (e.index < w ? f(e.index) : f(e.index - 1));
                const C above = lam * below;
                return e.index < w ? vertical_value_east(below, above)
                                   : vertical_value_west(below, above);
            };

            // Plaquettes.
            for (int y = y_min; y < y_max; ++y)
                for (int d = 0; d < w; ++d) {
                    const std::vector<std::pair<int, int>> plaquette = {
                        {d, y}, {d + 1, y}, {d + 1, y + 1}, {d, y + 1}, {d, y}};
                    rep.closedness =
                        std::max(rep.closedness, contour_integral(plaquette, f_value).norm());
                }

            // Mode eigen-relation: conjugation scales the integrated mode.
            const GeneratorSpan mode = mode_span(f);
            rep.slide = std::max(
                rep.slide, (field.at_height(mode, 1) - (1.0 / lam) * mode).norm());

            // Closed rectangle across the full width.
            std::vector<std::pair<int, int>> rect;
            for (int x = 0; x <= w; ++x) rect.emplace_back(x, y_min);
            for (int y = y_min + 1; y <= y_max; ++y) rect.emplace_back(w, y);
            for (int x = w - 1; x >= 0; --x) rect.emplace_back(x, y_max);
            for (int y = y_max - 1; y >= y_min; --y) rect.emplace_back(0, y);
            rep.slide = std::max(rep.slide, contour_integral(rect, f_value).norm());
        }
    }

    // Conjugation acts on integrated modes exactly as the function rotation.
    std::mt19937 rng(2024u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        CsFunction f(w);
        for (int i = 0; i < w; ++i) f(i) = C(gauss(rng), gauss(rng));
        const GeneratorSpan lhs = field.at_height(mode_span(f), 1);
        const GeneratorSpan rhs = mode_span(apply_function_rotation(basis.rotation, f));
        rep.slide = std::max(rep.slide, (lhs - rhs).norm() / std::max(1.0, rhs.norm()));
    }
    return rep;
}

} // namespace slitstrip
