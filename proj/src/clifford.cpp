#include "slitstrip/clifford.hpp"

#include <cmath>

namespace slitstrip {

namespace {

using C = std::complex<double>;
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
// Primitive eighth root of unity and its powers used by the coefficient
// tables; lam3 = lam^3, lam3i = lam^{-3}.
const C lam{inv_sqrt2, inv_sqrt2};
const C lam_inv = std::conj(lam);
const C lam3 = lam * lam * lam;
const C lam3i = std::conj(lam3);

C generator_coefficient(Gen kind, int s_left, int s_right) {
    if (kind == Gen::psi) return C(-s_left, s_right) * inv_sqrt2;
    return C(s_right, -s_left) * inv_sqrt2;
}

} // namespace

StateVector apply_generator(const StripGeometry& g, Gen kind, int dual_index,
                            const StateVector& v) {
    if (dual_index < 0 || dual_index >= g.width) throw std::domain_error("dual site out of range");
    const std::uint32_t dim = v_dimension(g);
    if (v.size() != static_cast<Eigen::Index>(dim))
        throw std::domain_error("state vector has wrong dimension");
    const std::uint32_t v_mask = dim - 1u;
    StateVector out = StateVector::Zero(dim);
    for (std::uint32_t idx = 0; idx < dim; ++idx) {
        const SpinRow row = v_row(g, idx);
        const C coeff =
            generator_coefficient(kind, spin_at(row, dual_index), spin_at(row, dual_index + 1));
        const std::uint32_t target = fold_involution(g, row, dual_index) & v_mask;
        out(target) += coeff * v(idx);
    }
    return out;
}

GeneratorSpan unit_span(int width, Gen kind, int dual_index) {
    GeneratorSpan s = GeneratorSpan::Zero(2 * width);
    s((kind == Gen::psi ? 0 : width) + dual_index) = 1.0;
    return s;
}

StateVector apply_span(const StripGeometry& g, const GeneratorSpan& coeffs, const StateVector& v) {
    if (coeffs.size() != 2 * g.width) throw std::domain_error("coefficient vector has wrong size");
    StateVector out = StateVector::Zero(v.size());
    for (int d = 0; d < g.width; ++d) {
        if (coeffs(d) != 0.0) out += coeffs(d) * apply_generator(g, Gen::psi, d, v);
        if (coeffs(g.width + d) != 0.0)
            out += coeffs(g.width + d) * apply_generator(g, Gen::psi_star, d, v);
    }
    return out;
}

Eigen::MatrixXcd dense_generator(const StripGeometry& g, Gen kind, int dual_index) {
    if (g.width > 10) throw std::domain_error("dense generator materialization capped at width 10");
    const std::uint32_t dim = v_dimension(g);
    Eigen::MatrixXcd m(dim, dim);
    for (std::uint32_t c = 0; c < dim; ++c) {
        StateVector e = StateVector::Zero(dim);
        e(c) = 1.0;
        m.col(c) = apply_generator(g, kind, dual_index, e);
    }
    return m;
}

Eigen::MatrixXcd conjugation_matrix(int width) {
    if (width < 1) throw std::domain_error("width must be positive");
    const int w = width;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * w, 2 * w);
    if (w == 1) {
        m(0, 0) = std::sqrt(2.0);
        m(1, 0) = -1.0;
        m(0, 1) = -1.0;
        m(1, 1) = std::sqrt(2.0);
        return m;
    }
    const double s = inv_sqrt2;
    const auto P = [&](int d) { return d; };       // psi row
    const auto S = [&](int d) { return w + d; };   // psi* row
    for (int d = 0; d < w; ++d) {
        // Column for the conjugated psi at dual site d.
        if (d == 0) {
            m(P(0), P(0)) = 1.0 + s;
            m(S(0), P(0)) = lam3 + lam3i * s;
            m(P(1), P(0)) = lam3 * s;
            m(S(1), P(0)) = s;
        } else if (d == w - 1) {
            m(P(d), P(d)) = 1.0 + s;
            m(S(d), P(d)) = lam3i + lam3 * s;
            m(P(d - 1), P(d)) = lam3i * s;
            m(S(d - 1), P(d)) = s;
        } else {
            m(P(d), P(d)) = 2.0;
            m(S(d), P(d)) = -std::sqrt(2.0);
            m(P(d + 1), P(d)) = lam3 * s;
            m(S(d + 1), P(d)) = s;
            m(P(d - 1), P(d)) = lam3i * s;
            m(S(d - 1), P(d)) = s;
        }
        // Column for the conjugated psi* at dual site d.
        if (d == 0) {
            m(S(0), S(0)) = 1.0 + s;
            m(P(0), S(0)) = lam3i + lam3 * s;
            m(S(1), S(0)) = lam3i * s;
            m(P(1), S(0)) = s;
        } else if (d == w - 1) {
            m(S(d), S(d)) = 1.0 + s;
            m(P(d), S(d)) = lam3 + lam3i * s;
            m(S(d - 1), S(d)) = lam3 * s;
            m(P(d - 1), S(d)) = s;
        } else {
            m(S(d), S(d)) = 2.0;
            m(P(d), S(d)) = -std::sqrt(2.0);
            m(S(d + 1), S(d)) = lam3i * s;
            m(P(d + 1), S(d)) = s;
            m(S(d - 1), S(d)) = lam3 * s;
            m(P(d - 1), S(d)) = s;
        }
    }
    return m;
}

Eigen::MatrixXcd conjugation_matrix_dense(const StripGeometry& g, Variant variant) {
    const TransferOperator op(g, variant);
    const Eigen::MatrixXcd t = op.dense().cast<C>();
    const Eigen::PartialPivLU<Eigen::MatrixXcd> t_lu(t);
    const int w = g.width;
    const Eigen::Index dim = t.rows();

    // Stack vectorized dense generators as the columns of a basis matrix,
    // then expand each conjugated generator by least squares.
    Eigen::MatrixXcd basis(dim * dim, 2 * w);
    std::vector<Eigen::MatrixXcd> gens;
    for (int j = 0; j < 2 * w; ++j) {
        const Gen kind = j < w ? Gen::psi : Gen::psi_star;
        gens.push_back(dense_generator(g, kind, j % w));
        basis.col(j) = Eigen::Map<const Eigen::VectorXcd>(gens.back().data(), dim * dim);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(basis);

    Eigen::MatrixXcd m(2 * w, 2 * w);
    for (int j = 0; j < 2 * w; ++j) {
        const Eigen::MatrixXcd conj_g = t_lu.solve(gens[static_cast<size_t>(j)] * t);
        const Eigen::VectorXcd vec =
            Eigen::Map<const Eigen::VectorXcd>(conj_g.data(), dim * dim);
        m.col(j) = qr.solve(vec);
        if ((basis * m.col(j) - vec).norm() > 1e-10 * vec.norm())
            throw std::runtime_error("conjugated generator leaves the generator span");
    }
    return m;
}

EdgeFermions::EdgeFermions(int width)
    : width_(width), m_(conjugation_matrix(width)), m_lu_(m_) {}

GeneratorSpan EdgeFermions::at_height(const GeneratorSpan& coeffs, int y) const {
    GeneratorSpan c = coeffs;
    for (int i = 0; i < y; ++i) c = m_ * c;
    for (int i = 0; i > y; --i) c = m_lu_.solve(c);
    return c;
}

GeneratorSpan EdgeFermions::horizontal(Gen kind, int dual_index, int y) const {
    return at_height(unit_span(width_, kind, dual_index), y);
}

GeneratorSpan EdgeFermions::vertical_east(Gen kind, int site_index, int y_below) const {
    if (site_index < 0 || site_index >= width_)
        throw std::domain_error("no horizontal edges east of this vertical edge");
    const GeneratorSpan ne_p = horizontal(Gen::psi, site_index, y_below + 1);
    const GeneratorSpan ne_s = horizontal(Gen::psi_star, site_index, y_below + 1);
    const GeneratorSpan se_p = horizontal(Gen::psi, site_index, y_below);
    const GeneratorSpan se_s = horizontal(Gen::psi_star, site_index, y_below);
    const double s = inv_sqrt2;
    if (kind == Gen::psi)
        return lam * s * ne_p + s * ne_s - lam3 * s * se_p - s * se_s;
    return lam_inv * s * ne_s + s * ne_p - lam3i * s * se_s - s * se_p;
}

GeneratorSpan EdgeFermions::vertical_west(Gen kind, int site_index, int y_below) const {
    if (site_index < 1 || site_index > width_)
        throw std::domain_error("no horizontal edges west of this vertical edge");
    const GeneratorSpan nw_p = horizontal(Gen::psi, site_index - 1, y_below + 1);
    const GeneratorSpan nw_s = horizontal(Gen::psi_star, site_index - 1, y_below + 1);
    const GeneratorSpan sw_p = horizontal(Gen::psi, site_index - 1, y_below);
    const GeneratorSpan sw_s = horizontal(Gen::psi_star, site_index - 1, y_below);
    const double s = inv_sqrt2;
    if (kind == Gen::psi)
        return lam_inv * s * nw_p + s * nw_s - lam3i * s * sw_p - s * sw_s;
    return lam * s * nw_s + s * nw_p - lam3 * s * sw_s - s * sw_p;
}

GeneratorSpan EdgeFermions::vertical_boundary(Gen kind, int site_index, int y_below) const {
    const C cl = (1.0 - lam) / (2.0 * std::sqrt(2.0));
    const C cli = (1.0 - lam_inv) / (2.0 * std::sqrt(2.0));
    if (site_index == 0) {
        const GeneratorSpan ne_p = horizontal(Gen::psi, 0, y_below + 1);
        const GeneratorSpan ne_s = horizontal(Gen::psi_star, 0, y_below + 1);
        const GeneratorSpan se_p = horizontal(Gen::psi, 0, y_below);
        const GeneratorSpan se_s = horizontal(Gen::psi_star, 0, y_below);
        if (kind == Gen::psi)
            return cl * (lam * ne_p + ne_s) + cli * (lam_inv * se_p - se_s);
        return cli * (lam_inv * ne_s + ne_p) + cl * (lam * se_s - se_p);
    }
    if (site_index == width_) {
        const GeneratorSpan nw_p = horizontal(Gen::psi, width_ - 1, y_below + 1);
        const GeneratorSpan nw_s = horizontal(Gen::psi_star, width_ - 1, y_below + 1);
        const GeneratorSpan sw_p = horizontal(Gen::psi, width_ - 1, y_below);
        const GeneratorSpan sw_s = horizontal(Gen::psi_star, width_ - 1, y_below);
        if (kind == Gen::psi)
            return cli * (lam_inv * nw_p + nw_s) + cl * (lam * sw_p - sw_s);
        return cl * (lam * nw_s + nw_p) + cli * (lam_inv * sw_s - sw_p);
    }
    throw std::domain_error("not a boundary vertical edge");
}

GeneratorSpan EdgeFermions::vertical(Gen kind, int site_index, int y_below) const {
    if (site_index < width_) return vertical_east(kind, site_index, y_below);
    return vertical_west(kind, site_index, y_below);
}

} // namespace slitstrip
