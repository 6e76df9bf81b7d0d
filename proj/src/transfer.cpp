#include "slitstrip/transfer.hpp"

#include <algorithm>
#include <cmath>

namespace slitstrip {

namespace {

// In-place vertical sweep shared by both operators: 2x2 symmetric factor
// [[e^b, e^-b], [e^-b, e^b]] at every free bit position.
void vertical_sweep(StateVector& v, const std::vector<int>& free_sites, double frozen_scale) {
    const double ep = std::exp(beta_critical);
    const double em = std::exp(-beta_critical);
    const Eigen::Index n = v.size();
    for (int s : free_sites) {
        const std::uint64_t bit = std::uint64_t{1} << s;
        for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(n); ++i) {
            if (i & bit) continue;
            const std::uint64_t j = i | bit;
            const std::complex<double> x0 = v(static_cast<Eigen::Index>(i));
            const std::complex<double> x1 = v(static_cast<Eigen::Index>(j));
            v(static_cast<Eigen::Index>(i)) = ep * x0 + em * x1;
            v(static_cast<Eigen::Index>(j)) = em * x0 + ep * x1;
        }
    }
    v *= frozen_scale;
}

} // namespace

TransferOperator::TransferOperator(const StripGeometry& g, Variant variant)
    : geom_(g), variant_(variant) {
    const std::uint32_t dim = v_dimension(g);
    hor_sqrt_.resize(dim);
    for (std::uint32_t v = 0; v < dim; ++v) hor_sqrt_(v) = row_weight(g, v_row(g, v));
    // Frozen sites: a, b always; the slit column additionally for the slit step.
    int frozen = 2;
    for (int s = 1; s < g.width; ++s) {
        if (variant == Variant::slit && s == g.leg_left) {
            ++frozen;
            continue;
        }
        free_sites_.push_back(s);
    }
    frozen_scale_ = std::exp(beta_critical * frozen);
}

StateVector TransferOperator::apply(const StateVector& v) const {
    if (v.size() != hor_sqrt_.size()) throw std::domain_error("state vector has wrong dimension");
    StateVector out = hor_sqrt_.cwiseProduct(v);
    vertical_sweep(out, free_sites_, frozen_scale_);
    out = hor_sqrt_.cwiseProduct(out);
    return out;
}

StateVector TransferOperator::solve(const StateVector& rhs, double tol, int max_iter) const {
    // Conjugate gradients; the operator is symmetric positive definite.
    StateVector x = StateVector::Zero(rhs.size());
    StateVector r = rhs;
    StateVector p = r;
    double rs = r.squaredNorm();
    const double target = tol * tol * rhs.squaredNorm();
    for (int it = 0; it < max_iter && rs > target; ++it) {
        StateVector ap = apply(p);
        const double alpha = rs / std::real(p.dot(ap));
        x += alpha * p;
        r -= alpha * ap;
        const double rs_new = r.squaredNorm();
        p = r + (rs_new / rs) * p;
        rs = rs_new;
    }
    return x;
}

Eigen::MatrixXd TransferOperator::dense() const {
    if (geom_.width > 8) throw std::domain_error("dense transfer materialization capped at width 8");
    const Eigen::Index dim = hor_sqrt_.size();
    Eigen::MatrixXd m(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        StateVector e = StateVector::Zero(dim);
        e(c) = 1.0;
        m.col(c) = apply(e).real();
    }
    return m;
}

PerronData perron_frobenius(const TransferOperator& op, int spin_a, std::optional<int> spin_mid,
                            double tol, int max_iter) {
    const StripGeometry& g = op.geometry();
    const std::vector<std::uint32_t> rows =
        spin_mid ? sector_rows_slit(g, spin_a, *spin_mid) : sector_rows(g, spin_a);
    const std::uint32_t dim = v_dimension(g);

    StateVector v = StateVector::Zero(dim);
    for (std::uint32_t r : rows) v(r) = 1.0;
    v /= v.norm();
    // Deterministic deflation companion for the in-sector gap estimate.
    StateVector u = StateVector::Zero(dim);
    for (size_t i = 0; i < rows.size(); ++i) u(rows[i]) = std::sin(1.0 + static_cast<double>(i));
    u -= v * v.dot(u);
    u /= u.norm();

    PerronData out;
    double mu_prev = 0.0;
    double mu2 = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        StateVector tv = op.apply(v);
        const double mu = std::real(v.dot(tv));
        StateVector tu = op.apply(u);
        tu -= v * v.dot(tu);
        mu2 = std::real(u.dot(tu));
        u = tu / tu.norm();
        const double resid = (tv - mu * v).norm();
        v = tv / tv.norm();
        out.iterations = it;
        if (it > 1 && std::abs(mu - mu_prev) < tol * std::abs(mu) && resid <= 1e-10 * std::abs(mu)) {
            mu_prev = mu;
            break;
        }
        mu_prev = mu;
        if (it == max_iter) throw std::runtime_error("power iteration did not converge");
    }
    out.eigenvalue = mu_prev;
    out.gap = mu_prev - mu2;
    // Entries of the limit vector are nonnegative; scrub sign noise.
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::real(v(i)) < 0 && std::real(v(i)) > -1e-14) v(i) = 0.0;
    out.vector = v;
    return out;
}

FullTransferOperator::FullTransferOperator(const StripGeometry& g, Variant variant)
    : geom_(g), variant_(variant) {
    const std::uint64_t dim = std::uint64_t{1} << (g.width + 1);
    hor_sqrt_.resize(static_cast<Eigen::Index>(dim));
    for (std::uint64_t r = 0; r < dim; ++r)
        hor_sqrt_(static_cast<Eigen::Index>(r)) = row_weight(g, static_cast<SpinRow>(r));
    int frozen = 2;
    for (int s = 1; s < g.width; ++s) {
        if (variant == Variant::slit && s == g.leg_left) {
            ++frozen;
            continue;
        }
        free_sites_.push_back(s);
    }
    frozen_scale_ = std::exp(beta_critical * frozen);
}

StateVector FullTransferOperator::apply(const StateVector& v) const {
    if (v.size() != hor_sqrt_.size()) throw std::domain_error("state vector has wrong dimension");
    StateVector out = hor_sqrt_.cwiseProduct(v);
    vertical_sweep(out, free_sites_, frozen_scale_);
    out = hor_sqrt_.cwiseProduct(out);
    return out;
}

Eigen::VectorXd FullTransferOperator::lift_ones() const { return hor_sqrt_; }

namespace {

void apply_spin_diagonal(const StripGeometry& g, StateVector& v, int x, bool full_space) {
    const int site = x - g.a;
    if (site < 0 || site > g.width) throw std::domain_error("insertion column out of range");
    const std::uint64_t n = static_cast<std::uint64_t>(v.size());
    if (!full_space && site == g.width) return; // site b is pinned +1 on V
    const std::uint64_t bit = std::uint64_t{1} << site;
    for (std::uint64_t i = 0; i < n; ++i)
        if (!(i & bit)) v(static_cast<Eigen::Index>(i)) = -v(static_cast<Eigen::Index>(i));
}

} // namespace

ObservableResult truncated_observables(const StripGeometry& g, const ObservableRequest& req) {
    for (const auto& ins : req.insertions)
        if (ins.y < -req.h_bottom || ins.y > req.h_top)
            throw std::domain_error("insertion height outside the truncated lattice");

    ObservableResult out;

    // Full-space walk: partition function and correlation with every
    // boundary component's constant summed over.
    {
        const FullTransferOperator t_strip(g, Variant::strip);
        const FullTransferOperator t_slit(g, Variant::slit);
        const Eigen::VectorXd lift = t_strip.lift_ones();
        StateVector v = lift.cast<std::complex<double>>();
        StateVector vz = v;
        for (int y = -req.h_bottom; y <= req.h_top; ++y) {
            for (const auto& ins : req.insertions)
                if (ins.y == y) apply_spin_diagonal(g, v, ins.x, true);
            if (y < req.h_top) {
                const bool slit_step = req.slit && (y + 1 <= 0);
                v = slit_step ? t_slit.apply(v) : t_strip.apply(v);
                vz = slit_step ? t_slit.apply(vz) : t_strip.apply(vz);
            }
        }
        const double z = std::real(lift.cast<std::complex<double>>().dot(vz));
        const double num = std::real(lift.cast<std::complex<double>>().dot(v));
        out.z_summed = z;
        out.correlation = num / z;
    }

    // V-space walk: right boundary pinned +1.
    {
        const TransferOperator t_strip(g, Variant::strip);
        const TransferOperator t_slit(g, Variant::slit);
        StateVector v = lift_ones(g);
        for (int y = -req.h_bottom; y < req.h_top; ++y) {
            const bool slit_step = req.slit && (y + 1 <= 0);
            v = slit_step ? t_slit.apply(v) : t_strip.apply(v);
        }
        out.z_right_plus = std::real(lift_ones(g).dot(v));
    }
    return out;
}

} // namespace slitstrip
