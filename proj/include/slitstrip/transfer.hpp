#pragma once

#include <Eigen/Dense>
#include <optional>

#include "slitstrip/statespace.hpp"

// Row-to-row transfer operators for the strip and the slit-strip, applied
// matrix-free as a symmetric product: diagonal half-weight, a site-by-site
// vertical sweep, diagonal half-weight. Also Perron-Frobenius data via
// power iteration and finite-height partition/correlation evaluation.

namespace slitstrip {

enum class Variant { strip, slit };

// Operator on V (dimension 2^width). The vertical sweep applies a 2x2
// symmetric factor at every unconstrained site; sites whose spin is frozen
// across a step (both ends of the row, and the slit column below the
// junction) contribute a constant factor each.
class TransferOperator {
public:
    TransferOperator(const StripGeometry& g, Variant variant);

    const StripGeometry& geometry() const { return geom_; }
    Variant variant() const { return variant_; }

    StateVector apply(const StateVector& v) const;
    // Conjugate-gradient solve T x = rhs; T is positive definite.
    StateVector solve(const StateVector& rhs, double tol = 1e-12, int max_iter = 20000) const;

    // Column-by-column materialization; test-scale widths only.
    Eigen::MatrixXd dense() const;

private:
    StripGeometry geom_;
    Variant variant_;
    Eigen::VectorXd hor_sqrt_; // c_rho over V rows
    double frozen_scale_ = 1.0;
    std::vector<int> free_sites_; // bit positions with a 2x2 vertical factor
};

struct PerronData {
    double eigenvalue = 0.0;
    double gap = 0.0; // eigenvalue minus the deflated second Rayleigh quotient
    StateVector vector;
    int iterations = 0;
};

// Power iteration from the uniform positive vector of the requested sector.
// Sector: spin at site a (strip), plus spin at the slit column (slit).
// Converges when successive Rayleigh quotients differ by less than
// tol * eigenvalue and the residual is below 1e-10 * eigenvalue.
PerronData perron_frobenius(const TransferOperator& op, int spin_a, std::optional<int> spin_mid,
                            double tol = 1e-12, int max_iter = 100000);

// Transfer operator on the full row space (dimension 2^(width+1)), used for
// finite-height observables where both boundary constants are summed over.
class FullTransferOperator {
public:
    FullTransferOperator(const StripGeometry& g, Variant variant);
    StateVector apply(const StateVector& v) const;
    Eigen::VectorXd lift_ones() const; // c_rho over all rows

    const StripGeometry& geometry() const { return geom_; }

private:
    StripGeometry geom_;
    Variant variant_;
    Eigen::VectorXd hor_sqrt_;
    double frozen_scale_ = 1.0;
    std::vector<int> free_sites_;
};

struct ObservableRequest {
    int h_top = 0;
    int h_bottom = 0;
    bool slit = false; // slit steps below the junction height 0
    std::vector<SpinInsertion> insertions;
};

struct ObservableResult {
    double z_summed = 0.0;     // both (all) boundary constants summed
    double z_right_plus = 0.0; // right boundary pinned +1 (V-space route)
    double correlation = 1.0;  // expectation of the spin product (summed conditioning)
};

// Finite-height partition function and spin correlation through repeated
// transfer application with diagonal spin insertions at their heights.
ObservableResult truncated_observables(const StripGeometry& g, const ObservableRequest& req);

} // namespace slitstrip
