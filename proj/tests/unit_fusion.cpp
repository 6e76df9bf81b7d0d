#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "slitstrip/fusion.hpp"
#include "slitstrip/statespace.hpp"
#include "slitstrip/transfer.hpp"

using namespace slitstrip;
using C = std::complex<double>;

namespace {

HalfIntegerSet mask_set(std::uint32_t mask) {
    std::vector<int> twoks;
    for (int j = 0; j < 31; ++j)
        if (mask >> j & 1u) twoks.push_back(2 * j + 1);
    return HalfIntegerSet(twoks);
}

// All keys with total size at most `depth` for the given geometry.
std::vector<FusionKey> keys_up_to_depth(const StripGeometry& g, int depth) {
    std::vector<FusionKey> keys;
    const std::uint32_t nt = 1u << g.width;
    const std::uint32_t nl = 1u << g.leg_left;
    const std::uint32_t nr = 1u << g.leg_right;
    for (std::uint32_t mt = 0; mt < nt; ++mt)
        for (std::uint32_t ml = 0; ml < nl; ++ml)
            for (std::uint32_t mr = 0; mr < nr; ++mr) {
                if (__builtin_popcount(mt) + __builtin_popcount(ml) + __builtin_popcount(mr) >
                    depth)
                    continue;
                keys.push_back(FusionKey{mask_set(mt), mask_set(ml), mask_set(mr)});
            }
    return keys;
}

} // namespace

TEST_CASE("key parsing and validation") {
    CHECK(parse_half_set("1,3,5").values() == std::vector<int>{1, 3, 5});
    CHECK(parse_half_set("5, 1").values() == std::vector<int>{1, 5});
    CHECK(parse_half_set("").empty());
    CHECK_THROWS(parse_half_set("2"));
    CHECK_THROWS(parse_half_set("-1"));
    CHECK_THROWS(parse_half_set("1,1"));
    CHECK_THROWS(parse_half_set("1,x"));

    const StripGeometry g = make_geometry(-1, 2);
    CHECK_NOTHROW(validate_key(g, FusionKey{mask_set(0b101), mask_set(0b1), mask_set(0b10)}));
    CHECK_THROWS(validate_key(g, FusionKey{mask_set(0b1000), {}, {}}));  // 7/2 needs width 4
    CHECK_THROWS(validate_key(g, FusionKey{{}, mask_set(0b10), {}}));    // 3/2 needs left leg 2
    CHECK_THROWS(validate_key(g, FusionKey{{}, {}, mask_set(0b100)}));   // 5/2 needs right leg 3

    CHECK(FusionKey{mask_set(0b11), mask_set(0b1), {}}.to_string() == "[1,3];[1];[]");
    CHECK(FusionKey{}.to_string() == "[];[];[]");
}

TEST_CASE("top annihilation reproduces signed removal") {
    const StripGeometry g = make_geometry(-1, 2);
    const FusionEngine engine(g);
    const FusionInputs& in = engine.inputs();

    for (std::uint32_t mask = 0; mask < (1u << g.width); ++mask) {
        const HalfIntegerSet alpha = mask_set(mask);
        const StateVector v = engine.strip_state(alpha);
        for (int j = 0; j < g.width; ++j) {
            const int twok = 2 * j + 1;
            const StateVector lhs = apply_span(g, mode_span(in.basis_top.f_plus.col(j)), v);
            StateVector rhs = StateVector::Zero(lhs.size());
            if (alpha.contains(twok))
                rhs = static_cast<double>(signed_indicator(alpha, twok)) *
                      engine.strip_state(alpha.without(twok));
            CHECK((lhs - rhs).norm() < 1e-10);
        }
    }
}

TEST_CASE("leg annihilation signs carry the right-leg parity") {
    for (const auto [a, b] : {std::pair{-1, 1}, std::pair{-1, 2}, std::pair{-2, 1}}) {
        const StripGeometry g = make_geometry(a, b);
        const FusionEngine engine(g);
        const FusionInputs& in = engine.inputs();

        for (std::uint32_t ml = 0; ml < (1u << g.leg_left); ++ml)
            for (std::uint32_t mr = 0; mr < (1u << g.leg_right); ++mr) {
                const HalfIntegerSet bl = mask_set(ml);
                const HalfIntegerSet br = mask_set(mr);
                const StateVector w = engine.slit_state(bl, br);
                const double parity = br.size() % 2 == 0 ? 1.0 : -1.0;

                for (int j = 0; j < g.leg_left; ++j) {
                    const int twok = 2 * j + 1;
                    const StateVector lhs = apply_span(
                        g, mode_span(extend_left(g, in.basis_left.f_plus.col(j))), w);
                    StateVector rhs = StateVector::Zero(lhs.size());
                    if (bl.contains(twok))
                        rhs = parity * signed_indicator(bl, twok) *
                              engine.slit_state(bl.without(twok), br);
                    CHECK((lhs - rhs).norm() < 1e-10);
                }
                for (int j = 0; j < g.leg_right; ++j) {
                    const int twok = 2 * j + 1;
                    const StateVector lhs = apply_span(
                        g, mode_span(extend_right(g, in.basis_right.f_plus.col(j))), w);
                    StateVector rhs = StateVector::Zero(lhs.size());
                    if (br.contains(twok))
                        rhs = static_cast<double>(signed_indicator(br, twok)) *
                              engine.slit_state(bl, br.without(twok));
                    CHECK((lhs - rhs).norm() < 1e-10);
                }
            }
    }
}

TEST_CASE("both vacua carry the globally maximal eigenvalues") {
    for (const auto [a, b] : {std::pair{-1, 1}, std::pair{-1, 2}, std::pair{-2, 2}}) {
        const StripGeometry g = make_geometry(a, b);
        const FusionEngine engine(g);

        const Eigen::MatrixXd t_strip = TransferOperator(g, Variant::strip).dense();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t_strip);
        const double mu_max = es.eigenvalues().maxCoeff();
        CHECK(std::abs(engine.strip_vacuum().eigenvalue - mu_max) < 1e-10 * mu_max);

        const Eigen::MatrixXd t_slit = TransferOperator(g, Variant::slit).dense();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(t_slit);
        const double lambda_max = es2.eigenvalues().maxCoeff();
        CHECK(std::abs(engine.slit_vacuum().eigenvalue - lambda_max) < 1e-10 * lambda_max);
    }
}

TEST_CASE("closed form reproduces the vacuum eigenvalue") {
    for (int width = 2; width <= 8; ++width) {
        const StripGeometry g = make_geometry(-1, width - 1);
        const FusionEngine engine(g);
        const double mu0 = engine.strip_vacuum().eigenvalue;
        const double closed = vacuum_eigenvalue_closed_form(width);
        CHECK(std::abs(mu0 - closed) < 1e-10 * closed);
    }
}

TEST_CASE("diagonalization report is clean on strip and slit") {
    for (const auto [a, b] : {std::pair{-2, 2}, std::pair{-1, 3}}) {
        const DiagonalizationReport rep = verify_diagonalization(make_geometry(a, b));
        CHECK(std::abs(rep.vacuum_eigenvalue - rep.vacuum_closed_form) <
              1e-10 * rep.vacuum_closed_form);
        CHECK(rep.max_residual < 1e-9);
        CHECK(rep.max_gram_defect < 1e-10);
        CHECK(rep.max_annihilation < 1e-10);
        CHECK(rep.slit_vacuum_eigenvalue > 0.0);
        CHECK(rep.slit_max_residual < 1e-9);
        CHECK(rep.slit_max_gram_defect < 1e-10);
        CHECK(rep.slit_max_annihilation < 1e-10);
    }
}

TEST_CASE("recursion matches explicit overlap ratios") {
    for (const auto [a, b] :
         {std::pair{-1, 1}, std::pair{-1, 2}, std::pair{-2, 2}, std::pair{-2, 3}}) {
        const StripGeometry g = make_geometry(a, b);
        const FusionEngine engine(g);
        const double vacuum = engine.direct_vacuum();
        CHECK(vacuum > 0.0);
        CHECK(engine.recursive(FusionKey{}) == 1.0);

        for (const FusionKey& key : keys_up_to_depth(g, 4)) {
            const double ratio = engine.direct(key) / vacuum;
            const double rec = engine.recursive(key);
            CHECK(std::abs(rec - ratio) < 1e-9 * std::max(1.0, std::abs(ratio)));
        }
    }
}

TEST_CASE("peeling order does not change the recursion") {
    for (const auto [a, b] : {std::pair{-3, 3}, std::pair{-2, 4}}) {
        const StripGeometry g = make_geometry(a, b);
        const FusionEngine engine(g);
        for (const FusionKey& key : keys_up_to_depth(g, 5)) {
            const double first = engine.recursive(key);
            const double second = engine.recursive_alternate(key);
            CHECK(std::abs(first - second) < 1e-10 * std::max(1.0, std::abs(first)));
        }
    }
}

TEST_CASE("odd totals vanish along both routes") {
    const StripGeometry g = make_geometry(-2, 2);
    const FusionEngine engine(g);
    for (const FusionKey& key : keys_up_to_depth(g, 3)) {
        if (key.total_size() % 2 == 0) continue;
        CHECK(engine.recursive(key) == 0.0);
        CHECK(std::abs(engine.direct(key)) < 1e-10 * engine.direct_vacuum());
    }
}

TEST_CASE("renormalization constants are positive") {
    for (int width = 2; width <= 8; ++width) {
        const StripGeometry g = make_geometry(-(width / 2), width - width / 2);
        const RenormalizationConstants z = renormalization_constants(g);
        CHECK(z.z_mono > 0.0);
        CHECK(z.z_mpp > 0.0);
    }
}

TEST_CASE("finite-height boundary ratio approaches the fusion limit") {
    const StripGeometry g = make_geometry(-1, 1);
    const FusionEngine engine(g);
    const FusionInputs& in = engine.inputs();

    // An even number of top modes keeps the excited strip state real up to
    // a global sign, so the transpose pairing in the numerator matches the
    // hermitian pairing used by the overlap tables.
    const FusionKey key{mask_set(0b11), mask_set(0b1), mask_set(0b1)};
    const double limit = engine.direct_ratio(key) / renormalization_constants(g).z_mono;

    const TransferOperator t_strip(g, Variant::strip);
    const TransferOperator t_slit(g, Variant::slit);
    const double mu0 = engine.strip_vacuum().eigenvalue;
    const double lambda0 = engine.slit_vacuum().eigenvalue;
    const double mu_key = mu0 / (in.basis_top.lambda(0) * in.basis_top.lambda(1));
    const double lambda_key = lambda0 / (in.basis_left.lambda(0) * in.basis_right.lambda(0));

    const StateVector v_conj = engine.strip_state(key.top).conjugate();
    const StateVector w = engine.slit_state(key.left, key.right);

    std::vector<double> err;
    for (int h = 1; h <= 4; ++h) {
        StateVector x = w;
        for (int step = 0; step < h; ++step) x = t_slit.apply(x);
        for (int step = 0; step < h; ++step) x = t_strip.apply(x);
        const C numerator = v_conj.dot(x);

        ObservableRequest req;
        req.h_top = h;
        req.h_bottom = h;
        req.slit = true;
        const double z = truncated_observables(g, req).z_summed;

        const double expectation = std::real(numerator) / z;
        const double renorm = std::pow(mu_key / mu0, h) * std::pow(lambda_key / lambda0, h);
        err.push_back(std::abs(expectation / renorm - limit));
    }

    // The residual error comes from excited-state contamination of the
    // partition function; the slowest mode pair sets the per-step decay.
    const double rho = std::max(1.0 / (in.basis_top.lambda(0) * in.basis_top.lambda(1)),
                                1.0 / (in.basis_left.lambda(0) * in.basis_right.lambda(0)));
    CHECK(err[3] < err[1]);
    CHECK(err[3] < 1e-2 * std::max(1.0, std::abs(limit)));
    for (int h = 2; h <= 4; ++h)
        CHECK(err[static_cast<size_t>(h - 1)] < 3.0 * err[0] * std::pow(rho, h - 1));
}

TEST_CASE("route preconditions are enforced") {
    const StripGeometry wide = make_geometry(-8, 8);
    const FusionEngine engine(wide);
    CHECK_THROWS(engine.direct(FusionKey{}));
    CHECK_NOTHROW(engine.recursive(FusionKey{mask_set(0b11), mask_set(0b1), mask_set(0b1)}));
    CHECK_THROWS(engine.recursive(FusionKey{{}, mask_set(1u << 10), {}}));
}
