#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "slitstrip/clifford.hpp"
#include "slitstrip/crosssection.hpp"
#include "slitstrip/geometry.hpp"
#include "slitstrip/transfer.hpp"

using namespace slitstrip;
using C = std::complex<double>;

namespace {

Eigen::MatrixXcd dense_span_operator(const StripGeometry& g, const GeneratorSpan& coeffs) {
    const std::uint32_t dim = v_dimension(g);
    Eigen::MatrixXcd m(dim, dim);
    for (std::uint32_t c = 0; c < dim; ++c) {
        StateVector e = StateVector::Zero(dim);
        e(c) = 1.0;
        m.col(c) = apply_span(g, coeffs, e);
    }
    return m;
}

StateVector random_state(const StripGeometry& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    StateVector v(v_dimension(g));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = C(gauss(rng), gauss(rng));
    return v;
}

CsFunction random_function(int width, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CsFunction f(width);
    for (int i = 0; i < width; ++i) f(i) = C(gauss(rng), gauss(rng));
    return f;
}

} // namespace

TEST_CASE("generator anticommutation and adjoints") {
    for (int b = 1; b <= 3; ++b) {
        const StripGeometry g = make_geometry(-1, b);
        const int w = g.width;
        const std::uint32_t dim = v_dimension(g);
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
        std::vector<Eigen::MatrixXcd> psi, psi_star;
        for (int d = 0; d < w; ++d) {
            psi.push_back(dense_generator(g, Gen::psi, d));
            psi_star.push_back(dense_generator(g, Gen::psi_star, d));
        }
        for (int d = 0; d < w; ++d) {
            CHECK((psi[d].adjoint() + psi[d]).norm() == doctest::Approx(0.0).epsilon(1e-12));
            CHECK((psi_star[d].adjoint() - psi_star[d]).norm() ==
                  doctest::Approx(0.0).epsilon(1e-12));
            for (int e = 0; e < w; ++e) {
                const Eigen::MatrixXcd pp = psi[d] * psi[e] + psi[e] * psi[d];
                const Eigen::MatrixXcd ss = psi_star[d] * psi_star[e] + psi_star[e] * psi_star[d];
                const Eigen::MatrixXcd ps = psi[d] * psi_star[e] + psi_star[e] * psi[d];
                const double delta = d == e ? 2.0 : 0.0;
                CHECK((pp + delta * id).norm() < 1e-12 * dim);
                CHECK((ss - delta * id).norm() < 1e-12 * dim);
                CHECK(ps.norm() < 1e-12 * dim);
            }
        }
    }
}

TEST_CASE("span application matches dense generators") {
    const StripGeometry g = make_geometry(-2, 2);
    const StateVector v = random_state(g, 101);
    for (int d = 0; d < g.width; ++d) {
        for (Gen kind : {Gen::psi, Gen::psi_star}) {
            const StateVector direct = apply_generator(g, kind, d, v);
            const StateVector via_dense = dense_generator(g, kind, d) * v;
            CHECK((direct - via_dense).norm() < 1e-13 * v.norm());
            const StateVector via_span = apply_span(g, unit_span(g.width, kind, d), v);
            CHECK((direct - via_span).norm() == 0.0);
        }
    }
    const GeneratorSpan coeffs = 0.5 * GeneratorSpan::Random(2 * g.width);
    Eigen::MatrixXcd combo = Eigen::MatrixXcd::Zero(v.size(), v.size());
    for (int d = 0; d < g.width; ++d) {
        combo += coeffs(d) * dense_generator(g, Gen::psi, d);
        combo += coeffs(g.width + d) * dense_generator(g, Gen::psi_star, d);
    }
    CHECK((apply_span(g, coeffs, v) - combo * v).norm() < 1e-12 * v.norm());
}

TEST_CASE("induced rotation table matches dense conjugation on strips") {
    for (int b = 1; b <= 3; ++b) {
        for (int a = -2; a <= -1; ++a) {
            const StripGeometry g = make_geometry(a, b);
            const Eigen::MatrixXcd table = conjugation_matrix(g.width);
            const Eigen::MatrixXcd dense = conjugation_matrix_dense(g, Variant::strip);
            CHECK((table - dense).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("slit conjugation splits into two leg blocks") {
    for (const auto& [a, b] : std::vector<std::pair<int, int>>{{-1, 1}, {-2, 2}, {-1, 3}}) {
        const StripGeometry g = make_geometry(a, b);
        const int w = g.width;
        const int wl = g.leg_left;
        const int wr = g.leg_right;
        const Eigen::MatrixXcd ml = conjugation_matrix(wl);
        const Eigen::MatrixXcd mr = conjugation_matrix(wr);
        Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(2 * w, 2 * w);
        const auto embed = [&](const Eigen::MatrixXcd& leg, int leg_w, int offset) {
            const auto row = [&](int i) { return i < leg_w ? offset + i : w + offset + i - leg_w; };
            for (int i = 0; i < 2 * leg_w; ++i)
                for (int j = 0; j < 2 * leg_w; ++j) expected(row(i), row(j)) = leg(i, j);
        };
        embed(ml, wl, 0);
        embed(mr, wr, wl);
        const Eigen::MatrixXcd dense = conjugation_matrix_dense(g, Variant::slit);
        CHECK((expected - dense).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("height translation is invertible") {
    const EdgeFermions field(3);
    const GeneratorSpan s = GeneratorSpan::Random(6);
    CHECK((field.at_height(field.at_height(s, 2), -2) - s).norm() < 1e-12 * s.norm());
    CHECK((field.at_height(s, 0) - s).norm() == 0.0);
}

TEST_CASE("two-constraint edge value solver") {
    std::mt19937 rng(55);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const C pse = std::polar(1.0, 3.0 * std::acos(-1.0) / 8.0);
    const C pne = std::polar(1.0, std::acos(-1.0) / 8.0);
    for (int t = 0; t < 5; ++t) {
        const C se(gauss(rng), gauss(rng));
        const C ne(gauss(rng), gauss(rng));
        const C z = vertical_value_east(se, ne);
        CHECK(std::abs(std::real(pse * z) - std::real(pse * se)) < 1e-12);
        CHECK(std::abs(std::real(pne * z) - std::real(pne * ne)) < 1e-12);
        const C zw = vertical_value_west(se, ne);
        CHECK(std::abs(std::real(std::conj(pse) * zw) - std::real(std::conj(pse) * se)) < 1e-12);
        CHECK(std::abs(std::real(std::conj(pne) * zw) - std::real(std::conj(pne) * ne)) < 1e-12);
    }
}

TEST_CASE("edge extension identities") {
    for (int w = 1; w <= 4; ++w) {
        const ExtensionReport rep = verify_edge_extension(w, -2, 2);
        CHECK(rep.equality < 1e-11);
        CHECK(rep.csh < 1e-11);
        CHECK(rep.crbv < 1e-11);
        CHECK(rep.closedness < 1e-11);
        CHECK(rep.slide < 1e-11);
    }
}

TEST_CASE("spectral basis solves the frequency equation") {
    const double q = 3.0 - 2.0 * std::sqrt(2.0);
    const double pi = std::acos(-1.0);
    for (int w : {1, 2, 3, 5, 8, 13, 16}) {
        const SpectralBasis basis = eigenfunction_basis(w);
        for (int j = 0; j < w; ++j) {
            const double om = basis.omega(j);
            CHECK(om > j * pi / w);
            CHECK(om < (j + 0.5) * pi / w);
            const double ratio = std::cos((w + 0.5) * om) / std::cos((w - 0.5) * om);
            CHECK(std::abs(ratio - q) < 1e-10);
            CHECK(basis.lambda(j) == doctest::Approx(lambda_of_omega(om)).epsilon(1e-14));
            CHECK(basis.lambda(j) > 1.0);
            if (j > 0) CHECK(basis.lambda(j) > basis.lambda(j - 1));
        }
    }
}

TEST_CASE("spectral basis is orthonormal and diagonalizes the rotation") {
    for (int w : {1, 2, 3, 6, 11, 16}) {
        const SpectralBasis basis = eigenfunction_basis(w);
        Eigen::MatrixXd b(2 * w, 2 * w);
        for (int j = 0; j < w; ++j) {
            b.col(j) = realify(basis.f_plus.col(j));
            b.col(w + j) = realify(basis.f_minus.col(j));
        }
        const Eigen::MatrixXd gram = b.transpose() * b;
        CHECK((gram - Eigen::MatrixXd::Identity(2 * w, 2 * w)).cwiseAbs().maxCoeff() < 1e-11);
        for (int j = 0; j < w; ++j) {
            const Eigen::VectorXd fp = realify(basis.f_plus.col(j));
            const Eigen::VectorXd fm = realify(basis.f_minus.col(j));
            CHECK((basis.rotation * fp - fp / basis.lambda(j)).norm() < 1e-10);
            CHECK((basis.rotation * fm - basis.lambda(j) * fm).norm() < 1e-10);
            // Reversal pairing and boundary-phase normalization.
            const CsFunction rf = direction_reversal(basis.f_plus.col(j));
            CHECK((rf - CsFunction(basis.f_minus.col(j))).norm() == 0.0);
            const C bv = vertical_value_east(basis.f_plus(0, j),
                                             basis.lambda(j) * basis.f_plus(0, j));
            const C t = std::polar(1.0, std::acos(-1.0) / 4.0) * bv;
            CHECK(std::abs(t.imag()) < 1e-10);
            CHECK(t.real() > 0.0);
        }
    }
}

TEST_CASE("mode anticommutators reproduce the reversal pairing") {
    const StripGeometry g = make_geometry(-1, 2);
    const int w = g.width;
    const std::uint32_t dim = v_dimension(g);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
    const CsFunction f = random_function(w, 7);
    const CsFunction h = random_function(w, 8);
    const Eigen::MatrixXcd af = dense_span_operator(g, mode_span(f));
    const Eigen::MatrixXcd ah = dense_span_operator(g, mode_span(h));
    const double pairing = cs_inner(h, direction_reversal(f));
    CHECK((af * ah + ah * af - pairing * id).norm() < 1e-12 * dim);

    const SpectralBasis basis = eigenfunction_basis(w);
    std::vector<Eigen::MatrixXcd> ops;
    for (int j = 0; j < w; ++j) ops.push_back(dense_span_operator(g, mode_span(basis.f_plus.col(j))));
    for (int j = 0; j < w; ++j) ops.push_back(dense_span_operator(g, mode_span(basis.f_minus.col(j))));
    for (int i = 0; i < 2 * w; ++i)
        for (int j = 0; j < 2 * w; ++j) {
            const double expect = (i + w == j || j + w == i) ? 1.0 : 0.0;
            CHECK((ops[i] * ops[j] + ops[j] * ops[i] - expect * id).norm() < 1e-11 * dim);
        }
    // Adjoints swap the two directions.
    for (int j = 0; j < w; ++j)
        CHECK((ops[j].adjoint() - ops[w + j]).norm() < 1e-11 * dim);
}

TEST_CASE("transfer conjugation scales the basis modes") {
    const StripGeometry g = make_geometry(-1, 2);
    const int w = g.width;
    const SpectralBasis basis = eigenfunction_basis(w);
    const Eigen::MatrixXcd t = TransferOperator(g, Variant::strip).dense().cast<C>();
    for (int j = 0; j < w; ++j) {
        const Eigen::MatrixXcd a = dense_span_operator(g, mode_span(basis.f_plus.col(j)));
        const Eigen::MatrixXcd c = dense_span_operator(g, mode_span(basis.f_minus.col(j)));
        CHECK((t * a - basis.lambda(j) * a * t).norm() < 1e-10 * (t * a).norm());
        CHECK((t * c - c * t / basis.lambda(j)).norm() < 1e-10 * (t * c).norm());
    }
}

TEST_CASE("slit transfer conjugation scales the leg modes") {
    const StripGeometry g = make_geometry(-1, 2);
    const SpectralBasis left = eigenfunction_basis(g.leg_left);
    const SpectralBasis right = eigenfunction_basis(g.leg_right);
    const Eigen::MatrixXcd t = TransferOperator(g, Variant::slit).dense().cast<C>();
    for (int j = 0; j < g.leg_left; ++j) {
        const CsFunction f = extend_left(g, left.f_plus.col(j));
        const Eigen::MatrixXcd b = dense_span_operator(g, mode_span(f));
        CHECK((t * b - left.lambda(j) * b * t).norm() < 1e-10 * (t * b).norm());
    }
    for (int j = 0; j < g.leg_right; ++j) {
        const CsFunction f = extend_right(g, right.f_plus.col(j));
        const Eigen::MatrixXcd b = dense_span_operator(g, mode_span(f));
        CHECK((t * b - right.lambda(j) * b * t).norm() < 1e-10 * (t * b).norm());
    }
    // Modes of the two legs anticommute with one another.
    const Eigen::MatrixXcd bl =
        dense_span_operator(g, mode_span(extend_left(g, left.f_minus.col(0))));
    const Eigen::MatrixXcd br =
        dense_span_operator(g, mode_span(extend_right(g, right.f_plus.col(0))));
    CHECK((bl * br + br * bl).norm() < 1e-12 * v_dimension(g));
}

TEST_CASE("pole functions have unit leading pairings") {
    const StripGeometry g = make_geometry(-2, 3);
    const FusionInputs in = prepare_fusion_inputs(g);
    const int w = g.width;
    REQUIRE(static_cast<int>(in.pole[0].size()) == w);
    REQUIRE(static_cast<int>(in.pole[1].size()) == g.leg_left);
    REQUIRE(static_cast<int>(in.pole[2].size()) == g.leg_right);

    std::vector<CsFunction> rows;
    for (int j = 0; j < w; ++j) rows.push_back(in.basis_top.f_plus.col(j));
    for (int j = 0; j < g.leg_left; ++j) rows.push_back(extend_left(g, in.basis_left.f_minus.col(j)));
    for (int j = 0; j < g.leg_right; ++j)
        rows.push_back(extend_right(g, in.basis_right.f_minus.col(j)));

    int col = 0;
    for (int e = 0; e < 3; ++e) {
        for (size_t k = 0; k < in.pole[e].size(); ++k, ++col) {
            for (int r = 0; r < 2 * w; ++r) {
                const double expect = r == col ? 1.0 : 0.0;
                CHECK(std::abs(cs_inner(rows[r], in.pole[e][k]) - expect) < 1e-10);
            }
        }
    }

    // The stored pairing tables match fresh evaluations.
    for (int j = 0; j < w; ++j)
        CHECK(in.ip[0][0](j, 0) ==
              doctest::Approx(cs_inner(in.basis_top.f_minus.col(j), in.pole[0][0])).epsilon(1e-14));
    for (int j = 0; j < g.leg_left; ++j)
        CHECK(in.ip[2][1](j, 1) ==
              doctest::Approx(cs_inner(extend_left(g, in.basis_left.f_plus.col(j)), in.pole[2][1]))
                  .epsilon(1e-14));
}

TEST_CASE("leg extensions validate sizes") {
    const StripGeometry g = make_geometry(-2, 3);
    CHECK_THROWS(extend_left(g, CsFunction::Zero(g.leg_left + 1)));
    CHECK_THROWS(extend_right(g, CsFunction::Zero(g.leg_right + 1)));
    const CsFunction f = extend_left(g, CsFunction::Ones(g.leg_left));
    CHECK(f.head(g.leg_left).real().sum() == doctest::Approx(g.leg_left));
    CHECK(f.tail(g.leg_right).norm() == 0.0);
}
