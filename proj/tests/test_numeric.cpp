#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "rumin/numeric.hpp"

using namespace rumin;
using namespace rumin::numeric;

namespace {

forms::MultiIndex mi(std::initializer_list<int> idx) {
    return forms::MultiIndex{std::vector<int>(idx)};
}

DVec pt(double a, double b, double c) { return DVec{a, b, c}; }

double entry_dev(const DMat& m, const DMat& n) {
    double dev = 0;
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < m[i].size(); ++j) dev = std::max(dev, std::abs(m[i][j] - n[i][j]));
    return dev;
}

}  // namespace

TEST_CASE("double group law matches the exact one") {
    carnot::GradedLieAlgebra g = carnot::heisenberg();
    la::Vec xr = testutil::V({1, 2, 3});
    la::Vec yr{la::Rational(1, 2), la::Rational(-1, 3), la::Rational(5)};
    la::Vec zr = carnot::bch_multiply(g, xr, yr);

    DVec x, y;
    for (auto& v : xr) x.push_back(v.to_double());
    for (auto& v : yr) y.push_back(v.to_double());
    DVec z = group_mul(g, x, y);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(z[size_t(i)] - zr[size_t(i)].to_double()) < 1e-12);

    DVec w = group_mul(g, z, group_inv(z));
    for (double v : w) CHECK(std::abs(v) < 1e-12);

    DVec d = dilate(g, 2.0, pt(1, 1, 1));
    CHECK(d[0] == 2.0);
    CHECK(d[2] == 4.0);
}

TEST_CASE("pansu differential of exact maps sits at the floor") {
    carnot::GradedLieAlgebra g = carnot::heisenberg();
    DVec x = pt(0.3, -0.4, 0.2);

    PansuReport dil = pansu_differential(map_dilation(g, 2.0), x, 0.05);
    CHECK(dil.block_defect < 1e-10);
    CHECK(dil.bracket_defect < 1e-10);
    REQUIRE(dil.exact_dev.has_value());
    CHECK(*dil.exact_dev < 1e-10);
    CHECK(std::abs(dil.value[2][2] - 4.0) < 1e-10);

    // left translations differentiate to the identity; the quotient telescopes
    // exactly, so only rounding scaled by 1/t^2 remains and a larger step keeps
    // that amplification below the structural floor
    PansuReport tr = pansu_differential(map_left_translation(g, pt(0.7, 0.1, -0.3)), x, 0.4);
    REQUIRE(tr.exact_dev.has_value());
    CHECK(*tr.exact_dev < 1e-10);

    // graded automorphisms also telescope exactly, and entries that are not
    // powers of two leave rounding noise, so the same large step applies
    DMat a{{2, 0, 0}, {0, 3, 0}, {0, 0, 6}};
    PansuReport am = pansu_differential(map_automorphism(g, a, "a236"), x, 0.4);
    CHECK(entry_dev(am.value, a) < 1e-9);
}

TEST_CASE("pansu differential of the contact shears") {
    for (std::string profile : {"sine", "square"}) {
        CAPTURE(profile);
        SmoothMap f = heisenberg_shear(profile);
        DVec x = pt(0.2, 0.5, -0.1);
        PansuReport r = pansu_differential(f, x, 0.02);
        REQUIRE(r.exact_dev.has_value());
        CHECK(*r.exact_dev < 1e-3);
        CHECK(r.block_defect < 1e-3);
        // the derivative matrix is the unipotent shear in closed form
        double psi_p = profile == "sine" ? std::cos(x[1]) : 2 * x[1];
        CHECK(std::abs(r.value[0][1] - psi_p) < 1e-3);
        CHECK(std::abs(r.value[0][0] - 1.0) < 1e-6);
        CHECK(std::abs(r.value[2][2] - 1.0) < 1e-6);
    }
}

TEST_CASE("structural defect shrinks under step halving at random points") {
    SmoothMap f = heisenberg_shear("sine");
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int t = 0; t < 10; ++t) {
        DVec x = pt(u(rng), u(rng), u(rng));
        PansuReport r = pansu_differential(f, x, 0.02);  // throws if decay fails
        CHECK((r.defect_fine < 1e-12 || r.defect_fine * 1.5 <= r.defect_coarse));
    }
}

TEST_CASE("a non-contact map is flagged as non-convergent") {
    carnot::GradedLieAlgebra g = carnot::heisenberg();
    SmoothMap bad;
    bad.id = "vertical-bend";
    bad.g = g;
    bad.eval = [](const DVec& x) { return DVec{x[0], x[1], x[2] + x[0] * x[0]}; };
    CHECK_THROWS_AS(pansu_differential(bad, pt(0.4, 0.3, 0.2), 0.1), NumericError);
    try {
        pansu_differential(bad, pt(0.4, 0.3, 0.2), 0.1);
    } catch (const NumericError& e) {
        CHECK(e.kind == "NonConvergent");
    }
}

TEST_CASE("scalar fields and their derivatives") {
    forms::Poly p = forms::Poly::var(3, 0) * forms::Poly::var(3, 0);
    ScalarField f = poly_field(p + forms::Poly::var(3, 2));
    DVec x = pt(2, 0, 5);
    CHECK(f.f(x) == doctest::Approx(9.0));
    CHECK(f.df(x, 0) == doctest::Approx(4.0));
    CHECK(f.df(x, 2) == doctest::Approx(1.0));

    ScalarField b = bump_field(3, 0.9);
    CHECK(b.f(pt(0, 0, 0)) == doctest::Approx(1.0));
    CHECK(b.f(pt(0.9, 0, 0)) == 0.0);
    CHECK(b.f(pt(2, 2, 2)) == 0.0);
    // analytic partial matches a central difference inside the support
    DVec y = pt(0.3, -0.2, 0.4);
    double h = 1e-5;
    DVec yp = y, ym = y;
    yp[1] += h;
    ym[1] -= h;
    CHECK(b.df(y, 1) == doctest::Approx((b.f(yp) - b.f(ym)) / (2 * h)).epsilon(1e-5));

    ScalarField prod = product_field(f, b);
    CHECK(prod.f(y) == doctest::Approx(f.f(y) * b.f(y)));
    CHECK(prod.df(y, 0) == doctest::Approx(f.df(y, 0) * b.f(y) + f.f(y) * b.df(y, 0)));
}

TEST_CASE("numeric differential agrees with the exact one on polynomial forms") {
    carnot::GradedLieAlgebra g = carnot::heisenberg();
    forms::ExteriorElement a =
        forms::ExteriorElement::monomial(3, mi({3}), forms::Mono::var(3, 0), la::Rational(1));
    NumericForm na = lift_exterior(a);
    FrameDifferential fd = frame_differential(g);
    DVec x = pt(0.7, -0.3, 0.25);
    PointForm got = numeric_d(fd, na, x);

    // d(x1 theta3) = theta13 - x1 theta12, evaluated at x
    forms::ExteriorElement da = forms::ce_differential(g, a);
    CHECK(got[mi({1, 3})] == doctest::Approx(1.0));
    CHECK(got[mi({1, 2})] == doctest::Approx(-0.7));

    // term-by-term match against the exact differential at a rational point
    la::Vec xr{la::Rational(7, 10), la::Rational(-3, 10), la::Rational(1, 4)};
    std::map<forms::MultiIndex, double> exact;
    for (auto& [key, c] : da.terms) {
        forms::Poly mono = forms::Poly::constant(3, c) * key.second;
        exact[key.first] += mono.eval(xr).to_double();
    }
    for (auto& [J, v] : exact) CHECK(got[J] == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("pointwise pullback and top-degree wedge") {
    PointForm w{{mi({1, 3}), 1.0}};
    DMat a{{2, 0, 0}, {0, 3, 0}, {0, 0, 6}};
    PointForm pw = pansu_pullback(a, 3, w, 2);
    CHECK(pw[mi({1, 3})] == doctest::Approx(12.0));
    CHECK(std::abs(pw.count(mi({1, 2})) ? pw[mi({1, 2})] : 0.0) < 1e-15);

    PointForm t3{{mi({3}), 1.0}};
    PointForm t12{{mi({1, 2}), 1.0}};
    CHECK(wedge_top(3, t3, t12) == doctest::Approx(1.0));
    PointForm t2{{mi({2}), 1.0}};
    PointForm t13{{mi({1, 3}), 1.0}};
    CHECK(wedge_top(3, t2, t13) == doctest::Approx(-1.0));
}

TEST_CASE("formal support of the differential and its weight") {
    carnot::GradedLieAlgebra g = carnot::heisenberg();
    NumericForm a = scale_form(lift_exterior(forms::ExteriorElement::theta(3, mi({3}))),
                               bump_field(3, 0.9));
    auto sup = formal_d_support(g, a);
    CHECK(sup.count(mi({1, 2})) == 1);
    CHECK(sup.count(mi({1, 3})) == 1);
    CHECK(sup.count(mi({2, 3})) == 1);
    CHECK(support_weight_min(g, sup) == 2);
}

TEST_CASE("pullback identity fixtures pass on the small grids") {
    carnot::GradedLieAlgebra g = carnot::heisenberg();
    SmoothMap f = heisenberg_shear("sine");
    PullbackOptions opt;
    opt.grids = {16, 32};
    auto fixtures = heisenberg_pullback_fixtures();
    REQUIRE(fixtures.size() == 3);
    for (auto& [omega, eta] : fixtures) {
        CAPTURE(omega.label);
        CHECK_FALSE(eta.label.empty());
        PullbackReport r = verify_pullback_identity(g, f, omega, eta, opt);
        CHECK(r.weight_ok);
        CHECK(r.residuals[1] < opt.tol);
        CHECK((r.floored || r.order > 1.4));
        CHECK(r.pass);
        CHECK(r.degree == 2);
    }
}

TEST_CASE("graded automorphism baseline is exact to rounding") {
    carnot::GradedLieAlgebra g = carnot::heisenberg();
    DMat a{{2, 0, 0}, {0, 3, 0}, {0, 0, 6}};
    SmoothMap f = map_automorphism(g, a, "a236");
    PullbackOptions opt;
    opt.grids = {16, 32};
    for (auto& [omega, eta] : heisenberg_pullback_fixtures()) {
        PullbackReport r = verify_pullback_identity(g, f, omega, eta, opt);
        CHECK(r.floored);
        CHECK(r.pass);
    }
}

TEST_CASE("a constant-coefficient pair is annihilated pointwise") {
    // theta3 against bump theta3: the integrand of the identity vanishes
    // identically, so both residuals sit at the floor whatever the map does
    carnot::GradedLieAlgebra g = carnot::heisenberg();
    NumericForm omega = lift_exterior(forms::ExteriorElement::theta(3, mi({3})));
    NumericForm eta = scale_form(lift_exterior(forms::ExteriorElement::theta(3, mi({3}))),
                                 bump_field(3, 0.9));
    PullbackOptions opt;
    opt.grids = {16, 32};
    PullbackReport r = verify_pullback_identity(g, heisenberg_shear("sine"), omega, eta, opt);
    CHECK(r.weight_ok);
    CHECK(r.floored);
    CHECK(r.pass);
}

TEST_CASE("weight conditions are enforced") {
    // omega = theta1 has weight 1 and d(eta) reaches down to weight 2, so
    // wt(omega) + wt(d eta) = 3 < nu = 4
    carnot::GradedLieAlgebra g = carnot::heisenberg();
    NumericForm omega = lift_exterior(forms::ExteriorElement::theta(3, mi({1})));
    NumericForm eta = scale_form(lift_exterior(forms::ExteriorElement::theta(3, mi({1}))),
                                 bump_field(3, 0.9));

    PullbackOptions opt;
    opt.grids = {8, 16};
    CHECK_THROWS_AS(verify_pullback_identity(g, heisenberg_shear("sine"), omega, eta, opt),
                    NumericError);
    try {
        verify_pullback_identity(g, heisenberg_shear("sine"), omega, eta, opt);
    } catch (const NumericError& e) {
        CHECK(e.kind == "WeightConditionViolated");
    }

    opt.diagnostic = true;
    PullbackReport r = verify_pullback_identity(g, heisenberg_shear("sine"), omega, eta, opt);
    CHECK_FALSE(r.weight_ok);
    CHECK_FALSE(r.pass);
}

TEST_CASE("pullback preserves form weight for catalog maps") {
    carnot::GradedLieAlgebra g = carnot::heisenberg();
    NumericForm th13 = lift_exterior(forms::ExteriorElement::theta(3, mi({1, 3})));

    WeightSplit shear = pullback_weight_split(heisenberg_shear("sine"), th13, 3, 8, 0.02, true);
    CHECK(shear.on > 0);
    CHECK(shear.off < 1e-8 * shear.on);

    DMat a{{2, 0, 0}, {0, 3, 0}, {0, 0, 6}};
    WeightSplit am = pullback_weight_split(map_automorphism(g, a, "a236"), th13, 3, 8, 0.02, false);
    CHECK(am.on > 0);
    CHECK(am.off < 1e-8 * am.on);
}
