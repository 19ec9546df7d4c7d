#include "doctest.h"
#include "helpers.hpp"
#include "rumin/filtered.hpp"
#include "rumin/forms.hpp"

using namespace rumin;
using namespace rumin::filtered;
using la::Matrix;
using la::Rational;
using la::Subspace;
using testutil::M;
using testutil::V;

namespace {

// two-step cochain complex 0 -> Q^2 -d-> Q^2 -> 0 with d = e1* tensor e2,
// filtered by F^0 = all, F^1 = span{e2}, a subcomplex since d lands on e2
FilteredComplex tiny(Matrix d = M({{0, 0}, {1, 0}})) {
    std::vector<std::vector<Subspace>> steps(2);
    for (int k = 0; k < 2; ++k)
        steps[size_t(k)] = {Subspace::full(2), Subspace::span(2, {V({0, 1})})};
    return FilteredComplex::make(Orient::cochain, 0, {2, 2}, {d}, 0, steps);
}

}  // namespace

TEST_CASE("filtration conventions outside the stored window") {
    FilteredComplex fc = tiny();
    CHECK(fc.p_min() == 0);
    CHECK(fc.p_max() == 1);
    CHECK(fc.filtration(0, -5) == Subspace::full(2));   // cochain: full below
    CHECK(fc.filtration(0, 7).dim() == 0);              // zero above
    CHECK(fc.filtration(5, 0).dim() == 0);              // outside degree range
    CHECK(fc.d_from(1).rows() == 0);                    // top differential is zero-shaped
    CHECK(validate_filtered(fc).ok);
}

TEST_CASE("validation flags each failure mode") {
    // d^2 != 0
    std::vector<std::vector<Subspace>> steps(3, {Subspace::full(1)});
    FilteredComplex sq = FilteredComplex::make(
        Orient::cochain, 0, {1, 1, 1}, {M({{1}}), M({{1}})}, 0, steps);
    auto v = validate_filtered(sq);
    CHECK_FALSE(v.ok);
    REQUIRE_FALSE(v.violations.empty());
    CHECK(v.violations[0].kind == "D2Violation");

    // steps not nested
    std::vector<std::vector<Subspace>> bad(1);
    bad[0] = {Subspace::span(2, {V({1, 0})}), Subspace::span(2, {V({0, 1})})};
    FilteredComplex nest = FilteredComplex::make(Orient::cochain, 0, {2}, {}, 0, bad);
    auto nv = validate_filtered(nest);
    CHECK_FALSE(nv.ok);
    CHECK(nv.violations[0].kind == "NestingViolation");

    // d leaves the filtration: d e2 = e1 but F^1 = span{e2}
    auto sv = validate_filtered(tiny(M({{0, 1}, {0, 0}})));
    CHECK_FALSE(sv.ok);
    CHECK(sv.violations[0].kind == "SubcomplexViolation");
}

TEST_CASE("dual complex reverses arrows and annihilates the filtration") {
    forms::ComplexBuild co = forms::build_ce_complex(carnot::heisenberg());
    forms::ChainModelBuild ch = forms::chain_model(co);
    const FilteredComplex& chain = ch.wc.fc;
    FilteredComplex dual = dualize(chain);

    CHECK(dual.orient == Orient::cochain);
    for (int j = 0; j <= 3; ++j) CHECK(dual.dim(j) == chain.dim(j));

    // dual differential is the transpose of the boundary entering the degree
    for (int j = 0; j < 3; ++j) CHECK(dual.d_from(j) == chain.d_from(j + 1).transpose());

    // F^p(dual_j) = ann(F_{p-1}(chain_j)): spot values plus the general law
    CHECK(chain.filtration(1, 1).dim() == 2);
    CHECK(dual.filtration(1, 2).dim() == 1);
    for (int j = 0; j <= 3; ++j)
        for (int p = dual.p_min() - 1; p <= dual.p_max() + 1; ++p)
            CHECK(dual.filtration(j, p) == la::annihilator(chain.filtration(j, p - 1)));

    CHECK(validate_filtered(dual).ok);
    // the double dual restores the chain datum on the nose
    CHECK(dualize(dual) == chain);
}

TEST_CASE("weighted grading matches the threshold filtration") {
    forms::ComplexBuild co = forms::build_ce_complex(carnot::heisenberg());
    CHECK_FALSE(check_weighted(co.wc).has_value());
    CHECK(co.wc.top_weight() == 4);
    CHECK(co.wc.weight_piece(2, 3).dim() == 2);
    CHECK(co.wc.weight_piece(2, 2).dim() == 1);
    CHECK(co.wc.weight_piece(2, 1).dim() == 0);
    CHECK(co.wc.weight_ge(2, 3) == co.wc.fc.filtration(2, 3));

    // tampering with the filtration breaks the cross-check
    WeightedComplex broken = co.wc;
    broken.grading[2].pop_back();
    CHECK(check_weighted(broken).has_value());
}

TEST_CASE("duality data pairs chain and dual coordinates") {
    forms::ChainModelBuild ch = forms::chain_model(forms::build_ce_complex(carnot::heisenberg()));
    DualityData dd = make_duality(ch.wc);
    CHECK(dd.dual == dualize(ch.wc.fc));
    CHECK(dd.chain.fc == ch.wc.fc);

    // <d^ a, c> = <a, bd c> for all basis pairs, per degree
    for (int j = 0; j < 3; ++j) {
        Matrix dj = dd.dual.d_from(j);
        Matrix bj = dd.chain.fc.d_from(j + 1);
        CHECK(dj == bj.transpose());
    }
}

TEST_CASE("total cohomology of the heisenberg complexes") {
    forms::ComplexBuild co = forms::build_ce_complex(carnot::heisenberg());
    CohomologyReport r = total_cohomology(co.wc.fc);
    CHECK(r.betti == std::vector<int>{1, 2, 2, 1});

    // the filtered pieces of H^1: classes of theta1, theta2 have weight 1
    CHECK(r.betti_at(1) == 2);
    CHECK(r.graded_at(1, 1) == 2);
    CHECK(r.graded_at(1, 2) == 0);

    // chain model has the same numbers in mirrored degrees
    forms::ChainModelBuild ch = forms::chain_model(co);
    CohomologyReport h = total_cohomology(ch.wc.fc);
    CHECK(h.betti == std::vector<int>{1, 2, 2, 1});

    // graded dims sum to betti in every degree
    for (int k = 0; k <= 3; ++k) {
        int s = 0;
        for (auto& [kp, dim] : r.graded_dim)
            if (kp.first == k) s += dim;
        CHECK(s == r.betti_at(k));
    }
}

TEST_CASE("abelian complex has zero differential and full betti") {
    forms::ComplexBuild co = forms::build_ce_complex(carnot::abelian(3));
    for (int k = 0; k < 3; ++k) CHECK(co.wc.fc.d_from(k).is_zero());
    CohomologyReport r = total_cohomology(co.wc.fc);
    CHECK(r.betti == std::vector<int>{1, 3, 3, 1});
}
