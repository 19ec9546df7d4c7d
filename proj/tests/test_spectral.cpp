#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "rumin/forms.hpp"
#include "rumin/spectral.hpp"

using namespace rumin;
using namespace rumin::spectral;

namespace {

std::map<CellKey, int> nonzero_dims(const Page& pg) {
    std::map<CellKey, int> out;
    for (auto& [k, c] : pg.cells)
        if (c.E.dim() > 0) out[k] = c.E.dim();
    return out;
}

bool page_d_vanishes(const Page& pg) {
    for (auto& [k, m] : pg.d)
        if (!m.is_zero()) return false;
    return true;
}

// d_r of the cell followed by d_r out of its target
bool d_squares_to_zero(const Page& pg, bool homological) {
    for (auto& [k, m] : pg.d) {
        CellKey tgt = homological ? CellKey{k.p - pg.r, k.q + pg.r - 1}
                                  : CellKey{k.p + pg.r, k.q - pg.r + 1};
        la::Matrix next = pg.d_at(tgt);
        if (next.rows() == 0 || m.rows() == 0) continue;
        if (!(next * m).is_zero()) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("heisenberg constant-coefficient pages") {
    forms::ComplexBuild b = forms::build_ce_complex(carnot::heisenberg());
    SpectralResult s = compute_pages(b.wc.fc, 6);

    // E_0 is the associated graded of the weight filtration
    std::map<CellKey, int> e0 = nonzero_dims(s.page(0));
    std::map<CellKey, int> e0_expect = {{{0, 0}, 1}, {{1, 0}, 2}, {{2, -1}, 1},
                                        {{2, 0}, 1},  {{3, -1}, 2}, {{4, -1}, 1}};
    CHECK(e0 == e0_expect);
    // the only nonzero d_0 kills theta3 against theta12
    CHECK(s.page(0).d_at({2, -1}).rank() == 1);

    // E_1 drops the (2, *) column entirely
    std::map<CellKey, int> e1_expect = {{{0, 0}, 1}, {{1, 0}, 2}, {{3, -1}, 2}, {{4, -1}, 1}};
    CHECK(nonzero_dims(s.page(1)) == e1_expect);
    CHECK(s.page(1).dimE({2, -1}) == 0);
    CHECK(s.page(1).dimE({2, 0}) == 0);

    // degeneration at E_1: every later differential vanishes
    for (int r = 1; r <= 6; ++r) CHECK(page_d_vanishes(s.page(r)));

    LimitReport lim = limit_page(s);
    CHECK(lim.r_stab == 1);
    CHECK(lim.matches_graded);
    CHECK(lim.mismatches.empty());
    CHECK(lim.cohomology.betti == std::vector<int>{1, 2, 2, 1});

    // limit dims against the independent cohomology oracle, degree by degree
    for (int k = 0; k <= 3; ++k) {
        int sum = 0;
        for (auto& [key, d] : lim.einf)
            if (key.p + key.q == k) sum += d;
        CHECK(sum == lim.cohomology.betti_at(k));
    }
}

TEST_CASE("polynomial heisenberg model degenerates later") {
    forms::ComplexBuild b = forms::build_polynomial_complex(carnot::heisenberg(), 2);
    SpectralResult s = compute_pages(b.wc.fc, 6);

    CHECK_FALSE(page_d_vanishes(s.page(0)));
    CHECK_FALSE(page_d_vanishes(s.page(1)));

    LimitReport lim = limit_page(s);
    CHECK(lim.r_stab == 3);
    CHECK(lim.matches_graded);
    CHECK(lim.cohomology.betti == std::vector<int>{1, 6, 9, 4});
}

TEST_CASE("abelian complex is stable from the start") {
    forms::ComplexBuild b = forms::build_ce_complex(carnot::abelian(3));
    SpectralResult s = compute_pages(b.wc.fc, 5);
    for (int r = 0; r <= 5; ++r) CHECK(page_d_vanishes(s.page(r)));
    LimitReport lim = limit_page(s);
    CHECK(lim.matches_graded);
    int total = 0;
    for (auto& [key, d] : lim.einf) total += d;
    CHECK(total == 8);  // sum of binomials over all degrees
}

TEST_CASE("trivial filtration collapses to cohomology at E_1") {
    RandomComplexSpec spec;
    spec.degrees = 3;
    spec.max_dim = 5;
    spec.max_weight = 0;  // single filtration step
    filtered::FilteredComplex fc = random_filtered_complex(11, spec);
    SpectralResult s = compute_pages(fc, 3);
    LimitReport lim = limit_page(s);
    CHECK(lim.r_stab <= 1);
    filtered::CohomologyReport h = filtered::total_cohomology(fc);
    for (auto& [key, d] : lim.einf) CHECK(d == h.betti_at(key.p + key.q));
}

TEST_CASE("defining subspaces match the stored cells") {
    RandomComplexSpec spec;
    for (std::uint64_t seed : {3u, 14u}) {
        filtered::FilteredComplex fc = random_filtered_complex(seed, spec);
        SpectralResult s = compute_pages(fc, 4);
        for (int r = 0; r <= 4; ++r)
            for (auto& [k, cell] : s.page(r).cells) {
                CHECK(cell.Z == z_space(fc, k.p, k.q, r));
                CHECK(cell.B == b_space(fc, k.p, k.q, r));
                CHECK(cell.D == d_space(fc, k.p, k.q, r));
                CHECK(cell.E.dim() == la::quotient(cell.Z, cell.D).dim());
            }
    }
}

TEST_CASE("homological pages of a chain complex") {
    forms::ChainModelBuild ch = forms::chain_model(forms::build_ce_complex(carnot::heisenberg()));
    SpectralResult s = compute_pages_homological(ch.wc.fc, 7);
    CHECK(s.homological);
    CHECK(s.fc.orient == filtered::Orient::chain);

    for (int r = 0; r <= 7; ++r) CHECK(d_squares_to_zero(s.page(r), true));

    LimitReport lim = limit_page(s);
    CHECK(lim.matches_graded);
    CHECK(lim.cohomology.betti == std::vector<int>{1, 2, 2, 1});

    // each stored cell agrees with the mirrored defining subspaces
    for (int r = 0; r <= 4; ++r)
        for (auto& [k, cell] : s.page(r).cells) {
            CHECK(cell.Z == z_space(s.fc, k.p, k.q, r));
            CHECK(cell.B == b_space(s.fc, k.p, k.q, r));
            CHECK(cell.D == d_space(s.fc, k.p, k.q, r));
        }
}

TEST_CASE("page isomorphisms witness the homology step") {
    forms::ComplexBuild b = forms::build_polynomial_complex(carnot::heisenberg(), 1);
    SpectralResult s = compute_pages(b.wc.fc, 4);
    REQUIRE(s.isos.size() == 4);
    for (auto& iso : s.isos)
        for (auto& [k, m] : iso.eta) {
            CHECK(m.rows() == m.cols());
            CHECK(m.rank() == m.rows());
            CHECK(m.rows() == s.page(iso.r + 1).dimE(k));
            // eta lands in the homology coordinates of the witness
            auto it = iso.H.find(k);
            REQUIRE(it != iso.H.end());
            CHECK(it->second.dim() == m.rows());
        }
}

TEST_CASE("stabilization needs pages past the filtration width") {
    forms::ComplexBuild b = forms::build_ce_complex(carnot::heisenberg());
    SpectralResult s = compute_pages(b.wc.fc, 1);
    CHECK_THROWS_AS(limit_page(s), SpectralError);
    try {
        limit_page(s);
    } catch (const SpectralError& e) {
        CHECK(e.kind == "NonStabilized");
    }
}

TEST_CASE("seed splitting is deterministic and label-sensitive") {
    CHECK(split_seed(0, "a") == split_seed(0, "a"));
    CHECK(split_seed(0, "a") != split_seed(0, "b"));
    CHECK(split_seed(0, "a") != split_seed(1, "a"));

    RandomComplexSpec spec;
    CHECK(random_filtered_complex(5, spec) == random_filtered_complex(5, spec));
    CHECK_FALSE(random_filtered_complex(5, spec) == random_filtered_complex(6, spec));
}

TEST_CASE("random complexes are valid and graded") {
    RandomComplexSpec spec;
    spec.orient = filtered::Orient::chain;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        filtered::WeightedComplex wc = random_weighted_complex(seed, spec);
        CHECK(filtered::validate_filtered(wc.fc).ok);
        CHECK_FALSE(filtered::check_weighted(wc).has_value());
        CHECK(wc.fc == random_filtered_complex(seed, spec));
    }
}
