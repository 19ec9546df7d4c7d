// Acceptance gate: each check prints exactly one PASS/FAIL line and the gate
// exits nonzero if any fail. Tolerances and time budgets are pinned here, not
// read from flags; every check runs even after an earlier failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rumin/forms.hpp"
#include "rumin/json_io.hpp"
#include "rumin/morphism.hpp"
#include "rumin/numeric.hpp"
#include "rumin/spectral.hpp"

using namespace rumin;
using spectral::CellKey;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        ok = false;
        if (detail.empty()) detail = why;
    }
};

using Check = std::function<void(Outcome&)>;

bool run_check(const std::string& name, double budget_s, const Check& body) {
    Outcome out;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0 && secs > budget_s) {
        out.ok = false;
        out.detail = "over time budget; " + out.detail;
    }
    std::ostringstream line;
    line << (out.ok ? "PASS" : "FAIL") << "  " << std::left << std::setw(34) << name
         << std::right << std::fixed << std::setprecision(2) << std::setw(8) << secs << " s";
    if (budget_s > 0) line << "  (budget " << std::setprecision(0) << budget_s << " s)";
    if (!out.detail.empty()) line << "  " << out.detail;
    std::cout << line.str() << std::endl;
    return out.ok;
}

std::map<CellKey, int> nonzero_dims(const spectral::Page& pg) {
    std::map<CellKey, int> out;
    for (auto& [k, c] : pg.cells)
        if (c.E.dim() > 0) out[k] = c.E.dim();
    return out;
}

bool page_d_vanishes(const spectral::Page& pg) {
    for (auto& [k, m] : pg.d)
        if (!m.is_zero()) return false;
    return true;
}

bool d_squares_to_zero(const spectral::Page& pg, bool homological) {
    for (auto& [k, m] : pg.d) {
        CellKey tgt = homological ? CellKey{k.p - pg.r, k.q + pg.r - 1}
                                  : CellKey{k.p + pg.r, k.q - pg.r + 1};
        la::Matrix next = pg.d_at(tgt);
        if (next.rows() == 0 || m.rows() == 0) continue;
        if (!(next * m).is_zero()) return false;
    }
    return true;
}

// ---- 1: constant-coefficient heisenberg pages ------------------------------

void check_heisenberg_pages(Outcome& out) {
    forms::ComplexBuild b = forms::build_ce_complex(carnot::heisenberg());
    spectral::SpectralResult s = spectral::compute_pages(b.wc.fc, 6);

    const std::map<CellKey, int> e1_expect = {
        {{0, 0}, 1}, {{1, 0}, 2}, {{3, -1}, 2}, {{4, -1}, 1}};
    if (nonzero_dims(s.page(1)) != e1_expect) out.fail("E_1 dimensions deviate");
    if (s.page(1).dimE({2, -1}) != 0 || s.page(1).dimE({2, 0}) != 0)
        out.fail("E_1 column p=2 did not vanish");

    for (int r = 1; r <= 6; ++r)
        if (!page_d_vanishes(s.page(r)))
            out.fail("d_" + std::to_string(r) + " is nonzero");

    // independent oracle: total cohomology of the unfiltered complex
    filtered::CohomologyReport h = filtered::total_cohomology(b.wc.fc);
    if (h.betti != std::vector<int>{1, 2, 2, 1}) out.fail("oracle betti deviate");
    spectral::LimitReport lim = spectral::limit_page(s);
    for (int k = 0; k <= 3; ++k) {
        int sum = 0;
        for (auto& [key, d] : lim.einf)
            if (key.p + key.q == k) sum += d;
        if (sum != h.betti_at(k)) out.fail("limit page misses betti at degree " + std::to_string(k));
    }
    if (!lim.matches_graded) out.fail("limit page diverges from graded cohomology");
    out.detail = "E_1 = gr H, degenerate from r = 1";
}

// ---- 2: polynomial heisenberg model ----------------------------------------

void check_polynomial_model(Outcome& out) {
    forms::ComplexBuild b = forms::build_polynomial_complex(carnot::heisenberg(), 2);
    int total = 0;
    for (int k = 0; k <= 3; ++k) total += b.wc.fc.dim(k);
    if (total != 56 || b.wc.fc.dim(0) != 7 || b.wc.fc.dim(1) != 21)
        out.fail("truncated model dimensions deviate");
    if (!filtered::validate_filtered(b.wc.fc).ok) out.fail("complex fails validation");
    if (filtered::check_weighted(b.wc)) out.fail("grading fails validation");

    spectral::SpectralResult s = spectral::compute_pages(b.wc.fc, 6);
    if (page_d_vanishes(s.page(0))) out.fail("d_0 vanishes identically");
    if (page_d_vanishes(s.page(1))) out.fail("d_1 vanishes identically");

    spectral::LimitReport lim = spectral::limit_page(s);
    if (!lim.matches_graded || !lim.mismatches.empty())
        out.fail("limit page deviates from graded cohomology");
    std::ostringstream d;
    d << "56-dimensional, stable from r = " << lim.r_stab;
    out.detail = d.str();
}

// ---- 3: duality pairing corpus ----------------------------------------------

spectral::RandomComplexSpec corpus_spec() {
    spectral::RandomComplexSpec spec;
    spec.degrees = 3;
    spec.max_dim = 8;
    spec.max_weight = 3;
    spec.orient = filtered::Orient::chain;
    return spec;
}

void check_duality_corpus(Outcome& out) {
    const spectral::RandomComplexSpec spec = corpus_spec();
    int cells = 0;
    for (int i = 0; i < 20; ++i) {
        const std::uint64_t cs = spectral::split_seed(0, "duality/" + std::to_string(i));
        filtered::WeightedComplex wc = spectral::random_weighted_complex(cs, spec);
        if (filtered::check_weighted(wc)) {
            out.fail("case " + std::to_string(i) + ": inconsistent grading");
            return;
        }
        filtered::DualityData dd = filtered::make_duality(wc);
        auto chain_ss = spectral::compute_pages_homological(dd.chain.fc, 5);
        auto dual_ss = spectral::compute_pages(dd.dual, 5);
        // page_pairing verifies both annihilation conditions and nondegeneracy
        // and throws on the first violation
        for (auto& pp : morphism::page_pairing(dual_ss, chain_ss, dd, 5)) {
            if (!pp.well_defined || !pp.nondegenerate)
                out.fail("case " + std::to_string(i) + ": pairing degenerates at r=" +
                         std::to_string(pp.r));
            for (auto& [k, gram] : pp.gram) {
                if (gram.rows() != gram.cols() || gram.rank() != gram.rows())
                    out.fail("case " + std::to_string(i) + ": gram not invertible");
                ++cells;
            }
        }
    }
    out.detail = "20 complexes, " + std::to_string(cells) + " paired cells, pages 0..5";
}

// ---- 4: morphism induction corpus -------------------------------------------

void check_morphism_corpus(Outcome& out) {
    carnot::GradedLieAlgebra g = carnot::heisenberg();
    forms::ComplexBuild src = forms::build_ce_complex(g);
    filtered::DualityData dd =
        filtered::make_duality(forms::chain_model(forms::build_polynomial_complex(g, 1)).wc);
    auto chain_ss = spectral::compute_pages_homological(dd.chain.fc, 5);

    int non_chain = 0;
    for (int i = 0; i < 20; ++i) {
        const std::uint64_t cs = spectral::split_seed(0, "morphism/" + std::to_string(i));
        morphism::SampleResult sr = morphism::sample_constrained_map(src.wc, dd, cs, true);
        if (!sr.map.satisfies_identity) {
            out.fail("case " + std::to_string(i) + ": sampler broke its own constraint");
            return;
        }
        if (!sr.map.is_chain_map) ++non_chain;
        morphism::PageMorphism pm = morphism::induce_morphism(sr.map, 5);
        bool pages_ok =
            std::all_of(pm.chain_map.begin(), pm.chain_map.end(), [](bool v) { return v; });
        if (!pages_ok || pm.first_failure)
            out.fail("case " + std::to_string(i) + ": induction broke");
        morphism::TransportReport tr = morphism::verify_duality_transport(sr.map, pm, chain_ss);
        if (!tr.consistent) out.fail("case " + std::to_string(i) + ": transport inconsistent");
    }
    if (non_chain < 5)
        out.fail("only " + std::to_string(non_chain) + " samples fail the chain rule, need >= 5");

    // negative control: identity-violating map must fail at a definite page
    bool control = false;
    std::array<int, 3> where{};
    for (int t = 0; t < 50 && !control; ++t) {
        const std::uint64_t cs = spectral::split_seed(0, "morphism-control/" + std::to_string(t));
        morphism::SampleResult sr = morphism::sample_constrained_map(src.wc, dd, cs, false);
        if (sr.map.satisfies_identity) continue;
        morphism::IdentityReport idr = morphism::check_identity(sr.map);
        if (idr.holds || !idr.certificate || idr.certificate->value.is_zero()) continue;
        morphism::PageMorphism pm = morphism::induce_morphism(sr.map, 5);
        bool pages_ok =
            std::all_of(pm.chain_map.begin(), pm.chain_map.end(), [](bool v) { return v; });
        if (!pages_ok && pm.first_failure) {
            control = true;
            where = *pm.first_failure;
        }
    }
    if (!control) {
        out.fail("no certified control failure found");
        return;
    }
    std::ostringstream d;
    d << "20/20 induced, " << non_chain << " non-chain samples, control breaks at r="
      << where[0] << " (p=" << where[1] << ", q=" << where[2] << ")";
    out.detail = d.str();
}

// ---- 5: wedge-pairing dichotomy ---------------------------------------------

void check_wedge_dichotomy(Outcome& out) {
    for (carnot::GradedLieAlgebra g : {carnot::heisenberg(), carnot::engel()}) {
        forms::ComplexBuild b = forms::build_ce_complex(g);
        const int n = g.n, nu = b.nu;
        for (int k = 0; k <= n; ++k) {
            for (auto& [J, mJ] : b.dict.basis[size_t(k)]) {
                forms::ExteriorElement a = forms::ExteriorElement::theta(n, J);
                const int p = J.weight(g);
                bool partner = false;
                for (auto& [K, mK] : b.dict.basis[size_t(n - k)]) {
                    forms::ExteriorElement c = forms::ExteriorElement::theta(n, K);
                    la::Rational pr = forms::wedge_pairing(g, a, c);
                    const int w = K.weight(g);
                    // annihilation on the high-weight side of the filtration
                    if (w >= nu - p + 1 && !pr.is_zero())
                        out.fail(g.name + ": " + J.str() + " pairs with " + K.str() +
                                 " above the complementary weight");
                    if (w == nu - p && !pr.is_zero()) partner = true;
                }
                if (!partner)
                    out.fail(g.name + ": " + J.str() + " has no complementary-weight partner");
            }
        }
    }
    out.detail = "exhaustive over both catalogs' exterior bases";
}

// ---- 6: numeric pullback identity -------------------------------------------

void check_numeric_pullback(Outcome& out) {
    carnot::GradedLieAlgebra g = carnot::heisenberg();
    numeric::PullbackOptions opt;  // grids 32/64, h_p 0.02, tol 1e-3, order 2 +- 0.5
    numeric::SmoothMap probe = numeric::heisenberg_shear("sine");
    numeric::SmoothMap poly = numeric::heisenberg_shear("square");
    numeric::SmoothMap base = numeric::map_automorphism(
        g, {{2, 0, 0}, {0, 3, 0}, {0, 0, 6}}, "automorphism-2-3-6");

    auto fixtures = numeric::heisenberg_pullback_fixtures();
    if (fixtures.size() < 3) out.fail("fixture set too small");
    double worst_res = 0, worst_order_dev = 0;
    for (size_t i = 0; i < fixtures.size(); ++i) {
        const auto& [omega, eta] = fixtures[i];
        numeric::PullbackReport rep = numeric::verify_pullback_identity(g, probe, omega, eta, opt);
        numeric::PullbackReport pol = numeric::verify_pullback_identity(g, poly, omega, eta, opt);
        numeric::PullbackReport bas = numeric::verify_pullback_identity(g, base, omega, eta, opt);
        const std::string tag = "fixture " + std::to_string(i);

        if (!rep.weight_ok || !pol.weight_ok || !bas.weight_ok)
            out.fail(tag + ": weight admissibility lost");
        if (rep.residuals[1] >= opt.tol) out.fail(tag + ": fine residual above 1e-3");
        if (!rep.floored && std::abs(rep.order - opt.nominal_order) > opt.order_window)
            out.fail(tag + ": decay order outside 2 +- 0.5");
        if (!rep.pass) out.fail(tag + ": probe report not passing");
        if (!pol.pass) out.fail(tag + ": polynomial-profile report not passing");
        if (!bas.pass) out.fail(tag + ": baseline report not passing");
        // the exactly-differentiable baseline must sit at least 10x lower
        if (!(bas.residuals[1] * 10 <= rep.residuals[1]))
            out.fail(tag + ": baseline closer than 10x to the probe");

        worst_res = std::max(worst_res, rep.residuals[1]);
        if (!rep.floored)
            worst_order_dev = std::max(worst_order_dev, std::abs(rep.order - opt.nominal_order));
    }
    std::ostringstream d;
    d << "worst fine residual " << std::scientific << std::setprecision(2) << worst_res
      << ", worst |order - 2| = " << std::fixed << std::setprecision(2) << worst_order_dev;
    out.detail = d.str();
}

// ---- 7: engine self-consistency ----------------------------------------------

void check_engine_consistency(Outcome& out) {
    const spectral::RandomComplexSpec spec = corpus_spec();
    int pages = 0;
    for (int i = 0; i < 20; ++i) {
        const std::uint64_t cs = spectral::split_seed(0, "duality/" + std::to_string(i));
        filtered::WeightedComplex wc = spectral::random_weighted_complex(cs, spec);
        filtered::DualityData dd = filtered::make_duality(wc);

        const spectral::SpectralResult results[2] = {
            spectral::compute_pages_homological(dd.chain.fc, 5),
            spectral::compute_pages(dd.dual, 5)};
        for (const auto& s : results) {
            for (int r = 0; r <= s.r_max(); ++r, ++pages) {
                const spectral::Page& pg = s.page(r);
                if (!d_squares_to_zero(pg, s.homological))
                    out.fail("case " + std::to_string(i) + ": d_r^2 != 0 at r=" +
                             std::to_string(r));
                // b_space evaluates both readings of B and throws if they split
                for (auto& [k, cell] : pg.cells)
                    if (!(cell.B == spectral::b_space(s.fc, k.p, k.q, r)))
                        out.fail("case " + std::to_string(i) + ": stored B deviates");
            }
            for (const auto& iso : s.isos)
                for (auto& [k, m] : iso.eta)
                    if (m.rows() != m.cols() || m.rank() != m.rows())
                        out.fail("case " + std::to_string(i) + ": eta_" +
                                 std::to_string(iso.r + 1) + " not invertible");
        }
    }
    out.detail = "20 chain/dual pairs, " + std::to_string(pages) + " pages audited";
}

}  // namespace

int main() {
    std::cout << "acceptance gate\n";
    int failures = 0;
    failures += !run_check("heisenberg-ce-pages", 1.0, check_heisenberg_pages);
    failures += !run_check("polynomial-model-degeneration", 10.0, check_polynomial_model);
    failures += !run_check("duality-pairing-corpus", 60.0, check_duality_corpus);
    failures += !run_check("morphism-induction-corpus", 120.0, check_morphism_corpus);
    failures += !run_check("wedge-pairing-dichotomy", 5.0, check_wedge_dichotomy);
    failures += !run_check("numeric-pullback-identity", 120.0, check_numeric_pullback);
    failures += !run_check("engine-self-consistency", 0.0, check_engine_consistency);
    if (failures) {
        std::cout << failures << " check(s) failed\n";
        return 1;
    }
    std::cout << "all checks passed\n";
    return 0;
}
