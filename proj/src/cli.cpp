#include "rumin/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rumin/forms.hpp"
#include "rumin/json_io.hpp"
#include "rumin/morphism.hpp"
#include "rumin/numeric.hpp"
#include "rumin/spectral.hpp"

namespace rumin::cli {

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kFailed = 2;
constexpr int kMalformed = 64;

struct Common {
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "text";
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "base seed for all randomness")
        ->envname("SPECTRAL_RUMIN_SEED");
    sub->add_option("--out", c.out, "also write the report to this file");
    sub->add_option("--format", c.format, "report format")
        ->check(CLI::IsMember({"json", "text"}));
}

// stdout always; --out gets the identical bytes.
int emit(const Common& c, const std::string& body, int code) {
    std::cout << body;
    if (!c.out.empty()) {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write " << c.out << "\n";
            return kMalformed;
        }
        f << body;
    }
    return code;
}

// ---- ss text rendering -----------------------------------------------------

std::string render_page_grid(const spectral::Page& pg) {
    std::ostringstream os;
    int pmin = 0, pmax = 0, qmin = 0, qmax = 0;
    bool any = false;
    for (const auto& [key, cell] : pg.cells) {
        if (cell.E.dim() == 0) continue;
        if (!any) {
            pmin = pmax = key.p;
            qmin = qmax = key.q;
            any = true;
        }
        pmin = std::min(pmin, key.p);
        pmax = std::max(pmax, key.p);
        qmin = std::min(qmin, key.q);
        qmax = std::max(qmax, key.q);
    }
    os << "page r=" << pg.r << "\n";
    if (!any) {
        os << "  (zero)\n";
        return os.str();
    }
    auto cell_text = [&](int p, int q) -> std::string {
        const spectral::Cell* c = pg.find({p, q});
        if (!c || c->E.dim() == 0) return ".";
        return std::to_string(c->E.dim()) + "[" + std::to_string(pg.d_at({p, q}).rank()) + "]";
    };
    size_t w = 4;
    for (int p = pmin; p <= pmax; ++p) {
        w = std::max(w, std::string("p=" + std::to_string(p)).size());
        for (int q = qmin; q <= qmax; ++q) w = std::max(w, cell_text(p, q).size());
    }
    w += 2;
    auto pad = [&](const std::string& s) {
        return std::string(w > s.size() ? w - s.size() : 1, ' ') + s;
    };
    size_t rowlab = std::string("q=" + std::to_string(qmin)).size();
    rowlab = std::max(rowlab, std::string("q=" + std::to_string(qmax)).size()) + 2;
    auto rpad = [&](const std::string& s) {
        return std::string(rowlab > s.size() ? rowlab - s.size() : 1, ' ') + s;
    };
    os << rpad("");
    for (int p = pmin; p <= pmax; ++p) os << pad("p=" + std::to_string(p));
    os << "\n";
    for (int q = qmax; q >= qmin; --q) {
        os << rpad("q=" + std::to_string(q));
        for (int p = pmin; p <= pmax; ++p) os << pad(cell_text(p, q));
        os << "\n";
    }
    return os.str();
}

std::string render_ss_text(const spectral::SpectralResult& s, const spectral::LimitReport& lim,
                           const io::ReportMeta& meta) {
    std::ostringstream os;
    os << "group " << meta.group << ", model " << meta.model;
    if (meta.poly_weight >= 0) os << " D=" << meta.poly_weight;
    os << ", seed " << meta.seed << ", pages 0.." << meta.max_page << "\n";
    for (const auto& pg : s.pages) os << render_page_grid(pg);
    os << "stable from r=" << lim.r_stab << "\n";
    if (lim.matches_graded) {
        os << "E_inf vs graded cohomology: match\n";
    } else {
        os << "E_inf vs graded cohomology: MISMATCH\n";
        for (const auto& m : lim.mismatches)
            os << "  at (p=" << m[0] << ", q=" << m[1] << "): dim E_inf=" << m[2]
               << ", dim gr H=" << m[3] << "\n";
    }
    os << "betti (from degree " << lim.cohomology.k_min << "):";
    for (int b : lim.cohomology.betti) os << " " << b;
    os << "\n";
    return os.str();
}

// ---- group-validate ----------------------------------------------------------

int cmd_group_validate(const std::string& path, const Common& c) {
    const io::GroupLoad gl = io::load_group_file(path);
    if (gl.malformed) {
        std::cerr << "malformed group input: " << gl.error << "\n";
        return kMalformed;
    }
    const auto& v = gl.validation;
    if (c.format == "json") {
        io::Json j;
        j["kind"] = "group-validate";
        j["seed"] = c.seed;
        j["group"] = v.algebra.name;
        j["ok"] = v.ok;
        io::Json viol = io::Json::array();
        for (const auto& x : v.violations) {
            io::Json e;
            e["kind"] = x.kind;
            e["i"] = x.i;
            e["j"] = x.j;
            e["k"] = x.k;
            e["detail"] = x.detail;
            viol.push_back(std::move(e));
        }
        j["violations"] = std::move(viol);
        return emit(c, io::dump(j), v.ok ? kOk : kInvalid);
    }
    std::ostringstream os;
    if (v.ok) {
        os << "group " << v.algebra.name << ": valid (n=" << v.algebra.n << ", layers";
        for (int m : v.algebra.layers) os << " " << m;
        os << ")\n";
        return emit(c, os.str(), kOk);
    }
    os << "group: invalid\n";
    for (const auto& x : v.violations) {
        os << "  " << x.kind << " (i=" << x.i + 1 << ", j=" << x.j + 1 << ", k=" << x.k + 1 << ")";
        if (!x.detail.empty()) os << ": " << x.detail;
        os << "\n";
    }
    return emit(c, os.str(), kInvalid);
}

// ---- ss -------------------------------------------------------------------------

int cmd_ss(const std::string& path, const std::string& model, int poly_weight, int max_page,
           const Common& c) {
    const io::GroupLoad gl = io::load_group_file(path);
    if (gl.malformed) {
        std::cerr << "malformed group input: " << gl.error << "\n";
        return kMalformed;
    }
    if (!gl.validation.ok) {
        std::cerr << "group is not a valid stratified algebra; run group-validate\n";
        return kInvalid;
    }
    const auto& g = gl.validation.algebra;
    try {
        const forms::ComplexBuild build =
            model == "ce" ? forms::build_ce_complex(g) : forms::build_polynomial_complex(g, poly_weight);
        const auto cv = filtered::validate_filtered(build.wc.fc);
        if (!cv.ok) {
            std::cerr << "internal invariant failure: built complex is invalid\n";
            return kFailed;
        }
        if (auto err = filtered::check_weighted(build.wc)) {
            std::cerr << "internal invariant failure: " << *err << "\n";
            return kFailed;
        }
        const spectral::SpectralResult ss = spectral::compute_pages(build.wc.fc, max_page);
        const spectral::LimitReport lim = spectral::limit_page(ss);
        io::ReportMeta meta;
        meta.group = g.name;
        meta.model = build.model;
        meta.poly_weight = model == "poly" ? poly_weight : -1;
        meta.seed = c.seed;
        meta.max_page = max_page;
        const std::string body = c.format == "json"
                                     ? io::dump(io::spectral_report(ss, lim, meta))
                                     : render_ss_text(ss, lim, meta);
        return emit(c, body, lim.matches_graded ? kOk : kFailed);
    } catch (const spectral::SpectralError& e) {
        std::cerr << "engine invariant failure (" << e.kind << "): " << e.what() << "\n";
        return kFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
}

// ---- verify suites ------------------------------------------------------------------

int cmd_verify_duality(int cases, int max_page, const Common& c) {
    spectral::RandomComplexSpec spec;
    spec.degrees = 3;
    spec.max_dim = 8;
    spec.max_weight = 3;
    spec.orient = filtered::Orient::chain;
    std::ostringstream os;
    io::Json cases_j = io::Json::array();
    for (int i = 0; i < cases; ++i) {
        const std::uint64_t cs = spectral::split_seed(c.seed, "duality/" + std::to_string(i));
        try {
            const filtered::WeightedComplex wc = spectral::random_weighted_complex(cs, spec);
            if (auto err = filtered::check_weighted(wc))
                throw morphism::MorphismError("SamplerInconsistency", *err);
            const filtered::DualityData dd = filtered::make_duality(wc);
            const auto chain_ss = spectral::compute_pages_homological(dd.chain.fc, max_page);
            const auto dual_ss = spectral::compute_pages(dd.dual, max_page);
            const auto pairings = morphism::page_pairing(dual_ss, chain_ss, dd, max_page);
            int cells = 0;
            for (const auto& pp : pairings) cells += int(pp.gram.size());
            os << "case " << i << " seed=" << cs << ": pairing nondegenerate on " << cells
               << " cells across pages 0.." << max_page << "\n";
            io::Json cj;
            cj["case"] = i;
            cj["seed"] = cs;
            cj["ok"] = true;
            cj["cells"] = cells;
            cases_j.push_back(std::move(cj));
        } catch (const std::exception& e) {
            os << "case " << i << " seed=" << cs << ": FAIL " << e.what() << "\n";
            io::Json j;
            j["kind"] = "verify";
            j["suite"] = "duality";
            j["seed"] = c.seed;
            j["ok"] = false;
            j["first_failure"] = io::Json{{"case", i}, {"seed", cs}, {"error", e.what()}};
            const std::string body = c.format == "json" ? io::dump(j) : os.str();
            return emit(c, body, kFailed);
        }
    }
    os << "duality: " << cases << "/" << cases << " cases pass\n";
    if (c.format == "json") {
        io::Json j;
        j["kind"] = "verify";
        j["suite"] = "duality";
        j["seed"] = c.seed;
        j["cases"] = cases;
        j["max_page"] = max_page;
        j["ok"] = true;
        j["results"] = std::move(cases_j);
        return emit(c, io::dump(j), kOk);
    }
    return emit(c, os.str(), kOk);
}

int cmd_verify_morphism(int cases, int max_page, const Common& c) {
    const auto g = carnot::heisenberg();
    const forms::ComplexBuild src = forms::build_ce_complex(g);
    const forms::ChainModelBuild tgt = forms::chain_model(forms::build_polynomial_complex(g, 1));
    const filtered::DualityData dd = filtered::make_duality(tgt.wc);
    const auto chain_ss = spectral::compute_pages_homological(dd.chain.fc, max_page);
    std::ostringstream os;
    io::Json cases_j = io::Json::array();
    auto fail = [&](int i, std::uint64_t cs, const std::string& what,
                    const io::Json& extra) -> int {
        os << "case " << i << " seed=" << cs << ": FAIL " << what << "\n";
        io::Json j;
        j["kind"] = "verify";
        j["suite"] = "morphism";
        j["seed"] = c.seed;
        j["ok"] = false;
        j["first_failure"] = io::Json{{"case", i}, {"seed", cs}, {"error", what}};
        if (!extra.is_null()) j["certificate"] = extra;
        const std::string body = c.format == "json" ? io::dump(j) : os.str();
        return emit(c, body, kFailed);
    };
    for (int i = 0; i < cases; ++i) {
        const std::uint64_t cs = spectral::split_seed(c.seed, "morphism/" + std::to_string(i));
        try {
            const morphism::SampleResult sr = morphism::sample_constrained_map(src.wc, dd, cs, true);
            const morphism::PageMorphism pm = morphism::induce_morphism(sr.map, max_page);
            const morphism::IdentityReport idr = morphism::check_identity(sr.map);
            const morphism::TransportReport tr =
                morphism::verify_duality_transport(sr.map, pm, chain_ss);
            const bool pages_ok =
                std::all_of(pm.chain_map.begin(), pm.chain_map.end(), [](bool b) { return b; });
            if (!idr.holds || !pages_ok || !tr.consistent)
                return fail(i, cs, "identity-constrained sample broke the induction",
                            io::morphism_report(pm, idr, cs));
            os << "case " << i << " seed=" << cs << ": chain map on every page 0.." << max_page
               << ", transport consistent\n";
            io::Json cj;
            cj["case"] = i;
            cj["seed"] = cs;
            cj["ok"] = true;
            cj["solution_dim"] = sr.solution_dim;
            cases_j.push_back(std::move(cj));
        } catch (const std::exception& e) {
            return fail(i, cs, e.what(), io::Json());
        }
    }
    // negative control: filtration-preserving but unconstrained by the
    // identity; it must fail at a definite page with a certificate
    bool control_failed_definitely = false;
    io::Json control;
    for (int t = 0; t < 50 && !control_failed_definitely; ++t) {
        const std::uint64_t cs = spectral::split_seed(c.seed, "morphism-control/" + std::to_string(t));
        try {
            const morphism::SampleResult sr = morphism::sample_constrained_map(src.wc, dd, cs, false);
            if (sr.map.satisfies_identity) continue;  // accidentally fine; next control seed
            const morphism::PageMorphism pm = morphism::induce_morphism(sr.map, max_page);
            const morphism::IdentityReport idr = morphism::check_identity(sr.map);
            const bool pages_ok =
                std::all_of(pm.chain_map.begin(), pm.chain_map.end(), [](bool b) { return b; });
            if (!pages_ok && pm.first_failure) {
                control_failed_definitely = true;
                control = io::morphism_report(pm, idr, cs);
                os << "control seed=" << cs << ": breaks at page r=" << (*pm.first_failure)[0]
                   << " cell (p=" << (*pm.first_failure)[1] << ", q=" << (*pm.first_failure)[2]
                   << ") as expected\n";
            }
        } catch (const std::exception&) {
            continue;  // e.g. the sampler only found maps that stay chain maps
        }
    }
    if (!control_failed_definitely)
        return fail(-1, c.seed, "no identity-violating control failed at a definite page",
                    io::Json());
    os << "morphism: " << cases << "/" << cases << " cases pass, control fails as expected\n";
    if (c.format == "json") {
        io::Json j;
        j["kind"] = "verify";
        j["suite"] = "morphism";
        j["seed"] = c.seed;
        j["cases"] = cases;
        j["max_page"] = max_page;
        j["ok"] = true;
        j["results"] = std::move(cases_j);
        j["negative_control"] = std::move(control);
        return emit(c, io::dump(j), kOk);
    }
    return emit(c, os.str(), kOk);
}

int cmd_verify_pullback(double tol, const Common& c) {
    const auto g = carnot::heisenberg();
    numeric::PullbackOptions opt;
    opt.tol = tol;
    // The sine shear is the map under test: its differential only exists by
    // finite differences, so its residual carries a genuine h^2 signal and
    // must sit a decade above the exactly-differentiable baseline. The square
    // shear (polynomial profile, finite differences exact) just has to pass.
    const numeric::SmoothMap probe = numeric::heisenberg_shear("sine");
    const numeric::SmoothMap poly = numeric::heisenberg_shear("square");
    const numeric::SmoothMap base = numeric::map_automorphism(
        g, {{2, 0, 0}, {0, 3, 0}, {0, 0, 6}}, "automorphism-2-3-6");
    const auto fixtures = numeric::heisenberg_pullback_fixtures();
    std::ostringstream os;
    io::Json cases_j = io::Json::array();
    bool ok = true;
    io::Json first_fail;
    for (const auto& [omega, eta] : fixtures) {
        const numeric::PullbackReport rep = numeric::verify_pullback_identity(g, probe, omega, eta, opt);
        const numeric::PullbackReport pol = numeric::verify_pullback_identity(g, poly, omega, eta, opt);
        const numeric::PullbackReport bas = numeric::verify_pullback_identity(g, base, omega, eta, opt);
        const bool sep = bas.residuals[1] * 10.0 <= rep.residuals[1];
        const bool order_tight = std::abs(rep.order - opt.nominal_order) <= opt.order_window;
        const bool case_ok = rep.pass && order_tight && sep && pol.pass && bas.pass;
        os << probe.id << "  eta=" << eta.label << ": residuals " << rep.residuals[0] << " -> "
           << rep.residuals[1] << ", order " << rep.order << ", baseline " << bas.residuals[1]
           << ", poly profile " << pol.residuals[1] << (case_ok ? "  ok" : "  FAIL") << "\n";
        io::Json cj = io::numeric_report(rep, c.seed);
        cj["baseline_residual"] = bas.residuals[1];
        cj["baseline_separated"] = sep;
        cj["order_within_window"] = order_tight;
        cj["poly_profile_pass"] = pol.pass;
        if (!case_ok && ok) {
            ok = false;
            first_fail = cj;
        }
        cases_j.push_back(std::move(cj));
    }
    os << (ok ? "pullback: all fixtures pass\n" : "pullback: FAIL\n");
    if (c.format == "json") {
        io::Json j;
        j["kind"] = "verify";
        j["suite"] = "pullback";
        j["seed"] = c.seed;
        j["tol"] = opt.tol;
        j["ok"] = ok;
        j["results"] = std::move(cases_j);
        if (!ok) j["first_failure"] = std::move(first_fail);
        return emit(c, io::dump(j), ok ? kOk : kFailed);
    }
    return emit(c, os.str(), ok ? kOk : kFailed);
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Rumin weight filtrations, spectral sequences, and duality checks on nilpotent group models"};
    app.require_subcommand(1);

    Common cgv, css, cver;
    std::string gv_group, ss_group, ss_model = "ce", suite;
    int ss_poly_weight = 2, ss_max_page = 6;
    int ver_cases = 20, ver_max_page = 5;
    double ver_tol = 1e-3;

    CLI::App* gv = app.add_subcommand("group-validate", "validate a stratified algebra file");
    gv->add_option("--group", gv_group, "group JSON file")->required();
    add_common(gv, cgv);

    CLI::App* ss = app.add_subcommand("ss", "spectral sequence of a de Rham model");
    ss->add_option("--group", ss_group, "group JSON file")->required();
    ss->add_option("--model", ss_model, "complex model")->check(CLI::IsMember({"ce", "poly"}));
    ss->add_option("--poly-weight", ss_poly_weight, "polynomial weight bound for --model poly");
    ss->add_option("--max-page", ss_max_page, "compute pages 0..R");
    add_common(ss, css);

    CLI::App* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("--suite", suite, "duality | morphism | pullback")
        ->required()
        ->check(CLI::IsMember({"duality", "morphism", "pullback"}));
    ver->add_option("--cases", ver_cases, "number of seeded cases");
    ver->add_option("--max-page", ver_max_page, "pages to verify");
    ver->add_option("--tol", ver_tol, "numeric tolerance (pullback suite)");
    add_common(ver, cver);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kMalformed;
    }

    try {
        if (gv->parsed()) return cmd_group_validate(gv_group, cgv);
        if (ss->parsed()) return cmd_ss(ss_group, ss_model, ss_poly_weight, ss_max_page, css);
        if (ver->parsed()) {
            if (suite == "duality") return cmd_verify_duality(ver_cases, ver_max_page, cver);
            if (suite == "morphism") return cmd_verify_morphism(ver_cases, ver_max_page, cver);
            return cmd_verify_pullback(ver_tol, cver);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kMalformed;
}

}  // namespace rumin::cli
