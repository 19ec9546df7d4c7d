#include "rumin/morphism.hpp"

#include <algorithm>

namespace rumin::morphism {

using filtered::FilteredComplex;
using filtered::Orient;
using la::Matrix;
using la::Rational;
using la::Subspace;
using la::Vec;
using spectral::CellKey;

la::Matrix FilteredMap::at(int k) const {
    auto it = f.find(k);
    if (it != f.end()) return it->second;
    return Matrix(target.chain.fc.dim(k), source.fc.dim(k));
}

MapValidation validate_filtered_map(const FilteredMap& fm) {
    MapValidation out;
    const FilteredComplex& src = fm.source.fc;
    const FilteredComplex& ch = fm.target.chain.fc;
    for (const auto& [k, m] : fm.f)
        if (m.rows() != ch.dim(k) || m.cols() != src.dim(k)) {
            out.violations.push_back({"ShapeMismatch", k, 0,
                                      "expected " + std::to_string(ch.dim(k)) + "x" +
                                          std::to_string(src.dim(k))});
        }
    if (!out.violations.empty()) {
        out.ok = false;
        return out;
    }
    // f(F'^p) in ann F_{p-1}: every F'^p basis vector pairs to zero with every
    // F_{p-1} chain basis vector
    int plo = std::min(src.p_min(), ch.p_min() + 1);
    int phi = std::max(src.p_max(), ch.p_max()) + 1;
    for (int k = src.k_min(); k <= src.k_max(); ++k) {
        if (ch.dim(k) == 0) continue;
        Matrix fk = fm.at(k);
        for (int p = plo; p <= phi; ++p) {
            const Subspace sp = src.filtration(k, p);
            const Subspace low = ch.filtration(k, p - 1);
            bool bad = false;
            for (int i = 0; i < sp.dim() && !bad; ++i) {
                Vec img = fk.apply(sp.basis_vec(i));
                for (int j = 0; j < low.dim() && !bad; ++j)
                    if (!la::dot(img, low.basis_vec(j)).is_zero()) bad = true;
            }
            if (bad)
                out.violations.push_back(
                    {"FiltrationViolation", k, p, "f(F^p) escapes the annihilator of F_{p-1}"});
        }
    }
    out.ok = out.violations.empty();
    return out;
}

namespace {

// Dual differential on dual^k coordinates is the transposed boundary.
Matrix dual_d(const filtered::DualityData& t, int k) {
    return t.chain.fc.d_from(k + 1).transpose();
}

}  // namespace

bool chain_map_holds(const FilteredMap& fm) {
    const FilteredComplex& src = fm.source.fc;
    const FilteredComplex& ch = fm.target.chain.fc;
    int klo = std::min(src.k_min(), ch.k_min());
    int khi = std::max(src.k_max(), ch.k_max());
    for (int k = klo; k <= khi; ++k)
        if (!(fm.at(k + 1) * src.d_from(k) - dual_d(fm.target, k) * fm.at(k)).is_zero())
            return false;
    return true;
}

namespace {

// Threshold subspaces of the identity at source degree k, thresholds (a, b).
Subspace omega_space(const FilteredMap& fm, int k, int a, int b, int N) {
    const FilteredComplex& src = fm.source.fc;
    return src.filtration(k, a).intersect(
        la::preimage(src.d_from(k), src.filtration(k + 1, N - b)));
}

Subspace eta_space(const FilteredMap& fm, int k, int a, int b, int N) {
    const filtered::WeightedComplex& ch = fm.target.chain;
    Subspace hi = ch.weight_ge(k + 1, b);
    if (k < ch.fc.k_min()) return hi;
    return hi.intersect(la::preimage(ch.fc.d_from(k + 1), ch.weight_ge(k, N - a)));
}

}  // namespace

IdentityReport check_identity(const FilteredMap& fm) {
    IdentityReport rep;
    const FilteredComplex& src = fm.source.fc;
    const FilteredComplex& ch = fm.target.chain.fc;
    const int N = fm.target.chain.top_weight();
    for (int k = src.k_min(); k <= src.k_max(); ++k) {
        if (k + 1 < ch.k_min() || k + 1 > ch.k_max()) continue;
        Matrix M = fm.at(k + 1) * src.d_from(k) - dual_d(fm.target, k) * fm.at(k);
        if (M.is_zero()) continue;
        for (int a = 0; a <= N; ++a)
            for (int b = 0; b <= N; ++b) {
                const Subspace S = omega_space(fm, k, a, b, N);
                const Subspace T = eta_space(fm, k, a, b, N);
                if (S.dim() == 0 || T.dim() == 0) continue;
                // T_basis * M * S_basis^T, entry (i,j) = Psi(omega_j, eta_i)
                Matrix G = T.basis() * M * S.basis().transpose();
                for (int i = 0; i < G.rows(); ++i)
                    for (int j = 0; j < G.cols(); ++j)
                        if (!G.at(i, j).is_zero()) {
                            rep.holds = false;
                            rep.certificate = IdentityCertificate{
                                k, a, b, S.basis_vec(j), T.basis_vec(i), G.at(i, j)};
                            return rep;
                        }
            }
    }
    return rep;
}

SampleResult sample_constrained_map(const filtered::WeightedComplex& source,
                                    const filtered::DualityData& duality, std::uint64_t seed,
                                    bool impose_identity) {
    const FilteredComplex& src = source.fc;
    const FilteredComplex& ch = duality.chain.fc;
    const int N = duality.chain.top_weight();

    // unknown layout: entries of f^k for degrees where both sides live
    std::map<int, int> offset;
    int total = 0;
    for (int k = std::max(src.k_min(), ch.k_min()); k <= std::min(src.k_max(), ch.k_max()); ++k) {
        int sz = ch.dim(k) * src.dim(k);
        if (sz == 0) continue;
        offset[k] = total;
        total += sz;
    }
    auto var = [&](int k, int r, int c) { return offset.at(k) + r * src.dim(k) + c; };

    std::vector<Vec> rows;
    auto emit_pairing_row = [&](int k, const Vec& v, const Vec& w) {
        // sum f^k_{rc} v_c w_r = 0
        if (!offset.count(k)) return;
        Vec row = la::zero_vec(total);
        for (int r = 0; r < ch.dim(k); ++r) {
            if (w[size_t(r)].is_zero()) continue;
            for (int c = 0; c < src.dim(k); ++c)
                if (!v[size_t(c)].is_zero()) row[size_t(var(k, r, c))] = w[size_t(r)] * v[size_t(c)];
        }
        if (!la::is_zero(row)) rows.push_back(std::move(row));
    };

    int plo = std::min(src.p_min(), ch.p_min() + 1);
    int phi = std::max(src.p_max(), ch.p_max()) + 1;
    for (const auto& ko : offset) {
        const int k = ko.first;
        for (int p = plo; p <= phi; ++p) {
            const Subspace sp = src.filtration(k, p);
            const Subspace low = ch.filtration(k, p - 1);
            for (int i = 0; i < sp.dim(); ++i)
                for (int j = 0; j < low.dim(); ++j)
                    emit_pairing_row(k, sp.basis_vec(i), low.basis_vec(j));
        }
    }
    if (impose_identity) {
        FilteredMap probe{source, duality, {}, false, false};
        for (int k = src.k_min(); k <= src.k_max(); ++k) {
            if (k + 1 < ch.k_min() || k + 1 > ch.k_max()) continue;
            const Matrix dk = src.d_from(k);
            const Matrix bd = ch.d_from(k + 1);
            for (int a = 0; a <= N; ++a)
                for (int b = 0; b <= N; ++b) {
                    const Subspace S = omega_space(probe, k, a, b, N);
                    const Subspace T = eta_space(probe, k, a, b, N);
                    for (int i = 0; i < S.dim(); ++i) {
                        const Vec om = S.basis_vec(i);
                        const Vec dom = dk.apply(om);
                        for (int j = 0; j < T.dim(); ++j) {
                            const Vec et = T.basis_vec(j);
                            const Vec bet = bd.apply(et);
                            Vec row = la::zero_vec(total);
                            if (offset.count(k + 1))
                                for (int r = 0; r < ch.dim(k + 1); ++r)
                                    for (int c = 0; c < src.dim(k + 1); ++c)
                                        if (!et[size_t(r)].is_zero() && !dom[size_t(c)].is_zero())
                                            row[size_t(var(k + 1, r, c))] =
                                                et[size_t(r)] * dom[size_t(c)];
                            if (offset.count(k))
                                for (int r = 0; r < ch.dim(k); ++r)
                                    for (int c = 0; c < src.dim(k); ++c)
                                        if (!bet[size_t(r)].is_zero() && !om[size_t(c)].is_zero())
                                            row[size_t(var(k, r, c))] =
                                                row[size_t(var(k, r, c))] -
                                                bet[size_t(r)] * om[size_t(c)];
                            if (!la::is_zero(row)) rows.push_back(std::move(row));
                        }
                    }
                }
        }
    }

    const Subspace solutions =
        rows.empty() ? Subspace::full(total)
                     : la::kernel_image(Matrix::from_rows(rows, total)).kernel;

    auto rng = spectral::rng_for(seed, impose_identity ? "map" : "filtration-map");
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    Vec x = la::zero_vec(total);
    for (int i = 0; i < solutions.dim(); ++i) {
        Rational c(pick(-3, 3), pick(1, 2));
        if (!c.is_zero()) x = x + c * solutions.basis_vec(i);
    }
    if (la::is_zero(x) && solutions.dim() > 0) x = solutions.basis_vec(0);

    SampleResult out;
    out.seed = seed;
    out.solution_dim = solutions.dim();
    out.empty_solution_space = solutions.dim() == 0;
    out.map.source = source;
    out.map.target = duality;
    for (const auto& [k, off] : offset) {
        Matrix m(ch.dim(k), src.dim(k));
        for (int r = 0; r < ch.dim(k); ++r)
            for (int c = 0; c < src.dim(k); ++c) m.at(r, c) = x[size_t(off + r * src.dim(k) + c)];
        out.map.f[k] = std::move(m);
    }
    out.map.is_chain_map = chain_map_holds(out.map);
    out.map.satisfies_identity = check_identity(out.map).holds;
    if (impose_identity && !out.map.satisfies_identity)
        throw MorphismError("SamplerInconsistency",
                            "a constrained sample fails the identity it was solved for");
    return out;
}

la::Matrix PageMorphism::phi_at(int r, CellKey k) const {
    if (r >= 0 && r < int(phi.size())) {
        auto it = phi[size_t(r)].find(k);
        if (it != phi[size_t(r)].end()) return it->second;
    }
    return Matrix(tgt_ss.page(r).dimE(k), src_ss.page(r).dimE(k));
}

PageMorphism induce_morphism_between(const FilteredComplex& src, const FilteredComplex& tgt,
                                     const std::map<int, la::Matrix>& f, int r_max) {
    if (src.orient != Orient::cochain || tgt.orient != Orient::cochain)
        throw std::invalid_argument("induce_morphism_between expects cochain complexes");
    auto f_at = [&](int k) {
        auto it = f.find(k);
        return it != f.end() ? it->second : Matrix(tgt.dim(k), src.dim(k));
    };
    for (const auto& [k, m] : f)
        if (m.rows() != tgt.dim(k) || m.cols() != src.dim(k))
            throw std::invalid_argument("induce_morphism_between: f shape mismatch at degree " +
                                        std::to_string(k));
    // phi_0 is well defined only for filtration-preserving f
    for (int k = src.k_min(); k <= src.k_max(); ++k)
        for (int p = std::min(src.p_min(), tgt.p_min()); p <= std::max(src.p_max(), tgt.p_max()) + 1;
             ++p)
            if (!tgt.filtration(k, p).contains(la::image_of(f_at(k), src.filtration(k, p))))
                throw MorphismError("FiltrationViolation",
                                    "f(F^" + std::to_string(p) + ") escapes F^" +
                                        std::to_string(p) + " at degree " + std::to_string(k));

    PageMorphism pm;
    pm.src_ss = spectral::compute_pages(src, r_max);
    pm.tgt_ss = spectral::compute_pages(tgt, r_max);

    for (int r = 0; r <= r_max; ++r) {
        const spectral::Page& sp = pm.src_ss.page(r);
        const spectral::Page& tp = pm.tgt_ss.page(r);
        std::map<CellKey, Matrix> cur;
        if (r == 0) {
            for (const auto& [key, cl] : sp.cells) {
                const spectral::Cell* tc = tp.find(key);
                int trows = tc ? tc->E.dim() : 0;
                Matrix m(trows, cl.E.dim());
                if (tc) {
                    Matrix fk = f_at(key.p + key.q);
                    for (int j = 0; j < cl.E.dim(); ++j) {
                        Vec w = tc->E.project(fk.apply(cl.E.representative(j)));
                        for (int i = 0; i < trows; ++i) m.at(i, j) = w[size_t(i)];
                    }
                    for (int j = 0; j < cl.D.dim(); ++j)
                        if (!la::is_zero(tc->E.project(fk.apply(cl.D.basis_vec(j)))))
                            throw MorphismError("RepresentativeDependence",
                                                "phi_0 depends on representatives at (" +
                                                    std::to_string(key.p) + "," +
                                                    std::to_string(key.q) + ")");
                }
                cur.emplace(key, std::move(m));
            }
        } else {
            const spectral::PageIso& si = pm.src_ss.isos[size_t(r - 1)];
            const spectral::PageIso& ti = pm.tgt_ss.isos[size_t(r - 1)];
            const spectral::Page& tprev = pm.tgt_ss.page(r - 1);
            bool square_ok = true;
            for (const auto& [key, cl] : sp.cells) {
                const spectral::Cell* tc = tp.find(key);
                int trows = tc ? tc->E.dim() : 0;
                if (cl.E.dim() == 0 && trows == 0) {
                    cur.emplace(key, Matrix(0, 0));
                    continue;
                }
                // H(phi_{r-1}): classes of ker d_{r-1} mapped and reprojected
                auto hs = si.H.find(key);
                Matrix hphi(0, 0);
                Matrix prev_phi = pm.phi_at(r - 1, key);
                Subspace tker = la::kernel_image(tprev.d_at(key)).kernel;
                if (hs != si.H.end()) {
                    const la::QuotientSpace* ht =
                        ti.H.count(key) ? &ti.H.at(key) : nullptr;
                    hphi = Matrix(ht ? ht->dim() : 0, hs->second.dim());
                    for (int j = 0; j < hs->second.dim(); ++j) {
                        Vec w = prev_phi.apply(hs->second.representative(j));
                        if (!tker.contains(w))
                            throw MorphismError("CommutingSquareViolation",
                                                "phi_{r-1} image of a d-closed class is not "
                                                "d-closed at (" +
                                                    std::to_string(key.p) + "," +
                                                    std::to_string(key.q) + ")");
                        if (ht) {
                            Vec h = ht->project(w);
                            for (int i = 0; i < ht->dim(); ++i) hphi.at(i, j) = h[size_t(i)];
                        }
                    }
                }
                Matrix eta_s = si.eta.count(key) ? si.eta.at(key) : Matrix(0, 0);
                Matrix eta_t = ti.eta.count(key) ? ti.eta.at(key) : Matrix(0, 0);
                Matrix m = eta_t.inverse() * hphi * eta_s;
                if (!(eta_t * m == hphi * eta_s)) square_ok = false;
                cur.emplace(key, std::move(m));
            }
            pm.commuting_square.push_back(square_ok);
            if (!square_ok)
                throw MorphismError("CommutingSquareViolation",
                                    "eta phi_{r} != H(phi_{r-1}) eta' at page " +
                                        std::to_string(r));
        }
        pm.phi.push_back(std::move(cur));

        // chain-map verdict on this page
        bool ok = true;
        std::optional<std::array<int, 3>> fail;
        for (const auto& kv : sp.cells) {
            const CellKey key = kv.first;
            CellKey tk{key.p + r, key.q - r + 1};
            Matrix lhs = tp.d_at(key) * pm.phi_at(r, key);
            Matrix rhs = pm.phi_at(r, tk) * sp.d_at(key);
            if (!(lhs == rhs)) {
                ok = false;
                fail = std::array<int, 3>{r, key.p, key.q};
                break;
            }
        }
        pm.chain_map.push_back(ok);
        if (!ok) {
            pm.first_failure = fail;
            break;
        }
    }
    return pm;
}

PageMorphism induce_morphism(const FilteredMap& fm, int r_max) {
    MapValidation v = validate_filtered_map(fm);
    if (!v.ok)
        throw MorphismError("FiltrationViolation",
                            "induce_morphism requires a filtration-preserving map; " +
                                std::to_string(v.violations.size()) + " violations");
    return induce_morphism_between(fm.source.fc, fm.target.dual, fm.f, r_max);
}

std::vector<PagePairing> page_pairing(const spectral::SpectralResult& dual_ss,
                                      const spectral::SpectralResult& chain_ss,
                                      const filtered::DualityData& duality, int r_max) {
    if (dual_ss.homological || !chain_ss.homological)
        throw std::invalid_argument("page_pairing wants (cohomological dual, homological chain)");
    if (!(dual_ss.fc == duality.dual) || !(chain_ss.fc == duality.chain.fc))
        throw std::invalid_argument("page_pairing: spectral sequences do not belong to the pair");
    if (r_max > dual_ss.r_max() || r_max > chain_ss.r_max())
        throw std::invalid_argument("page_pairing: r_max exceeds the computed pages");
    std::vector<PagePairing> out;
    for (int r = 0; r <= r_max; ++r) {
        PagePairing pp;
        pp.r = r;
        const spectral::Page& dp = dual_ss.page(r);
        const spectral::Page& cp = chain_ss.page(r);
        std::vector<CellKey> keys;
        for (const auto& kv : dp.cells) keys.push_back(kv.first);
        for (const auto& kv : cp.cells)
            if (!dp.cells.count(kv.first)) keys.push_back(kv.first);
        std::sort(keys.begin(), keys.end());
        for (CellKey key : keys) {
            const spectral::Cell* dc = dp.find(key);
            const spectral::Cell* cc = cp.find(key);
            int dn = dc ? dc->E.dim() : 0;
            int cn = cc ? cc->E.dim() : 0;
            if (dn != cn)
                throw MorphismError("DegeneratePairing",
                                    "page " + std::to_string(r) + " cell (" +
                                        std::to_string(key.p) + "," + std::to_string(key.q) +
                                        ") pairs dims " + std::to_string(dn) + " vs " +
                                        std::to_string(cn));
            if (dn == 0) continue;
            // descent: both annihilation conditions, checked exactly
            auto pairs_to_zero = [&](const Subspace& a, const Subspace& b) {
                for (int i = 0; i < a.dim(); ++i)
                    for (int j = 0; j < b.dim(); ++j)
                        if (!la::dot(a.basis_vec(i), b.basis_vec(j)).is_zero()) return false;
                return true;
            };
            if (!pairs_to_zero(dc->D, cc->Z) || !pairs_to_zero(dc->Z, cc->D))
                throw MorphismError("IllDefinedPairing",
                                    "pairing fails to descend at page " + std::to_string(r) +
                                        " cell (" + std::to_string(key.p) + "," +
                                        std::to_string(key.q) + ")");
            Matrix g(dn, cn);
            for (int i = 0; i < dn; ++i)
                for (int j = 0; j < cn; ++j)
                    g.at(i, j) = la::dot(dc->E.representative(i), cc->E.representative(j));
            if (g.rank() != dn)
                throw MorphismError("DegeneratePairing",
                                    "singular Gram matrix at page " + std::to_string(r) +
                                        " cell (" + std::to_string(key.p) + "," +
                                        std::to_string(key.q) + ")");
            pp.gram.emplace(key, std::move(g));
        }
        out.push_back(std::move(pp));
    }
    return out;
}

TransportReport verify_duality_transport(const FilteredMap& fm, const PageMorphism& pm,
                                         const spectral::SpectralResult& chain_ss) {
    TransportReport rep;
    const FilteredComplex& src = fm.source.fc;
    const FilteredComplex& dual = fm.target.dual;
    const FilteredComplex& ch = fm.target.chain.fc;
    if (!chain_ss.homological || !(chain_ss.fc == ch))
        throw std::invalid_argument("verify_duality_transport wants the chain complex's own "
                                    "homological spectral sequence");

    // representative of the phi_t image of the class of v at cell `key`,
    // page t; zero when either page vanishes there
    auto mapped_rep = [&](int t, CellKey key, const Vec& v, int deg) -> Vec {
        const spectral::Cell* sc = pm.src_ss.page(t).find(key);
        const spectral::Cell* tc = pm.tgt_ss.page(t).find(key);
        if (!sc || !tc || sc->E.dim() == 0 || tc->E.dim() == 0) return la::zero_vec(dual.dim(deg));
        return tc->E.lift(pm.phi_at(t, key).apply(sc->E.project(v)));
    };

    for (int r = 0; r < int(pm.phi.size()); ++r) {
        for (const auto& [key, cl] : pm.src_ss.page(r).cells) {
            if (cl.E.dim() == 0) continue;
            const int k = key.p + key.q;
            const CellKey kz{key.p + r, key.q - r + 1};
            if (k + 1 < ch.k_min() || k + 1 > ch.k_max()) continue;
            // chain-side test classes at the mirrored cell
            Subspace zch = spectral::z_space(ch, kz.p, kz.q, r);
            if (const spectral::Cell* stored = chain_ss.page(r).find(kz))
                if (!(stored->Z == zch))
                    throw MorphismError("TransportConstruction",
                                        "stored chain Z disagrees with the defining formula");
            if (zch.dim() == 0) continue;
            std::vector<Vec> betas;
            for (int j = 0; j < zch.dim(); ++j) betas.push_back(ch.d_from(k + 1).apply(zch.basis_vec(j)));

            for (int j = 0; j < cl.E.dim(); ++j) {
                const Vec om = cl.E.representative(j);
                const Vec zt = src.d_from(k).apply(om);
                Vec w_prev = fm.at(k).apply(om);
                Vec z_prev = fm.at(k + 1).apply(zt);
                for (int t = 1; t <= r; ++t) {
                    Vec w_cur = mapped_rep(t, key, om, k);
                    Vec z_cur = mapped_rep(t, kz, zt, k + 1);
                    Subspace bd_w = spectral::b_space(dual, key.p, key.q, t - 1)
                                        .sum(spectral::d_space(dual, key.p, key.q, t - 1));
                    Subspace bd_z = spectral::b_space(dual, kz.p, kz.q, t - 1)
                                        .sum(spectral::d_space(dual, kz.p, kz.q, t - 1));
                    if (!bd_w.contains(w_cur - w_prev) || !bd_z.contains(z_cur - z_prev))
                        throw MorphismError("TransportConstruction",
                                            "page " + std::to_string(t) +
                                                " correction escapes B + D");
                    for (int i = 0; i < zch.dim(); ++i) {
                        if (!la::dot(w_cur - w_prev, betas[size_t(i)]).is_zero()) {
                            rep.consistent = false;
                            rep.mismatch = std::array<int, 3>{r, key.p, key.q};
                            rep.eta = zch.basis_vec(i);
                            rep.note = "omega correction at page " + std::to_string(t) +
                                       " pairs nontrivially against a boundary";
                            return rep;
                        }
                        if (!la::dot(z_cur - z_prev, zch.basis_vec(i)).is_zero()) {
                            rep.consistent = false;
                            rep.mismatch = std::array<int, 3>{r, key.p, key.q};
                            rep.eta = zch.basis_vec(i);
                            rep.note = "zeta correction at page " + std::to_string(t) +
                                       " pairs nontrivially";
                            return rep;
                        }
                    }
                    w_prev = std::move(w_cur);
                    z_prev = std::move(z_cur);
                }
                for (int i = 0; i < zch.dim(); ++i)
                    if (!(la::dot(z_prev, zch.basis_vec(i)) - la::dot(w_prev, betas[size_t(i)]))
                             .is_zero()) {
                        rep.consistent = false;
                        rep.mismatch = std::array<int, 3>{r, key.p, key.q};
                        rep.eta = zch.basis_vec(i);
                        rep.note = "page " + std::to_string(r) +
                                   " identity instance fails against a chain cycle";
                        return rep;
                    }
            }
        }
    }
    return rep;
}

}  // namespace rumin::morphism
