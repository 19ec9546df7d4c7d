#include "rumin/spectral.hpp"

#include <algorithm>

namespace rumin::spectral {

using filtered::FilteredComplex;
using filtered::Orient;
using la::Matrix;
using la::Rational;
using la::Subspace;
using la::Vec;

const Cell* Page::find(CellKey k) const {
    auto it = cells.find(k);
    return it == cells.end() ? nullptr : &it->second;
}

int Page::dimE(CellKey k) const {
    const Cell* c = find(k);
    return c ? c->E.dim() : 0;
}

Matrix Page::d_at(CellKey k) const {
    auto it = d.find(k);
    if (it != d.end()) return it->second;
    CellKey tgt{k.p + r, k.q - r + 1};
    return Matrix(dimE(tgt), dimE(k));
}

namespace {

std::string cell_str(int r, CellKey k) {
    return "r=" + std::to_string(r) + " (p,q)=(" + std::to_string(k.p) + "," +
           std::to_string(k.q) + ")";
}

}  // namespace

// Z^{p,q}_r = F^p C^{p+q} cap d^{-1}(F^{p+r} C^{p+q+1}); total in p by the
// filtration conventions, zero ambient outside the degree range. On a chain
// complex the mirrored formula F_p cap bd^{-1}(F_{p-r}) with p ascending.
Subspace z_space(const FilteredComplex& fc, int p, int q, int r) {
    int k = p + q;
    if (k < fc.k_min() || k > fc.k_max()) return Subspace(0);
    bool co = fc.orient == Orient::cochain;
    int kn = co ? k + 1 : k - 1;
    int pn = co ? p + r : p - r;
    return fc.filtration(k, p).intersect(la::preimage(fc.d_from(k), fc.filtration(kn, pn)));
}

// B^{p,q}_r computed both ways the definition can be read; they agree and the
// engine asserts it rather than choosing silently.
Subspace b_space(const FilteredComplex& fc, int p, int q, int r) {
    int k = p + q;
    if (k < fc.k_min() || k > fc.k_max()) return Subspace(0);
    bool co = fc.orient == Orient::cochain;
    int ki = co ? k - 1 : k + 1;
    int pi = co ? p - r : p + r;
    int qi = co ? q + r - 1 : q - r + 1;
    Matrix din = fc.d_from(ki);
    Subspace b1 = la::image_of(din, fc.filtration(ki, pi)).intersect(fc.filtration(k, p));
    Subspace b2 = la::image_of(din, z_space(fc, pi, qi, r));
    if (!(b1 == b2))
        throw SpectralError("BoundaryMismatch",
                            "the two B^{p,q}_r expressions differ at " + cell_str(r, {p, q}));
    return b1;
}

Subspace d_space(const FilteredComplex& fc, int p, int q, int r) {
    int k = p + q;
    if (k < fc.k_min() || k > fc.k_max()) return Subspace(0);
    bool co = fc.orient == Orient::cochain;
    if (r == 0) return fc.filtration(k, co ? p + 1 : p - 1);
    int pz = co ? p + 1 : p - 1;
    int qz = co ? q - 1 : q + 1;
    return z_space(fc, pz, qz, r - 1).sum(b_space(fc, p, q, r - 1));
}

namespace {

SpectralResult compute_cochain(const FilteredComplex& fc, int r_max) {
    SpectralResult s;
    s.fc = fc;
    for (int r = 0; r <= r_max; ++r) {
        Page pg;
        pg.r = r;
        for (int p = fc.p_min() - r; p <= fc.p_max() + r; ++p)
            for (int k = fc.k_min(); k <= fc.k_max(); ++k) {
                int q = k - p;
                Cell cl;
                cl.Z = z_space(fc, p, q, r);
                cl.B = b_space(fc, p, q, r);
                cl.D = d_space(fc, p, q, r);
                cl.E = la::quotient(cl.Z, cl.D);
                pg.cells.emplace(CellKey{p, q}, std::move(cl));
            }
        for (auto& [key, cl] : pg.cells) {
            int k = key.p + key.q;
            CellKey tk{key.p + r, key.q - r + 1};
            auto ti = pg.cells.find(tk);
            Matrix d = fc.d_from(k);
            if (ti == pg.cells.end()) {
                // outside the stored range the page vanishes, so d must too
                for (int j = 0; j < cl.E.dim(); ++j)
                    if (!la::is_zero(d.apply(cl.E.representative(j))))
                        throw SpectralError("BoundaryMismatch",
                                            "nonzero image outside the page range at " +
                                                cell_str(r, key));
                pg.d.emplace(key, Matrix(0, cl.E.dim()));
                continue;
            }
            const la::QuotientSpace& te = ti->second.E;
            Matrix m(te.dim(), cl.E.dim());
            for (int j = 0; j < cl.E.dim(); ++j) {
                Vec cls = te.project(d.apply(cl.E.representative(j)));
                for (int i = 0; i < te.dim(); ++i) m.at(i, j) = cls[size_t(i)];
            }
            // independence of the representative choice: d carries the
            // denominator into the target denominator
            for (int j = 0; j < cl.D.dim(); ++j)
                if (!la::is_zero(te.project(d.apply(cl.D.basis_vec(j)))))
                    throw SpectralError("RepresentativeDependence",
                                        "d_r depends on representatives at " + cell_str(r, key));
            pg.d.emplace(key, std::move(m));
        }
        for (const auto& [key, m] : pg.d) {
            CellKey tk{key.p + r, key.q - r + 1};
            auto ti = pg.d.find(tk);
            if (ti != pg.d.end() && !(ti->second * m).is_zero())
                throw SpectralError("BoundaryMismatch", "d_r^2 != 0 at " + cell_str(r, key));
        }
        s.pages.push_back(std::move(pg));
    }
    for (int r = 0; r + 1 <= r_max; ++r) {
        const Page& cur = s.pages[size_t(r)];
        const Page& nxt = s.pages[size_t(r + 1)];
        PageIso iso;
        iso.r = r;
        for (const auto& [key, cl] : cur.cells) {
            Subspace ker = la::kernel_image(cur.d_at(key)).kernel;
            CellKey sk{key.p - r, key.q + r - 1};
            Subspace img(cl.E.dim());
            if (cur.cells.count(sk)) img = la::kernel_image(cur.d_at(sk)).image;
            la::QuotientSpace H = la::quotient(ker, img);
            const Cell* ncl = nxt.find(key);
            int ndim = ncl ? ncl->E.dim() : 0;
            if (H.dim() != ndim)
                throw SpectralError("PageIsoViolation", "dim H(E_r) != dim E_{r+1} at " +
                                                            cell_str(r, key));
            Matrix eta(H.dim(), ndim);
            for (int j = 0; j < ndim; ++j) {
                Vec ecls = cl.E.project(ncl->E.representative(j));
                if (!ker.contains(ecls))
                    throw SpectralError("PageIsoViolation",
                                        "Z_{r+1} class escapes ker d_r at " + cell_str(r, key));
                Vec h = H.project(ecls);
                for (int i = 0; i < H.dim(); ++i) eta.at(i, j) = h[size_t(i)];
            }
            if (eta.rank() != H.dim())
                throw SpectralError("PageIsoViolation", "eta_r singular at " + cell_str(r, key));
            iso.H.emplace(key, std::move(H));
            iso.eta.emplace(key, std::move(eta));
        }
        s.isos.push_back(std::move(iso));
    }
    return s;
}

// A chain complex is run through the index flip C^k := C_{-k}, F^p := F_{-p};
// the cochain formulas then are the homological ones verbatim.
FilteredComplex reindex_to_cochain(const FilteredComplex& fc) {
    int len = fc.k_max() - fc.k_min() + 1;
    std::vector<int> dims;
    for (int t = 0; t < len; ++t) dims.push_back(fc.dim(fc.k_max() - t));
    std::vector<Matrix> diff;
    for (int t = 0; t + 1 < len; ++t) diff.push_back(fc.d_from(fc.k_max() - t));
    std::vector<std::vector<Subspace>> steps(static_cast<size_t>(len));
    int plen = fc.p_max() - fc.p_min() + 1;
    for (int t = 0; t < len; ++t)
        for (int i = 0; i < plen; ++i)
            steps[size_t(t)].push_back(fc.filtration(fc.k_max() - t, fc.p_max() - i));
    return FilteredComplex::make(Orient::cochain, -fc.k_max(), std::move(dims), std::move(diff),
                                 -fc.p_max(), std::move(steps));
}

}  // namespace

SpectralResult compute_pages(const FilteredComplex& fc, int r_max) {
    if (fc.orient != Orient::cochain)
        throw std::invalid_argument("compute_pages expects a cochain complex");
    if (r_max < 0) throw std::invalid_argument("r_max must be nonnegative");
    return compute_cochain(fc, r_max);
}

SpectralResult compute_pages_homological(const FilteredComplex& fc, int r_max) {
    if (fc.orient != Orient::chain)
        throw std::invalid_argument("compute_pages_homological expects a chain complex");
    if (r_max < 0) throw std::invalid_argument("r_max must be nonnegative");
    SpectralResult co = compute_cochain(reindex_to_cochain(fc), r_max);
    SpectralResult s;
    s.fc = fc;
    s.homological = true;
    for (auto& pg : co.pages) {
        Page hp;
        hp.r = pg.r;
        for (auto& [key, cl] : pg.cells) hp.cells.emplace(CellKey{-key.p, -key.q}, std::move(cl));
        for (auto& [key, m] : pg.d) hp.d.emplace(CellKey{-key.p, -key.q}, std::move(m));
        s.pages.push_back(std::move(hp));
    }
    for (auto& iso : co.isos) {
        PageIso hi;
        hi.r = iso.r;
        for (auto& [key, h] : iso.H) hi.H.emplace(CellKey{-key.p, -key.q}, std::move(h));
        for (auto& [key, m] : iso.eta) hi.eta.emplace(CellKey{-key.p, -key.q}, std::move(m));
        s.isos.push_back(std::move(hi));
    }
    return s;
}

LimitReport limit_page(const SpectralResult& s) {
    const FilteredComplex& fc = s.fc;
    int width = fc.p_max() - fc.p_min() + 1;
    if (s.r_max() < width + 1)
        throw SpectralError("NonStabilized", "pages up to r = " + std::to_string(s.r_max()) +
                                                 " cannot certify stabilization; need r_max >= " +
                                                 std::to_string(width + 1));
    LimitReport rep;
    const Page& last = s.pages.back();
    auto dims_match = [&](const Page& pg) {
        for (const auto& [key, cl] : last.cells)
            if (pg.dimE(key) != cl.E.dim()) return false;
        for (const auto& [key, cl] : pg.cells)
            if (last.dimE(key) != cl.E.dim()) return false;
        for (const auto& [key, m] : pg.d)
            if (!m.is_zero()) return false;
        return true;
    };
    int r = s.r_max();
    while (r > 0 && dims_match(s.pages[size_t(r - 1)])) --r;
    rep.r_stab = r;
    for (const auto& [key, cl] : last.cells)
        if (cl.E.dim() > 0) rep.einf[key] = cl.E.dim();
    rep.cohomology = filtered::total_cohomology(fc);
    std::map<std::pair<int, int>, int> einf_kp;  // (k, p) -> dim
    for (const auto& [key, d] : rep.einf) einf_kp[{key.p + key.q, key.p}] = d;
    std::map<std::pair<int, int>, int> want = rep.cohomology.graded_dim;
    for (const auto& [kp, d] : einf_kp) {
        int g = rep.cohomology.graded_at(kp.first, kp.second);
        if (g != d) rep.mismatches.push_back({kp.second, kp.first - kp.second, d, g});
    }
    for (const auto& [kp, g] : want)
        if (g != 0 && !einf_kp.count(kp))
            rep.mismatches.push_back({kp.second, kp.first - kp.second, 0, g});
    rep.matches_graded = rep.mismatches.empty();
    return rep;
}

std::uint64_t split_seed(std::uint64_t seed, const std::string& label) {
    std::uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < 8; ++i) {
        h ^= (seed >> (8 * i)) & 0xffu;
        h *= 1099511628211ull;
    }
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ull;
    }
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return h;
}

std::mt19937_64 rng_for(std::uint64_t seed, const std::string& label) {
    return std::mt19937_64(split_seed(seed, label));
}

namespace {

// Core of the corpus generator; hands the drawn weights back so the weighted
// wrapper can attach the matching grading.
filtered::FilteredComplex random_complex_core(std::uint64_t seed, const RandomComplexSpec& spec,
                                              std::vector<std::vector<int>>& wt_out) {
    if (spec.degrees < 0 || spec.max_dim < 1 || spec.max_weight < 0)
        throw std::invalid_argument("random_filtered_complex: bad spec");
    auto rng = rng_for(seed, "complex");
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int K = spec.degrees;
    std::vector<int> dims(size_t(K + 1));
    std::vector<std::vector<int>> wt(size_t(K + 1));
    std::vector<std::vector<char>> in_flag(size_t(K + 1));
    for (int k = 0; k <= K; ++k) {
        dims[size_t(k)] = pick(1, spec.max_dim);
        for (int i = 0; i < dims[size_t(k)]; ++i) wt[size_t(k)].push_back(pick(0, spec.max_weight));
        std::sort(wt[size_t(k)].rbegin(), wt[size_t(k)].rend());
        for (int i = 0; i < dims[size_t(k)]; ++i) in_flag[size_t(k)].push_back(char(pick(0, 1)));
    }
    // d kills the flag and lands in it, raising weight; d^2 = 0 structurally
    std::vector<Matrix> diff;
    for (int k = 0; k < K; ++k) {
        Matrix m(dims[size_t(k + 1)], dims[size_t(k)]);
        for (int i = 0; i < dims[size_t(k)]; ++i) {
            if (in_flag[size_t(k)][size_t(i)]) continue;
            for (int j = 0; j < dims[size_t(k + 1)]; ++j) {
                if (!in_flag[size_t(k + 1)][size_t(j)]) continue;
                if (wt[size_t(k + 1)][size_t(j)] < wt[size_t(k)][size_t(i)]) continue;
                if (pick(0, 2) == 0) m.at(j, i) = Rational(pick(-3, 3));
            }
        }
        diff.push_back(std::move(m));
    }
    // change of basis preserving every weight-prefix span (weights sorted
    // descending, so entries strictly above the diagonal are admissible)
    if (spec.mix_basis) {
        std::vector<Matrix> T, Tinv;
        for (int k = 0; k <= K; ++k) {
            Matrix t = Matrix::identity(dims[size_t(k)]);
            for (int j = 0; j < dims[size_t(k)]; ++j)
                for (int i = j + 1; i < dims[size_t(k)]; ++i)
                    if (pick(0, 1)) t.at(j, i) = Rational(pick(-2, 2));
            T.push_back(t);
            Tinv.push_back(t.inverse());
        }
        for (int k = 0; k < K; ++k) diff[size_t(k)] = T[size_t(k + 1)] * diff[size_t(k)] * Tinv[size_t(k)];
    }
    std::vector<std::vector<Subspace>> steps(size_t(K + 1));
    for (int k = 0; k <= K; ++k)
        for (int p = 0; p <= spec.max_weight; ++p) {
            int cnt = 0;
            while (cnt < dims[size_t(k)] && wt[size_t(k)][size_t(cnt)] >= p) ++cnt;
            std::vector<Vec> units;
            for (int i = 0; i < cnt; ++i) units.push_back(la::unit_vec(dims[size_t(k)], i));
            steps[size_t(k)].push_back(Subspace::span(dims[size_t(k)], units));
        }
    if (spec.orient == Orient::cochain) {
        wt_out = wt;
        return FilteredComplex::make(Orient::cochain, 0, dims, diff, 0, steps);
    }
    // chain model by the index flip; the ascending filtration mirrors the
    // descending one through the realized top weight
    int top = 0;
    for (const auto& row : wt)
        for (int w : row) top = std::max(top, w);
    std::vector<int> cdims;
    for (int t = 0; t <= K; ++t) cdims.push_back(dims[size_t(K - t)]);
    std::vector<Matrix> cdiff;
    for (int t = 0; t + 1 <= K; ++t) cdiff.push_back(diff[size_t(K - t - 1)]);
    std::vector<std::vector<Subspace>> csteps(size_t(K + 1));
    for (int t = 0; t <= K; ++t)
        for (int p = -1; p <= top; ++p) {
            int pw = top - p;
            if (pw > spec.max_weight) csteps[size_t(t)].push_back(Subspace(cdims[size_t(t)]));
            else csteps[size_t(t)].push_back(steps[size_t(K - t)][size_t(pw)]);
        }
    wt_out.clear();
    for (int t = 0; t <= K; ++t) wt_out.push_back(wt[size_t(K - t)]);
    return FilteredComplex::make(Orient::chain, 0, cdims, cdiff, -1, csteps);
}

}  // namespace

filtered::FilteredComplex random_filtered_complex(std::uint64_t seed, const RandomComplexSpec& spec) {
    std::vector<std::vector<int>> wt;
    return random_complex_core(seed, spec, wt);
}

filtered::WeightedComplex random_weighted_complex(std::uint64_t seed, const RandomComplexSpec& spec) {
    std::vector<std::vector<int>> wt;
    filtered::WeightedComplex wc;
    wc.fc = random_complex_core(seed, spec, wt);
    for (int k = wc.fc.k_min(); k <= wc.fc.k_max(); ++k) {
        const auto& row = wt[size_t(k - wc.fc.k_min())];
        std::vector<std::pair<int, Subspace>> pieces;
        int i = 0;
        const int dim = wc.fc.dim(k);
        while (i < dim) {
            const int w = row[size_t(i)];
            std::vector<Vec> units;
            int j = i;
            while (j < dim && row[size_t(j)] == w) {
                units.push_back(la::unit_vec(dim, j));
                ++j;
            }
            pieces.emplace_back(w, Subspace::span(dim, units));
            i = j;
        }
        wc.grading.push_back(std::move(pieces));
    }
    return wc;
}

}  // namespace rumin::spectral
