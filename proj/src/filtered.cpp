#include "rumin/filtered.hpp"

#include <stdexcept>

namespace rumin::filtered {

FilteredComplex FilteredComplex::make(Orient orient, int k_min, std::vector<int> dims,
                                      std::vector<la::Matrix> diff, int p_lo,
                                      std::vector<std::vector<la::Subspace>> steps) {
    const int nk = int(dims.size());
    if (nk == 0) throw std::invalid_argument("FilteredComplex: empty degree range");
    if (int(diff.size()) != nk - 1 && !(nk == 1 && diff.empty()))
        throw std::invalid_argument("FilteredComplex: need one differential per degree edge");
    for (int t = 0; t + 1 < nk; ++t) {
        const la::Matrix& m = diff[size_t(t)];
        int r = orient == Orient::cochain ? dims[size_t(t) + 1] : dims[size_t(t)];
        int c = orient == Orient::cochain ? dims[size_t(t)] : dims[size_t(t) + 1];
        if (m.rows() != r || m.cols() != c)
            throw std::invalid_argument("FilteredComplex: differential shape mismatch at edge " +
                                        std::to_string(t));
    }
    if (int(steps.size()) != nk) throw std::invalid_argument("FilteredComplex: steps per degree");
    size_t len = steps.empty() ? 0 : steps[0].size();
    for (auto& s : steps) {
        if (s.size() != len) throw std::invalid_argument("FilteredComplex: ragged filtration steps");
    }
    if (len == 0) throw std::invalid_argument("FilteredComplex: empty filtration");
    for (int k = 0; k < nk; ++k)
        for (auto& sub : steps[size_t(k)])
            if (sub.ambient() != dims[size_t(k)])
                throw std::invalid_argument("FilteredComplex: filtration ambient mismatch");

    FilteredComplex fc;
    fc.orient = orient;
    fc.k_min_ = k_min;
    fc.dims_ = dims;
    fc.diff_ = std::move(diff);

    // Raw accessor over the caller's window + conventions.
    auto raw = [&](int k, int p) -> la::Subspace {
        int i = p - p_lo;
        const int d = dims[size_t(k)];
        if (orient == Orient::cochain) {
            if (i < 0) return la::Subspace::full(d);
            if (i >= int(len)) return la::Subspace(d);
            return steps[size_t(k)][size_t(i)];
        }
        if (i < 0) return la::Subspace(d);
        if (i >= int(len)) return la::Subspace::full(d);
        return steps[size_t(k)][size_t(i)];
    };
    auto all_full = [&](int p) {
        for (int k = 0; k < nk; ++k)
            if (raw(k, p).dim() != dims[size_t(k)]) return false;
        return true;
    };
    auto all_zero = [&](int p) {
        for (int k = 0; k < nk; ++k)
            if (raw(k, p).dim() != 0) return false;
        return true;
    };

    int lo, hi;
    if (orient == Orient::cochain) {
        lo = p_lo - 1;                       // full by convention
        while (lo + 1 <= p_lo + int(len) && all_full(lo + 1)) ++lo;
        hi = p_lo + int(len) - 1;
        while (hi > lo && all_zero(hi)) --hi;
    } else {
        hi = p_lo + int(len);                // full by convention
        while (hi - 1 >= p_lo - 1 && all_full(hi - 1)) --hi;
        lo = p_lo;
        while (lo < hi && all_zero(lo)) ++lo;
        --lo;                                 // keep one all-zero step at the bottom
    }
    if (hi < lo) hi = lo;
    fc.p_min_ = lo;
    fc.p_max_ = hi;
    fc.filt_.assign(size_t(nk), {});
    for (int k = 0; k < nk; ++k)
        for (int p = lo; p <= hi; ++p) fc.filt_[size_t(k)].push_back(raw(k, p));
    return fc;
}

la::Matrix FilteredComplex::d_from(int k) const {
    if (orient == Orient::cochain) {
        if (k >= k_min() && k < k_max()) return diff_[size_t(k - k_min_)];
        return la::Matrix(dim(k + 1), dim(k));
    }
    if (k > k_min() && k <= k_max()) return diff_[size_t(k - 1 - k_min_)];
    return la::Matrix(dim(k - 1), dim(k));
}

la::Subspace FilteredComplex::filtration(int k, int p) const {
    const int d = dim(k);
    if (k < k_min() || k > k_max()) return la::Subspace(0);
    if (orient == Orient::cochain) {
        if (p < p_min_) return la::Subspace::full(d);
        if (p > p_max_) return la::Subspace(d);
    } else {
        if (p < p_min_) return la::Subspace(d);
        if (p > p_max_) return la::Subspace::full(d);
    }
    return filt_[size_t(k - k_min_)][size_t(p - p_min_)];
}

ComplexValidation validate_filtered(const FilteredComplex& fc) {
    ComplexValidation out;
    const bool co = fc.orient == Orient::cochain;
    // d^2 = 0
    for (int k = fc.k_min(); k <= fc.k_max(); ++k) {
        int next = co ? k + 1 : k - 1;
        la::Matrix dd = fc.d_from(next) * fc.d_from(k);
        if (!dd.is_zero())
            for (int j = 0; j < dd.cols(); ++j)
                if (!la::is_zero(dd.col(j))) {
                    out.violations.push_back({"D2Violation", k, 0, la::unit_vec(fc.dim(k), j)});
                    break;
                }
    }
    // nesting and subcomplex across the stored window (+1 on both sides to
    // exercise conventions)
    for (int k = fc.k_min(); k <= fc.k_max(); ++k) {
        for (int p = fc.p_min(); p <= fc.p_max() + 1; ++p) {
            la::Subspace big = co ? fc.filtration(k, p - 1) : fc.filtration(k, p);
            la::Subspace small = co ? fc.filtration(k, p) : fc.filtration(k, p - 1);
            if (!big.contains(small)) {
                la::Vec bad;
                for (int i = 0; i < small.dim(); ++i)
                    if (!big.contains(small.basis_vec(i))) { bad = small.basis_vec(i); break; }
                out.violations.push_back({"NestingViolation", k, p, bad});
            }
        }
        int next = co ? k + 1 : k - 1;
        la::Matrix d = fc.d_from(k);
        for (int p = fc.p_min(); p <= fc.p_max(); ++p) {
            la::Subspace src = fc.filtration(k, p);
            la::Subspace tgt = fc.filtration(next, p);
            for (int i = 0; i < src.dim(); ++i) {
                la::Vec img = d.apply(src.basis_vec(i));
                if (!tgt.contains(img)) {
                    out.violations.push_back({"SubcomplexViolation", k, p, src.basis_vec(i)});
                    break;
                }
            }
        }
    }
    out.ok = out.violations.empty();
    return out;
}

FilteredComplex dualize(const FilteredComplex& fc) {
    const int nk = fc.k_max() - fc.k_min() + 1;
    std::vector<int> dims;
    for (int k = fc.k_min(); k <= fc.k_max(); ++k) dims.push_back(fc.dim(k));
    std::vector<la::Matrix> diff;
    const bool to_cochain = fc.orient == Orient::chain;
    for (int t = 0; t + 1 < nk; ++t) {
        int k = fc.k_min() + t;
        // chain -> cochain: d^k := (∂_{k+1})^T; cochain -> chain: ∂_{k+1} := (d^k)^T
        diff.push_back(to_cochain ? fc.d_from(k + 1).transpose() : fc.d_from(k).transpose());
    }
    std::vector<std::vector<la::Subspace>> steps(static_cast<size_t>(nk));
    int p_lo = fc.p_min() - 1;
    int p_hi = fc.p_max() + 2;
    for (int k = fc.k_min(); k <= fc.k_max(); ++k)
        for (int p = p_lo; p <= p_hi; ++p) {
            la::Subspace s = to_cochain ? fc.filtration(k, p - 1) : fc.filtration(k, p + 1);
            steps[size_t(k - fc.k_min())].push_back(s.annihilator());
        }
    return FilteredComplex::make(to_cochain ? Orient::cochain : Orient::chain, fc.k_min(), dims,
                                 std::move(diff), p_lo, std::move(steps));
}

la::Subspace WeightedComplex::weight_piece(int k, int w) const {
    int i = k - fc.k_min();
    if (i < 0 || i >= int(grading.size())) return la::Subspace(fc.dim(k));
    for (const auto& [pw, sub] : grading[size_t(i)])
        if (pw == w) return sub;
    return la::Subspace(fc.dim(k));
}

la::Subspace WeightedComplex::weight_ge(int k, int w) const {
    int i = k - fc.k_min();
    la::Subspace acc(fc.dim(k));
    if (i < 0 || i >= int(grading.size())) return acc;
    for (const auto& [pw, sub] : grading[size_t(i)])
        if (pw >= w) acc = acc.sum(sub);
    return acc;
}

int WeightedComplex::top_weight() const {
    int top = 0;
    for (const auto& g : grading)
        for (const auto& [w, sub] : g)
            if (sub.dim() > 0 && w > top) top = w;
    return top;
}

std::optional<std::string> check_weighted(const WeightedComplex& wc) {
    const int N = wc.top_weight();
    for (int k = wc.fc.k_min(); k <= wc.fc.k_max(); ++k) {
        int i = k - wc.fc.k_min();
        if (i >= int(wc.grading.size())) return "grading missing degree " + std::to_string(k);
        int total = 0;
        la::Subspace sum(wc.fc.dim(k));
        for (const auto& [w, sub] : wc.grading[size_t(i)]) {
            (void)w;
            total += sub.dim();
            sum = sum.sum(sub);
        }
        if (total != wc.fc.dim(k) || sum.dim() != wc.fc.dim(k))
            return "grading of degree " + std::to_string(k) + " is not a direct sum decomposition";
        int plo = wc.fc.p_min() - 1, phi = wc.fc.p_max() + 1;
        for (int p = plo; p <= phi; ++p) {
            la::Subspace want = wc.fc.orient == Orient::cochain ? wc.weight_ge(k, p)
                                                                : wc.weight_ge(k, N - p);
            if (!(wc.fc.filtration(k, p) == want))
                return "filtration of degree " + std::to_string(k) + " at p=" + std::to_string(p) +
                       " does not match the weight grading";
        }
    }
    return std::nullopt;
}

DualityData make_duality(const WeightedComplex& chain) {
    if (chain.fc.orient != Orient::chain)
        throw std::invalid_argument("make_duality: chain orientation required");
    return DualityData{chain, dualize(chain.fc)};
}

CohomologyReport total_cohomology(const FilteredComplex& fc) {
    CohomologyReport rep;
    rep.k_min = fc.k_min();
    const bool co = fc.orient == Orient::cochain;
    for (int k = fc.k_min(); k <= fc.k_max(); ++k) {
        int prev = co ? k - 1 : k + 1;
        la::Subspace ker = la::kernel_image(fc.d_from(k)).kernel;
        la::Subspace im = la::kernel_image(fc.d_from(prev)).image;
        rep.betti.push_back(ker.dim() - im.dim());
        for (int p = fc.p_min() - 1; p <= fc.p_max() + 1; ++p) {
            la::Subspace fp = fc.filtration(k, p);
            int df = ker.intersect(fp).sum(im).dim() - im.dim();
            rep.filtered_dim[{k, p}] = df;
        }
        // gr^p = F^p/F^{p+1} (cochain) resp. F_p/F_{p-1} (chain); the filtered
        // dimension one step outside the window is 0 on the shrinking side.
        for (int p = fc.p_min() - 1; p <= fc.p_max() + 1; ++p) {
            int hi = rep.filtered_dim[{k, p}];
            auto it = rep.filtered_dim.find({k, co ? p + 1 : p - 1});
            int lo = it == rep.filtered_dim.end() ? 0 : it->second;
            rep.graded_dim[{k, p}] = hi - lo;
        }
    }
    return rep;
}

}  // namespace rumin::filtered
