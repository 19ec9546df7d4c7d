#include "rumin/carnot.hpp"

#include <sstream>

namespace rumin::carnot {

la::Rational GradedLieAlgebra::structure_const(int i, int j, int k) const {
    if (i == j) return la::Rational(0);
    bool flip = i > j;
    if (flip) std::swap(i, j);
    auto it = c.find({i, j});
    if (it == c.end()) return la::Rational(0);
    auto kt = it->second.find(k);
    if (kt == it->second.end()) return la::Rational(0);
    return flip ? -kt->second : kt->second;
}

la::Vec GradedLieAlgebra::bracket(const la::Vec& x, const la::Vec& y) const {
    return bracket_generic(*this, x, y, [](const la::Rational& r) { return r; }, la::Rational(0));
}

static bool layers_ok(const std::vector<int>& layers) {
    if (layers.empty()) return false;
    for (int m : layers)
        if (m <= 0) return false;
    return true;
}

AlgebraValidation validate_algebra(const AlgebraData& data) {
    AlgebraValidation out;
    if (!layers_ok(data.layers)) {
        out.violations.push_back({"MalformedInput", -1, -1, -1, "layers must be a nonempty list of positive sizes"});
        return out;
    }
    GradedLieAlgebra g;
    g.name = data.name;
    g.layers = data.layers;
    for (int l = 0; l < int(data.layers.size()); ++l)
        for (int t = 0; t < data.layers[size_t(l)]; ++t) g.wt.push_back(l + 1);
    g.n = int(g.wt.size());

    for (const auto& b : data.brackets) {
        if (b.i < 0 || b.j < 0 || b.i >= g.n || b.j >= g.n || b.i >= b.j) {
            std::ostringstream os;
            os << "bracket entry must have 0 <= i < j < n, got (" << b.i << "," << b.j << ")";
            out.violations.push_back({"MalformedInput", b.i, b.j, -1, os.str()});
            continue;
        }
        if (g.c.count({b.i, b.j})) {
            out.violations.push_back({"MalformedInput", b.i, b.j, -1, "duplicate bracket entry"});
            continue;
        }
        std::map<int, la::Rational> ks;
        for (const auto& [k, v] : b.coeffs) {
            if (k < 0 || k >= g.n) {
                out.violations.push_back({"MalformedInput", b.i, b.j, k, "coefficient index out of range"});
                continue;
            }
            if (!v.is_zero()) ks[k] = v;
        }
        if (!ks.empty()) g.c[{b.i, b.j}] = ks;
    }
    if (!out.violations.empty()) return out;

    // grading: c_{ij}^k = 0 unless wt(k) = wt(i) + wt(j)
    for (const auto& [ij, ks] : g.c)
        for (const auto& [k, v] : ks) {
            (void)v;
            if (g.wt[size_t(k)] != g.wt[size_t(ij.first)] + g.wt[size_t(ij.second)])
                out.violations.push_back({"GradingViolation", ij.first, ij.second, k, ""});
        }

    // Jacobi on all basis triples
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j)
            for (int k = j + 1; k < g.n; ++k) {
                la::Vec ei = la::unit_vec(g.n, i), ej = la::unit_vec(g.n, j), ek = la::unit_vec(g.n, k);
                la::Vec s = g.bracket(g.bracket(ei, ej), ek) + g.bracket(g.bracket(ej, ek), ei) +
                            g.bracket(g.bracket(ek, ei), ej);
                if (!la::is_zero(s)) out.violations.push_back({"JacobiViolation", i, j, k, ""});
            }

    // stratification: V_l = [V_1, V_{l-1}] for l >= 2
    for (int l = 2; l <= g.step(); ++l) {
        std::vector<la::Vec> gens;
        for (int a = 0; a < g.n; ++a) {
            if (g.wt[size_t(a)] != 1) continue;
            for (int b = 0; b < g.n; ++b) {
                if (g.wt[size_t(b)] != l - 1) continue;
                gens.push_back(g.bracket(la::unit_vec(g.n, a), la::unit_vec(g.n, b)));
            }
        }
        la::Subspace got = la::Subspace::span(g.n, gens);
        std::vector<la::Vec> layer_vecs;
        for (int k = 0; k < g.n; ++k)
            if (g.wt[size_t(k)] == l) layer_vecs.push_back(la::unit_vec(g.n, k));
        la::Subspace want = la::Subspace::span(g.n, layer_vecs);
        if (!(got == want)) {
            std::ostringstream os;
            os << "[V_1, V_" << (l - 1) << "] has dimension " << got.dim() << ", layer " << l
               << " has dimension " << want.dim();
            out.violations.push_back({"StratificationViolation", -1, -1, l, os.str()});
        }
    }

    out.ok = out.violations.empty();
    if (out.ok) out.algebra = g;
    return out;
}

la::Matrix dilation(const GradedLieAlgebra& g, const la::Rational& t) {
    if (t.is_zero()) throw std::invalid_argument("dilation: t must be nonzero");
    la::Matrix m(g.n, g.n);
    for (int i = 0; i < g.n; ++i) {
        la::Rational p(1);
        for (int w = 0; w < g.wt[size_t(i)]; ++w) p *= t;
        m.at(i, i) = p;
    }
    return m;
}

HomValidation validate_homomorphism(const GradedLieAlgebra& src, const GradedLieAlgebra& tgt,
                                    const la::Matrix& A) {
    HomValidation out;
    if (A.rows() != tgt.n || A.cols() != src.n) {
        out.violations.push_back({"ShapeViolation", A.rows(), A.cols()});
        return out;
    }
    for (int k = 0; k < tgt.n; ++k)
        for (int i = 0; i < src.n; ++i)
            if (!A.at(k, i).is_zero() && tgt.wt[size_t(k)] != src.wt[size_t(i)])
                out.violations.push_back({"BlockViolation", k, i});
    for (int i = 0; i < src.n; ++i)
        for (int j = i + 1; j < src.n; ++j) {
            la::Vec lhs = A.apply(src.bracket(la::unit_vec(src.n, i), la::unit_vec(src.n, j)));
            la::Vec rhs = tgt.bracket(A.col(i), A.col(j));
            if (!la::is_zero(lhs - rhs)) out.violations.push_back({"BracketViolation", i, j});
        }
    out.ok = out.violations.empty();
    if (out.ok) out.hom = GradedHomomorphism{A};
    return out;
}

la::Vec bch_multiply(const GradedLieAlgebra& g, const la::Vec& x, const la::Vec& y) {
    if (int(x.size()) != g.n || int(y.size()) != g.n)
        throw std::invalid_argument("bch_multiply: point dimension mismatch");
    return bch_generic(g, x, y, [](const la::Rational& r) { return r; }, la::Rational(0));
}

static GradedLieAlgebra must(AlgebraData d) {
    auto v = validate_algebra(d);
    if (!v.ok) throw std::logic_error("builtin algebra failed validation: " + d.name);
    return v.algebra;
}

GradedLieAlgebra heisenberg() {
    AlgebraData d;
    d.name = "heisenberg";
    d.layers = {2, 1};
    d.brackets = {{0, 1, {{2, la::Rational(1)}}}};
    return must(d);
}

GradedLieAlgebra engel() {
    AlgebraData d;
    d.name = "engel";
    d.layers = {2, 1, 1};
    d.brackets = {{0, 1, {{2, la::Rational(1)}}}, {0, 2, {{3, la::Rational(1)}}}};
    return must(d);
}

GradedLieAlgebra free_two_step_3() {
    AlgebraData d;
    d.name = "free_two_step_3";
    d.layers = {3, 3};
    d.brackets = {{0, 1, {{3, la::Rational(1)}}},
                  {0, 2, {{4, la::Rational(1)}}},
                  {1, 2, {{5, la::Rational(1)}}}};
    return must(d);
}

GradedLieAlgebra abelian(int n) {
    AlgebraData d;
    d.name = "abelian" + std::to_string(n);
    d.layers = {n};
    return must(d);
}

}  // namespace rumin::carnot
