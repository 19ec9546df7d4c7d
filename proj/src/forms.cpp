#include "rumin/forms.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace rumin::forms {

using la::Matrix;
using la::Rational;
using la::Subspace;
using la::Vec;
using filtered::FilteredComplex;

std::string Mono::str() const {
    std::string out;
    for (size_t i = 0; i < e.size(); ++i) {
        if (!e[i]) continue;
        if (!out.empty()) out += "*";
        out += "x" + std::to_string(i + 1);
        if (e[i] > 1) out += "^" + std::to_string(e[i]);
    }
    return out.empty() ? "1" : out;
}

Poly Poly::constant(int n, const Rational& c) {
    Poly p = zero(n);
    if (!c.is_zero()) p.t[Mono::one(n)] = c;
    return p;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r(*this);
    for (const auto& [m, c] : o.t) {
        auto [it, fresh] = r.t.try_emplace(m, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) r.t.erase(it);
        }
    }
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + o.scaled(Rational(-1)); }

Poly Poly::operator*(const Poly& o) const {
    Poly r = zero(n);
    for (const auto& [ma, ca] : t)
        for (const auto& [mb, cb] : o.t) {
            Mono m = ma * mb;
            auto [it, fresh] = r.t.try_emplace(m, ca * cb);
            if (!fresh) {
                it->second += ca * cb;
                if (it->second.is_zero()) r.t.erase(it);
            }
        }
    return r;
}

Poly Poly::operator*(const Mono& m) const {
    Poly r = zero(n);
    for (const auto& [ma, ca] : t) r.t[ma * m] = ca;
    return r;
}

Poly Poly::scaled(const Rational& c) const {
    Poly r = zero(n);
    if (c.is_zero()) return r;
    for (const auto& [m, cc] : t) r.t[m] = c * cc;
    return r;
}

Poly Poly::deriv(int i) const {
    Poly r = zero(n);
    for (const auto& [m, c] : t) {
        int ex = m.e[size_t(i)];
        if (!ex) continue;
        Mono d = m;
        d.e[size_t(i)] -= 1;
        r.t[d] = c * Rational(ex);
    }
    return r;
}

Rational Poly::eval(const Vec& x) const {
    Rational acc(0);
    for (const auto& [m, c] : t) {
        Rational v = c;
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < m.e[size_t(i)]; ++a) v *= x[size_t(i)];
        acc += v;
    }
    return acc;
}

double Poly::eval_d(const std::vector<double>& x) const {
    double acc = 0;
    for (const auto& [m, c] : t) {
        double v = c.to_double();
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < m.e[size_t(i)]; ++a) v *= x[size_t(i)];
        acc += v;
    }
    return acc;
}

std::string Poly::str() const {
    if (t.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : t) {
        if (!out.empty()) out += " + ";
        if (m.is_one()) out += c.str();
        else if (c == Rational(1)) out += m.str();
        else out += c.str() + "*" + m.str();
    }
    return out;
}

std::string MultiIndex::str() const {
    if (idx.empty()) return "1";
    bool small = idx.back() <= 9;
    std::string out = "t";
    for (size_t a = 0; a < idx.size(); ++a) {
        if (a && !small) out += ",";
        out += std::to_string(idx[a]);
    }
    return out;
}

std::optional<std::pair<MultiIndex, int>> sort_word(const std::vector<int>& word) {
    std::vector<int> w = word;
    int sign = 1;
    for (size_t i = 1; i < w.size(); ++i)
        for (size_t j = i; j > 0 && w[j] <= w[j - 1]; --j) {
            if (w[j] == w[j - 1]) return std::nullopt;
            std::swap(w[j], w[j - 1]);
            sign = -sign;
        }
    return std::pair{MultiIndex{std::move(w)}, sign};
}

ExteriorElement ExteriorElement::theta(int n, const MultiIndex& J) {
    return monomial(n, J, Mono::one(n), Rational(1));
}

ExteriorElement ExteriorElement::monomial(int n, const MultiIndex& J, const Mono& m,
                                          const Rational& c) {
    ExteriorElement a = zero(n, J.degree());
    if (!c.is_zero()) a.terms[{J, m}] = c;
    return a;
}

bool ExteriorElement::constant_coeff() const {
    for (const auto& [key, c] : terms)
        if (!key.second.is_one()) return false;
    return true;
}

void ExteriorElement::add_term(const MultiIndex& J, const Mono& m, const Rational& c) {
    if (J.degree() != k) throw std::logic_error("ExteriorElement: degree mismatch");
    if (c.is_zero()) return;
    auto [it, fresh] = terms.try_emplace({J, m}, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) terms.erase(it);
    }
}

ExteriorElement ExteriorElement::operator+(const ExteriorElement& o) const {
    if (n != o.n || k != o.k) throw std::logic_error("ExteriorElement: shape mismatch");
    ExteriorElement r(*this);
    for (const auto& [key, c] : o.terms) r.add_term(key.first, key.second, c);
    return r;
}

ExteriorElement ExteriorElement::operator-(const ExteriorElement& o) const {
    return *this + o.scaled(Rational(-1));
}

ExteriorElement ExteriorElement::scaled(const Rational& c) const {
    ExteriorElement r = zero(n, k);
    if (c.is_zero()) return r;
    for (const auto& [key, cc] : terms) r.terms[key] = c * cc;
    return r;
}

std::optional<int> ExteriorElement::min_form_weight(const carnot::GradedLieAlgebra& g) const {
    std::optional<int> w;
    for (const auto& [key, c] : terms) {
        int v = key.first.weight(g);
        if (!w || v < *w) w = v;
    }
    return w;
}

bool ExteriorElement::form_homogeneous(const carnot::GradedLieAlgebra& g, int w) const {
    for (const auto& [key, c] : terms)
        if (key.first.weight(g) != w) return false;
    return true;
}

std::string ExteriorElement::str() const {
    if (terms.empty()) return "0";
    std::string out;
    for (const auto& [key, c] : terms) {
        if (!out.empty()) out += " + ";
        std::string ms = key.second.str(), js = key.first.str();
        std::string body = ms == "1" ? js : (js == "1" ? ms : ms + "*" + js);
        if (c == Rational(1) && body != "1") out += body;
        else if (body == "1") out += c.str();
        else out += c.str() + "*" + body;
    }
    return out;
}

ExteriorElement wedge(const ExteriorElement& a, const ExteriorElement& b) {
    if (a.n != b.n) throw std::logic_error("wedge: different algebras");
    int k = a.k + b.k;
    if (k > a.n)
        throw DegreeOverflow("wedge: degree " + std::to_string(a.k) + " + " + std::to_string(b.k) +
                             " exceeds " + std::to_string(a.n));
    ExteriorElement r = ExteriorElement::zero(a.n, k);
    for (const auto& [ka, ca] : a.terms)
        for (const auto& [kb, cb] : b.terms) {
            std::vector<int> word = ka.first.idx;
            word.insert(word.end(), kb.first.idx.begin(), kb.first.idx.end());
            auto sw = sort_word(word);
            if (!sw) continue;
            r.add_term(sw->first, ka.second * kb.second, ca * cb * Rational(sw->second));
        }
    return r;
}

LeftInvariantFields left_invariant_fields(const carnot::GradedLieAlgebra& g) {
    const int n = g.n;
    std::vector<Poly> x, y;
    for (int i = 0; i < n; ++i) x.push_back(Poly::var(2 * n, i));
    for (int i = 0; i < n; ++i) y.push_back(Poly::var(2 * n, n + i));
    auto conv = [&](const Rational& r) { return Poly::constant(2 * n, r); };
    auto z = carnot::bch_generic<Poly>(g, x, y, conv, Poly::zero(2 * n));
    LeftInvariantFields F;
    F.P.assign(size_t(n), std::vector<Poly>(size_t(n), Poly::zero(n)));
    // X_i at x is the y-derivative of x * y along e_i at y = 0: keep the
    // y-linear part of the group law and read off its coefficient.
    for (int kk = 0; kk < n; ++kk)
        for (const auto& [m, c] : z[size_t(kk)].t) {
            int ydeg = 0, yi = -1;
            for (int j = 0; j < n; ++j)
                if (m.e[size_t(n + j)] > 0) {
                    ydeg += m.e[size_t(n + j)];
                    yi = j;
                }
            if (ydeg != 1) continue;
            Mono mx = Mono::one(n);
            for (int j = 0; j < n; ++j) mx.e[size_t(j)] = m.e[size_t(j)];
            F.P[size_t(kk)][size_t(yi)] = F.P[size_t(kk)][size_t(yi)] + Poly::constant(n, c) * mx;
        }
    return F;
}

ExteriorElement ce_differential(const carnot::GradedLieAlgebra& g, const ExteriorElement& a) {
    return ce_differential_with(left_invariant_fields(g), g, a);
}

ExteriorElement ce_differential_with(const LeftInvariantFields& F, const carnot::GradedLieAlgebra& g,
                                     const ExteriorElement& a) {
    const int n = a.n;
    ExteriorElement out = ExteriorElement::zero(n, a.k + 1);
    for (const auto& [key, c] : a.terms) {
        const auto& [J, m] = key;
        // frame derivatives of the coefficient
        for (int i = 0; i < n; ++i) {
            Poly Xi = Poly::zero(n);
            for (int kk = 0; kk < n; ++kk) {
                int ex = m.e[size_t(kk)];
                if (!ex) continue;
                Mono d = m;
                d.e[size_t(kk)] -= 1;
                Xi = Xi + (F.P[size_t(kk)][size_t(i)] * d).scaled(Rational(ex));
            }
            if (Xi.is_zero()) continue;
            std::vector<int> word{i + 1};
            word.insert(word.end(), J.idx.begin(), J.idx.end());
            auto sw = sort_word(word);
            if (!sw) continue;
            for (const auto& [mm, cc] : Xi.t)
                out.add_term(sw->first, mm, c * cc * Rational(sw->second));
        }
        // d theta_{j_a} inserted in place, with the antiderivation sign
        for (int apos = 0; apos < J.degree(); ++apos) {
            int ja = J.idx[size_t(apos)];
            Rational slot = apos % 2 == 0 ? Rational(1) : Rational(-1);
            for (const auto& [ij, ks] : g.c) {
                auto it = ks.find(ja - 1);
                if (it == ks.end()) continue;
                std::vector<int> word;
                for (int t = 0; t < apos; ++t) word.push_back(J.idx[size_t(t)]);
                word.push_back(ij.first + 1);
                word.push_back(ij.second + 1);
                for (int t = apos + 1; t < J.degree(); ++t) word.push_back(J.idx[size_t(t)]);
                auto sw = sort_word(word);
                if (!sw) continue;
                out.add_term(sw->first, m, c * slot * (-it->second) * Rational(sw->second));
            }
        }
    }
    return out;
}

Rational wedge_pairing(const carnot::GradedLieAlgebra& g, const ExteriorElement& a,
                       const ExteriorElement& b) {
    if (a.n != g.n || b.n != g.n || a.k + b.k != g.n)
        throw std::invalid_argument("wedge_pairing: degrees must be complementary");
    if (!a.constant_coeff() || !b.constant_coeff())
        throw std::invalid_argument("wedge_pairing: constant coefficients required");
    ExteriorElement w = wedge(a, b);
    std::vector<int> full(size_t(g.n));
    for (int i = 0; i < g.n; ++i) full[size_t(i)] = i + 1;
    auto it = w.terms.find({MultiIndex{full}, Mono::one(g.n)});
    return it == w.terms.end() ? Rational(0) : it->second;
}

ExteriorElement pullback_form(const carnot::GradedLieAlgebra& src, const carnot::GradedLieAlgebra& tgt,
                              const carnot::GradedHomomorphism& h, const ExteriorElement& a) {
    if (a.n != tgt.n) throw std::invalid_argument("pullback_form: form not on the target");
    if (h.A.rows() != tgt.n || h.A.cols() != src.n)
        throw std::invalid_argument("pullback_form: homomorphism shape mismatch");
    if (!a.constant_coeff())
        throw std::invalid_argument("pullback_form: constant coefficients required");
    ExteriorElement out = ExteriorElement::zero(src.n, a.k);
    for (const auto& [key, c] : a.terms) {
        ExteriorElement prod =
            ExteriorElement::monomial(src.n, MultiIndex{}, Mono::one(src.n), c);
        for (int j : key.first.idx) {
            ExteriorElement factor = ExteriorElement::zero(src.n, 1);
            for (int i = 0; i < src.n; ++i)
                factor.add_term(MultiIndex{{i + 1}}, Mono::one(src.n), h.A.at(j - 1, i));
            prod = wedge(prod, factor);
            if (prod.is_zero()) break;
        }
        out = out + prod;
    }
    return out;
}

int BasisDictionary::index_of(int k, const MultiIndex& J, const Mono& m) const {
    const auto& mp = index[size_t(k)];
    auto it = mp.find({J, m});
    if (it == mp.end()) throw std::logic_error("basis lookup failed in degree " + std::to_string(k));
    return it->second;
}

std::string BasisDictionary::label(int k, int i) const {
    const auto& [J, m] = basis[size_t(k)][size_t(i)];
    std::string ms = m.str(), js = J.str();
    if (ms == "1") return js;
    if (js == "1") return ms;
    return ms + "*" + js;
}

Vec BasisDictionary::coords(const ExteriorElement& a) const {
    Vec v = la::zero_vec(dim(a.k));
    for (const auto& [key, c] : a.terms) {
        const auto& mp = index[size_t(a.k)];
        auto it = mp.find(key);
        if (it == mp.end()) throw std::invalid_argument("element outside the model basis");
        v[size_t(it->second)] = c;
    }
    return v;
}

ExteriorElement BasisDictionary::element(int n, int k, const Vec& v) const {
    if (int(v.size()) != dim(k)) throw std::invalid_argument("coordinate length mismatch");
    ExteriorElement a = ExteriorElement::zero(n, k);
    for (size_t i = 0; i < v.size(); ++i)
        if (!v[i].is_zero())
            a.add_term(basis[size_t(k)][i].first, basis[size_t(k)][i].second, v[i]);
    return a;
}

namespace {

std::vector<MultiIndex> all_multiindices(int n, int k) {
    std::vector<MultiIndex> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (int(cur.size()) == k) {
            out.push_back(MultiIndex{cur});
            return;
        }
        for (int v = start; v <= n; ++v) {
            cur.push_back(v);
            rec(v + 1);
            cur.pop_back();
        }
    };
    rec(1);
    return out;
}

ComplexBuild build_with_monos(const carnot::GradedLieAlgebra& g, std::vector<Mono> monos,
                              const std::string& model) {
    const int n = g.n, nu = g.hom_dim();
    std::sort(monos.begin(), monos.end());
    ComplexBuild b;
    b.alg = g;
    b.nu = nu;
    b.model = model;
    b.dict.basis.resize(size_t(n + 1));
    b.dict.index.resize(size_t(n + 1));
    std::vector<int> dims;
    // basis order: wt(J) descending, then J, then the monomial, so every
    // filtration step is a coordinate prefix
    for (int k = 0; k <= n; ++k) {
        auto Js = all_multiindices(n, k);
        std::stable_sort(Js.begin(), Js.end(), [&](const MultiIndex& x, const MultiIndex& y) {
            int wx = x.weight(g), wy = y.weight(g);
            if (wx != wy) return wx > wy;
            return x < y;
        });
        for (const auto& J : Js)
            for (const auto& m : monos) {
                b.dict.index[size_t(k)][{J, m}] = int(b.dict.basis[size_t(k)].size());
                b.dict.basis[size_t(k)].push_back({J, m});
            }
        dims.push_back(int(b.dict.basis[size_t(k)].size()));
    }
    auto F = left_invariant_fields(g);
    std::vector<Matrix> diffs;
    for (int k = 0; k < n; ++k) {
        Matrix d(dims[size_t(k + 1)], dims[size_t(k)]);
        for (int s = 0; s < dims[size_t(k)]; ++s) {
            const auto& [J, m] = b.dict.basis[size_t(k)][size_t(s)];
            auto img = ce_differential_with(F, g, ExteriorElement::monomial(n, J, m, Rational(1)));
            for (const auto& [key, c] : img.terms)
                d.at(b.dict.index_of(k + 1, key.first, key.second), s) = c;
        }
        diffs.push_back(std::move(d));
    }
    std::vector<std::vector<Subspace>> steps(size_t(n + 1));
    for (int k = 0; k <= n; ++k) {
        for (int p = 0; p <= nu; ++p) {
            int cnt = 0;
            while (cnt < dims[size_t(k)] &&
                   b.dict.basis[size_t(k)][size_t(cnt)].first.weight(g) >= p)
                ++cnt;
            std::vector<Vec> units;
            for (int i = 0; i < cnt; ++i) units.push_back(la::unit_vec(dims[size_t(k)], i));
            steps[size_t(k)].push_back(Subspace::span(dims[size_t(k)], units));
        }
    }
    b.wc.fc = FilteredComplex::make(filtered::Orient::cochain, 0, dims, std::move(diffs), 0,
                                    std::move(steps));
    b.wc.grading.resize(size_t(n + 1));
    for (int k = 0; k <= n; ++k) {
        int i = 0;
        while (i < dims[size_t(k)]) {
            int w = b.dict.basis[size_t(k)][size_t(i)].first.weight(g);
            std::vector<Vec> units;
            int j = i;
            while (j < dims[size_t(k)] && b.dict.basis[size_t(k)][size_t(j)].first.weight(g) == w)
                units.push_back(la::unit_vec(dims[size_t(k)], j++));
            b.wc.grading[size_t(k)].push_back({w, Subspace::span(dims[size_t(k)], units)});
            i = j;
        }
    }
    return b;
}

}  // namespace

ComplexBuild build_ce_complex(const carnot::GradedLieAlgebra& g) {
    return build_with_monos(g, {Mono::one(g.n)}, "ce");
}

ComplexBuild build_polynomial_complex(const carnot::GradedLieAlgebra& g, int D) {
    if (D < 0) throw std::invalid_argument("polynomial weight bound must be nonnegative");
    std::vector<Mono> monos;
    Mono cur = Mono::one(g.n);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == g.n) {
            monos.push_back(cur);
            return;
        }
        for (int ex = 0; ex * g.wt[size_t(i)] <= left; ++ex) {
            cur.e[size_t(i)] = ex;
            rec(i + 1, left - ex * g.wt[size_t(i)]);
        }
        cur.e[size_t(i)] = 0;
    };
    rec(0, D);
    return build_with_monos(g, std::move(monos), "poly" + std::to_string(D));
}

ChainModelBuild chain_model(const ComplexBuild& b) {
    const int n = b.alg.n, nu = b.nu;
    ChainModelBuild ch;
    ch.n = n;
    ch.nu = nu;
    std::vector<int> dims;
    for (int j = 0; j <= n; ++j) dims.push_back(b.wc.fc.dim(n - j));
    // boundary across edge t is (-1)^{t+1} d^{n-t-1}: with this sign the
    // transpose of the boundary is exactly the dual differential
    std::vector<Matrix> diffs;
    for (int t = 0; t < n; ++t) {
        Matrix m = b.wc.fc.d_from(n - t - 1);
        diffs.push_back((t + 1) % 2 == 0 ? m : m.scaled(Rational(-1)));
    }
    std::vector<std::vector<Subspace>> steps(size_t(n + 1));
    for (int j = 0; j <= n; ++j)
        for (int p = -1; p <= nu; ++p) steps[size_t(j)].push_back(b.wc.fc.filtration(n - j, nu - p));
    ch.wc.fc = FilteredComplex::make(filtered::Orient::chain, 0, dims, std::move(diffs), -1,
                                     std::move(steps));
    for (int j = 0; j <= n; ++j) ch.wc.grading.push_back(b.wc.grading[size_t(n - j)]);
    ch.dict.basis.resize(size_t(n + 1));
    ch.dict.index.resize(size_t(n + 1));
    for (int j = 0; j <= n; ++j) {
        ch.dict.basis[size_t(j)] = b.dict.basis[size_t(n - j)];
        ch.dict.index[size_t(j)] = b.dict.index[size_t(n - j)];
    }
    return ch;
}

Matrix wedge_duality_matrix(const ComplexBuild& co, const ChainModelBuild& ch, int k) {
    const auto& g = co.alg;
    int rows = ch.wc.fc.dim(k), cols = co.wc.fc.dim(k);
    Matrix F(rows, cols);
    for (int s = 0; s < cols; ++s) {
        const auto& [J, m] = co.dict.basis[size_t(k)][size_t(s)];
        auto a = ExteriorElement::monomial(g.n, J, m, Rational(1));
        for (int i = 0; i < rows; ++i) {
            const auto& [Ji, mi] = ch.dict.basis[size_t(k)][size_t(i)];
            F.at(i, s) = wedge_pairing(g, a, ExteriorElement::monomial(g.n, Ji, mi, Rational(1)));
        }
    }
    return F;
}

}  // namespace rumin::forms
