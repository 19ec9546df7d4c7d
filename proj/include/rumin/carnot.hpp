#pragma once
/* Stratified graded Lie algebras in a fixed graded basis, Carnot dilations,
 * graded homomorphisms, and the exact group law in exponential coordinates
 * (Dynkin series, which terminates at the nilpotency step). */

#include "rumin/linalg.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace rumin::carnot {

struct BracketEntry {
    int i, j;                            // 0-based, i < j
    std::map<int, la::Rational> coeffs;  // k -> c_{ij}^k, 0-based
};

struct AlgebraData {
    std::string name;
    std::vector<int> layers;
    std::vector<BracketEntry> brackets;
};

class GradedLieAlgebra {
public:
    std::string name;
    std::vector<int> layers;  // m_1 .. m_s
    int n = 0;
    std::vector<int> wt;      // weight of basis index (1-based weights)
    // c[{i,j}][k] with i < j; [e_i, e_j] = sum_k c e_k
    std::map<std::pair<int, int>, std::map<int, la::Rational>> c;

    int step() const { return int(layers.size()); }
    int hom_dim() const {
        int nu = 0;
        for (int l = 0; l < int(layers.size()); ++l) nu += (l + 1) * layers[size_t(l)];
        return nu;
    }
    // first basis index of layer l (1-based layer)
    int layer_start(int l) const {
        int s = 0;
        for (int t = 1; t < l; ++t) s += layers[size_t(t - 1)];
        return s;
    }
    la::Rational structure_const(int i, int j, int k) const;  // antisymmetric in (i, j)
    la::Vec bracket(const la::Vec& x, const la::Vec& y) const;
};

struct AlgebraViolation {
    std::string kind;  // MalformedInput | GradingViolation | JacobiViolation | StratificationViolation
    int i = -1, j = -1, k = -1;
    std::string detail;
};

struct AlgebraValidation {
    bool ok = false;
    std::vector<AlgebraViolation> violations;
    GradedLieAlgebra algebra;  // meaningful only when ok
};

AlgebraValidation validate_algebra(const AlgebraData& data);

// diag(t^{wt(i)}); throws std::invalid_argument for t = 0.
la::Matrix dilation(const GradedLieAlgebra& g, const la::Rational& t);

struct GradedHomomorphism {
    la::Matrix A;  // tgt.n x src.n
};

struct HomViolation {
    std::string kind;  // BlockViolation | BracketViolation | ShapeViolation
    int i = -1, j = -1;
};

struct HomValidation {
    bool ok = false;
    std::vector<HomViolation> violations;
    GradedHomomorphism hom;
};

HomValidation validate_homomorphism(const GradedLieAlgebra& src, const GradedLieAlgebra& tgt,
                                    const la::Matrix& A);

// Exact group product in exponential coordinates of the first kind.
la::Vec bch_multiply(const GradedLieAlgebra& g, const la::Vec& x, const la::Vec& y);
inline la::Vec group_inverse(const la::Vec& x) {
    la::Vec r(x);
    for (auto& v : r) v = -v;
    return r;
}

// ---- scalar-generic core -------------------------------------------------
// S needs +, -, *, and conv: Rational -> S. Used with Rational (exact points),
// double (numeric module) and polynomials (left-invariant vector fields).

template <class S, class Conv>
std::vector<S> bracket_generic(const GradedLieAlgebra& g, const std::vector<S>& x,
                               const std::vector<S>& y, Conv conv, const S& zero) {
    std::vector<S> r(size_t(g.n), zero);
    for (const auto& [ij, ks] : g.c) {
        S t = x[size_t(ij.first)] * y[size_t(ij.second)] - x[size_t(ij.second)] * y[size_t(ij.first)];
        for (const auto& [k, cc] : ks) r[size_t(k)] = r[size_t(k)] + conv(cc) * t;
    }
    return r;
}

namespace detail {
// Walk all Dynkin block sequences ((r_1,s_1),...,(r_nb,s_nb)), r_i+s_i >= 1,
// total word length <= max_len, calling fn(blocks).
template <class Fn>
void walk_blocks(std::vector<std::pair<int, int>>& blocks, int used, int max_len, Fn& fn) {
    if (!blocks.empty()) fn(blocks);
    if (used == max_len) return;
    for (int r = 0; r <= max_len - used; ++r)
        for (int s = 0; s <= max_len - used - r; ++s) {
            if (r + s == 0) continue;
            blocks.emplace_back(r, s);
            walk_blocks(blocks, used + r + s, max_len, fn);
            blocks.pop_back();
        }
}
}  // namespace detail

template <class S, class Conv>
std::vector<S> bch_generic(const GradedLieAlgebra& g, const std::vector<S>& x,
                           const std::vector<S>& y, Conv conv, const S& zero) {
    std::vector<S> total(size_t(g.n), zero);
    const int maxlen = g.step();
    // Dynkin series truncates at the step; spell out the low-step cases.
    if (maxlen <= 3) {
        for (int k = 0; k < g.n; ++k) total[size_t(k)] = x[size_t(k)] + y[size_t(k)];
        if (maxlen >= 2) {
            std::vector<S> xy = bracket_generic(g, x, y, conv, zero);
            S half = conv(la::Rational(1, 2));
            for (int k = 0; k < g.n; ++k)
                total[size_t(k)] = total[size_t(k)] + half * xy[size_t(k)];
            if (maxlen == 3) {
                std::vector<S> xxy = bracket_generic(g, x, xy, conv, zero);
                std::vector<S> yyx = bracket_generic(g, y, bracket_generic(g, y, x, conv, zero),
                                                     conv, zero);
                S tw = conv(la::Rational(1, 12));
                for (int k = 0; k < g.n; ++k)
                    total[size_t(k)] = total[size_t(k)] + tw * (xxy[size_t(k)] + yyx[size_t(k)]);
            }
        }
        return total;
    }
    auto process = [&](const std::vector<std::pair<int, int>>& blocks) {
        int m = 0;
        for (auto& [r, s] : blocks) m += r + s;
        std::vector<int> word;  // 0 = X, 1 = Y
        word.reserve(size_t(m));
        for (auto& [r, s] : blocks) {
            for (int t = 0; t < r; ++t) word.push_back(0);
            for (int t = 0; t < s; ++t) word.push_back(1);
        }
        // right-nested bracket [w0,[w1,[...,w_{m-1}]]]
        std::vector<S> B = word.back() == 0 ? x : y;
        for (int t = m - 2; t >= 0; --t)
            B = bracket_generic(g, word[size_t(t)] == 0 ? x : y, B, conv, zero);
        bool zero_term = true;
        if (m == 1) zero_term = false;
        else
            for (const auto& v : B)
                if (!(v == zero)) { zero_term = false; break; }
        if (zero_term) return;
        la::Rational denom = la::Rational(int(blocks.size())) * la::Rational(m);
        for (auto& [r, s] : blocks) denom *= la::factorial(r) * la::factorial(s);
        la::Rational coef = (blocks.size() % 2 == 1 ? la::Rational(1) : la::Rational(-1)) / denom;
        S cs = conv(coef);
        for (int k = 0; k < g.n; ++k) total[size_t(k)] = total[size_t(k)] + cs * B[size_t(k)];
    };
    std::vector<std::pair<int, int>> blocks;
    detail::walk_blocks(blocks, 0, maxlen, process);
    return total;
}

// ---- built-in examples ----------------------------------------------------
GradedLieAlgebra heisenberg();         // layers (2,1), [X1,X2] = X3
GradedLieAlgebra engel();              // layers (2,1,1), [X1,X2] = X3, [X1,X3] = X4
GradedLieAlgebra free_two_step_3();    // layers (3,3), brackets of generators
GradedLieAlgebra abelian(int n);       // layers (n)

}  // namespace rumin::carnot
