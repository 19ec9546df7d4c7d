#pragma once
/* Exterior algebra over the dual of a graded Lie algebra, with polynomial
 * coefficients in exponential coordinates. Form-weight of theta_J is the sum
 * of the layer weights of J; polynomial weight of a monomial is the weighted
 * degree. The differential is the Chevalley-Eilenberg one extended by the
 * left-invariant frame: d(a theta_J) = sum_i X_i(a) theta_i ^ theta_J + a d theta_J,
 * with d theta_k = -sum_{i<j} c_{ij}^k theta_i ^ theta_j. */

#include "rumin/carnot.hpp"
#include "rumin/filtered.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rumin::forms {

struct Mono {
    std::vector<int> e;  // exponents of x_1..x_n

    static Mono one(int n) { return Mono{std::vector<int>(size_t(n), 0)}; }
    static Mono var(int n, int i) {
        Mono m = one(n);
        m.e[size_t(i)] = 1;
        return m;
    }
    bool is_one() const {
        for (int v : e)
            if (v) return false;
        return true;
    }
    int poly_weight(const carnot::GradedLieAlgebra& g) const {
        int w = 0;
        for (size_t i = 0; i < e.size(); ++i) w += e[i] * g.wt[i];
        return w;
    }
    Mono operator*(const Mono& o) const {
        Mono m(*this);
        for (size_t i = 0; i < e.size(); ++i) m.e[i] += o.e[i];
        return m;
    }
    auto operator<=>(const Mono&) const = default;
    std::string str() const;
};

struct Poly {
    int n = 0;
    std::map<Mono, la::Rational> t;

    static Poly zero(int n) { return Poly{n, {}}; }
    static Poly constant(int n, const la::Rational& c);
    static Poly var(int n, int i) { return constant(n, la::Rational(1)) * Mono::var(n, i); }

    bool is_zero() const { return t.empty(); }
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(const Mono& m) const;
    Poly scaled(const la::Rational& c) const;
    Poly deriv(int i) const;  // d/dx_{i+1}
    bool operator==(const Poly& o) const = default;

    la::Rational eval(const la::Vec& x) const;
    double eval_d(const std::vector<double>& x) const;
    std::string str() const;
};

struct MultiIndex {
    std::vector<int> idx;  // strictly increasing, 1-based

    int degree() const { return int(idx.size()); }
    int weight(const carnot::GradedLieAlgebra& g) const {
        int w = 0;
        for (int i : idx) w += g.wt[size_t(i - 1)];
        return w;
    }
    auto operator<=>(const MultiIndex&) const = default;
    std::string str() const;  // "t13", "1" when empty
};

// Sort a wedge word into a strictly increasing multiindex; nullopt if an index
// repeats, otherwise the permutation sign.
std::optional<std::pair<MultiIndex, int>> sort_word(const std::vector<int>& word);

struct DegreeOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExteriorElement {
    int n = 0, k = 0;
    std::map<std::pair<MultiIndex, Mono>, la::Rational> terms;

    static ExteriorElement zero(int n, int k) { return ExteriorElement{n, k, {}}; }
    static ExteriorElement theta(int n, const MultiIndex& J);
    static ExteriorElement monomial(int n, const MultiIndex& J, const Mono& m, const la::Rational& c);

    bool is_zero() const { return terms.empty(); }
    bool constant_coeff() const;
    void add_term(const MultiIndex& J, const Mono& m, const la::Rational& c);
    ExteriorElement operator+(const ExteriorElement& o) const;
    ExteriorElement operator-(const ExteriorElement& o) const;
    ExteriorElement scaled(const la::Rational& c) const;
    bool operator==(const ExteriorElement& o) const = default;

    // smallest wt(J) over terms; nullopt for the zero element
    std::optional<int> min_form_weight(const carnot::GradedLieAlgebra& g) const;
    bool form_homogeneous(const carnot::GradedLieAlgebra& g, int w) const;
    std::string str() const;
};

ExteriorElement wedge(const ExteriorElement& a, const ExteriorElement& b);

// Coefficient fields of the left-invariant frame: X_i = sum_k P[k][i] d/dx_k,
// obtained from the y-linear part of the group law z = x * y.
struct LeftInvariantFields {
    std::vector<std::vector<Poly>> P;  // n x n, polynomials in x
};
LeftInvariantFields left_invariant_fields(const carnot::GradedLieAlgebra& g);

ExteriorElement ce_differential(const carnot::GradedLieAlgebra& g, const ExteriorElement& a);
ExteriorElement ce_differential_with(const LeftInvariantFields& F, const carnot::GradedLieAlgebra& g,
                                     const ExteriorElement& a);

// Coefficient of the top form theta_{1..n} in a ^ b; requires constant
// coefficients and complementary degrees.
la::Rational wedge_pairing(const carnot::GradedLieAlgebra& g, const ExteriorElement& a,
                           const ExteriorElement& b);

// Pullback along a graded homomorphism h: src -> tgt of a constant-coefficient
// form on tgt; h^* theta'_k = sum_i A_{ki} theta_i.
ExteriorElement pullback_form(const carnot::GradedLieAlgebra& src, const carnot::GradedLieAlgebra& tgt,
                              const carnot::GradedHomomorphism& h, const ExteriorElement& a);

struct BasisDictionary {
    // per degree (from degree 0): ordered basis labels
    std::vector<std::vector<std::pair<MultiIndex, Mono>>> basis;
    std::vector<std::map<std::pair<MultiIndex, Mono>, int>> index;

    int dim(int k) const {
        return (k < 0 || k >= int(basis.size())) ? 0 : int(basis[size_t(k)].size());
    }
    int index_of(int k, const MultiIndex& J, const Mono& m) const;
    std::string label(int k, int i) const;
    la::Vec coords(const ExteriorElement& a) const;  // in degree a.k
    ExteriorElement element(int n, int k, const la::Vec& v) const;
};

struct ComplexBuild {
    carnot::GradedLieAlgebra alg;
    filtered::WeightedComplex wc;  // cochain, degrees 0..n, filtered by form-weight
    BasisDictionary dict;
    int nu = 0;
    std::string model;  // "ce" | "poly<D>"
};

ComplexBuild build_ce_complex(const carnot::GradedLieAlgebra& g);
ComplexBuild build_polynomial_complex(const carnot::GradedLieAlgebra& g, int D);

// Chain model of a cochain build: C_j := C^{n-j}, boundary (-1)^j d, ascending
// filtration F_p := F^{nu-p}, weight pieces carried over.
struct ChainModelBuild {
    filtered::WeightedComplex wc;  // chain
    BasisDictionary dict;          // chain degree j holds the basis of C^{n-j}
    int nu = 0, n = 0;
};
ChainModelBuild chain_model(const ComplexBuild& b);

// Matrix of the wedge-pairing embedding in degree k: (dim C_k) x (dim C'^k),
// entry (i, s) = wedge_pairing(cochain basis_s of degree k, chain basis_i).
la::Matrix wedge_duality_matrix(const ComplexBuild& co, const ChainModelBuild& ch, int k);

}  // namespace rumin::forms
