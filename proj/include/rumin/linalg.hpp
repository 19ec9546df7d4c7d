#pragma once
/* Exact linear algebra over Q: dense matrices, canonical RREF subspaces,
 * quotients with chosen representatives and projection. Subspace equality is
 * representation equality (reduced row echelon basis, no zero rows). */

#include "rumin/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rumin::la {

using Vec = std::vector<Rational>;

Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(const Rational& c, const Vec& v);
Rational dot(const Vec& a, const Vec& b);
bool is_zero(const Vec& v);
Vec zero_vec(int n);
Vec unit_vec(int n, int i);

class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), e_(size_t(rows) * cols) {}

    static Matrix identity(int n);
    static Matrix from_rows(const std::vector<Vec>& rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Rational& at(int i, int j) { return e_[size_t(i) * cols_ + j]; }
    const Rational& at(int i, int j) const { return e_[size_t(i) * cols_ + j]; }

    Vec row(int i) const;
    Vec col(int j) const;
    Matrix transpose() const;
    Matrix operator*(const Matrix& o) const;
    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix scaled(const Rational& c) const;
    Vec apply(const Vec& v) const;   // rows x cols times cols-vector
    bool operator==(const Matrix& o) const = default;
    bool is_zero() const;

    // In-place reduced row echelon form; returns pivot column indices.
    std::vector<int> rref();
    int rank() const;
    Matrix inverse() const;          // throws on singular / non-square

    std::string str() const;

private:
    int rows_, cols_;
    std::vector<Rational> e_;
};

class Subspace {
public:
    // Zero subspace of given ambient dimension.
    explicit Subspace(int ambient = 0) : ambient_(ambient), basis_(0, ambient) {}

    static Subspace span(int ambient, const std::vector<Vec>& vectors);
    static Subspace full(int ambient);

    int ambient() const { return ambient_; }
    int dim() const { return basis_.rows(); }
    const Matrix& basis() const { return basis_; }   // rows = canonical basis
    Vec basis_vec(int i) const { return basis_.row(i); }

    bool contains(const Vec& v) const;
    bool contains(const Subspace& o) const;
    bool operator==(const Subspace& o) const = default;

    // Coordinates of v in the canonical basis; nullopt if v is outside.
    std::optional<Vec> coords(const Vec& v) const;

    Subspace sum(const Subspace& o) const;
    Subspace intersect(const Subspace& o) const;
    // { functionals a : a.v = 0 for all v in this }, as subspace of the dual coordinates.
    Subspace annihilator() const;

private:
    int ambient_;
    Matrix basis_;
};

struct KernelImage {
    Subspace kernel;  // subspace of domain
    Subspace image;   // subspace of codomain
};
KernelImage kernel_image(const Matrix& m);

// m^{-1}(b) = { x : m x in b }.
Subspace preimage(const Matrix& m, const Subspace& b);

struct LatticeOps {
    Subspace intersection;
    Subspace sum;
    Subspace preimage;
};
LatticeOps lattice_ops(const Subspace& a, const Subspace& b, const Matrix& m);

// image of a subspace under m
Subspace image_of(const Matrix& m, const Subspace& s);

struct QuotientError : std::runtime_error {
    Vec offending;
    QuotientError(const std::string& what, Vec v) : std::runtime_error(what), offending(std::move(v)) {}
};

class QuotientSpace {
public:
    QuotientSpace() = default;

    int ambient() const { return numerator_.ambient(); }
    int dim() const { return reps_.rows(); }
    const Subspace& numerator() const { return numerator_; }
    const Subspace& denominator() const { return denominator_; }

    Vec representative(int i) const { return reps_.row(i); }
    const Matrix& representatives() const { return reps_; }
    // Linear map ambient -> Q^dim; on the numerator it is the quotient map in
    // the representative coordinates, and it annihilates the denominator.
    Vec project(const Vec& v) const { return proj_.apply(v); }
    const Matrix& projection() const { return proj_; }
    // Vector in the ambient space representing the class with given coordinates.
    Vec lift(const Vec& cls) const;

    bool operator==(const QuotientSpace& o) const = default;

    friend QuotientSpace quotient(const Subspace& num, const Subspace& den);

private:
    Subspace numerator_, denominator_;
    Matrix reps_;  // dim x ambient
    Matrix proj_;  // dim x ambient
};

// num/den; throws QuotientError naming the offending basis vector if den is not
// contained in num.
QuotientSpace quotient(const Subspace& num, const Subspace& den);

Subspace annihilator(const Subspace& s);

}  // namespace rumin::la
