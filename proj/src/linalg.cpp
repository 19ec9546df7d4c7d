#include "rumin/linalg.hpp"

#include <sstream>

namespace rumin::la {

Rational Rational::parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("Rational: empty string");
    auto check_int = [](const std::string& t) {
        if (t.empty()) return false;
        size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (!isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    // gmp rejects a leading '+', so strip it after validating
    auto strip_plus = [](std::string t) { return t[0] == '+' ? t.substr(1) : t; };
    auto slash = s.find('/');
    if (slash == std::string::npos) {
        if (!check_int(s)) throw std::invalid_argument("Rational: bad literal '" + s + "'");
        return Rational(mpq_class(strip_plus(s)));
    }
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!check_int(num) || !check_int(den))
        throw std::invalid_argument("Rational: bad literal '" + s + "'");
    mpq_class q(strip_plus(num) + "/" + strip_plus(den));
    if (q.get_den() == 0) throw std::invalid_argument("Rational: zero denominator in '" + s + "'");
    q.canonicalize();
    return Rational(q);
}

Rational factorial(int n) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return Rational(mpq_class(f));
}

Vec operator+(const Vec& a, const Vec& b) {
    Vec r(a);
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

Vec operator-(const Vec& a, const Vec& b) {
    Vec r(a);
    for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

Vec operator*(const Rational& c, const Vec& v) {
    Vec r(v);
    for (auto& x : r) x *= c;
    return r;
}

Rational dot(const Vec& a, const Vec& b) {
    Rational s;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool is_zero(const Vec& v) {
    for (const auto& x : v)
        if (!x.is_zero()) return false;
    return true;
}

Vec zero_vec(int n) { return Vec(size_t(n)); }

Vec unit_vec(int n, int i) {
    Vec v(static_cast<size_t>(n));
    v[size_t(i)] = Rational(1);
    return v;
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = Rational(1);
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows, int cols) {
    Matrix m(int(rows.size()), cols);
    for (int i = 0; i < int(rows.size()); ++i) {
        if (int(rows[size_t(i)].size()) != cols)
            throw std::invalid_argument("Matrix::from_rows: ragged rows");
        for (int j = 0; j < cols; ++j) m.at(i, j) = rows[size_t(i)][size_t(j)];
    }
    return m;
}

Vec Matrix::row(int i) const {
    Vec v(static_cast<size_t>(cols_));
    for (int j = 0; j < cols_; ++j) v[size_t(j)] = at(i, j);
    return v;
}

Vec Matrix::col(int j) const {
    Vec v(static_cast<size_t>(rows_));
    for (int i = 0; i < rows_; ++i) v[size_t(i)] = at(i, j);
    return v;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("Matrix multiply: shape mismatch");
    Matrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Rational& a = at(i, k);
            if (a.is_zero()) continue;
            for (int j = 0; j < o.cols_; ++j) r.at(i, j) += a * o.at(k, j);
        }
    return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix add: shape mismatch");
    Matrix r(*this);
    for (size_t i = 0; i < e_.size(); ++i) r.e_[i] += o.e_[i];
    return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix sub: shape mismatch");
    Matrix r(*this);
    for (size_t i = 0; i < e_.size(); ++i) r.e_[i] -= o.e_[i];
    return r;
}

Matrix Matrix::scaled(const Rational& c) const {
    Matrix r(*this);
    for (auto& x : r.e_) x *= c;
    return r;
}

Vec Matrix::apply(const Vec& v) const {
    if (int(v.size()) != cols_) throw std::invalid_argument("Matrix apply: shape mismatch");
    Vec r(static_cast<size_t>(rows_));
    for (int i = 0; i < rows_; ++i) {
        Rational s;
        for (int j = 0; j < cols_; ++j) s += at(i, j) * v[size_t(j)];
        r[size_t(i)] = s;
    }
    return r;
}

bool Matrix::is_zero() const {
    for (const auto& x : e_)
        if (!x.is_zero()) return false;
    return true;
}

std::vector<int> Matrix::rref() {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < cols_ && r < rows_; ++c) {
        int sel = -1;
        for (int i = r; i < rows_; ++i)
            if (!at(i, c).is_zero()) { sel = i; break; }
        if (sel < 0) continue;
        if (sel != r)
            for (int j = 0; j < cols_; ++j) std::swap(at(sel, j), at(r, j));
        Rational inv = at(r, c).inv();
        for (int j = c; j < cols_; ++j) at(r, j) *= inv;
        for (int i = 0; i < rows_; ++i) {
            if (i == r || at(i, c).is_zero()) continue;
            Rational f = at(i, c);
            for (int j = c; j < cols_; ++j) at(i, j) -= f * at(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

int Matrix::rank() const {
    Matrix m(*this);
    return int(m.rref().size());
}

Matrix Matrix::inverse() const {
    if (rows_ != cols_) throw std::invalid_argument("Matrix inverse: not square");
    Matrix aug(rows_, 2 * cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
        aug.at(i, cols_ + i) = Rational(1);
    }
    auto piv = aug.rref();
    if (int(piv.size()) != rows_ || (rows_ > 0 && piv.back() >= cols_))
        throw std::invalid_argument("Matrix inverse: singular");
    Matrix inv(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) inv.at(i, j) = aug.at(i, cols_ + j);
    return inv;
}

std::string Matrix::str() const {
    std::ostringstream os;
    for (int i = 0; i < rows_; ++i) {
        os << (i == 0 ? "[" : " ");
        for (int j = 0; j < cols_; ++j) os << at(i, j).str() << (j + 1 < cols_ ? " " : "");
        os << (i + 1 < rows_ ? ";\n" : "]");
    }
    if (rows_ == 0) os << "[]";
    return os.str();
}

Subspace Subspace::span(int ambient, const std::vector<Vec>& vectors) {
    Matrix m = Matrix::from_rows(vectors, ambient);
    auto piv = m.rref();
    Subspace s(ambient);
    Matrix b(int(piv.size()), ambient);
    for (int i = 0; i < int(piv.size()); ++i)
        for (int j = 0; j < ambient; ++j) b.at(i, j) = m.at(i, j);
    s.basis_ = b;
    return s;
}

Subspace Subspace::full(int ambient) {
    Subspace s(ambient);
    s.basis_ = Matrix::identity(ambient);
    return s;
}

bool Subspace::contains(const Vec& v) const { return coords(v).has_value(); }

bool Subspace::contains(const Subspace& o) const {
    if (o.ambient_ != ambient_) return false;
    for (int i = 0; i < o.dim(); ++i)
        if (!contains(o.basis_vec(i))) return false;
    return true;
}

std::optional<Vec> Subspace::coords(const Vec& v) const {
    if (int(v.size()) != ambient_) throw std::invalid_argument("Subspace::coords: wrong ambient");
    // RREF rows: coefficient of row i is v[pivot_i]; verify the residual.
    Vec c(static_cast<size_t>(dim()));
    Vec residual = v;
    for (int i = 0; i < dim(); ++i) {
        int p = -1;
        for (int j = 0; j < ambient_; ++j)
            if (!basis_.at(i, j).is_zero()) { p = j; break; }
        c[size_t(i)] = residual[size_t(p)];
        if (!c[size_t(i)].is_zero())
            for (int j = p; j < ambient_; ++j) residual[size_t(j)] -= c[size_t(i)] * basis_.at(i, j);
    }
    if (!la::is_zero(residual)) return std::nullopt;
    return c;
}

Subspace Subspace::sum(const Subspace& o) const {
    if (o.ambient_ != ambient_) throw std::invalid_argument("Subspace::sum: ambient mismatch");
    std::vector<Vec> rows;
    for (int i = 0; i < dim(); ++i) rows.push_back(basis_vec(i));
    for (int i = 0; i < o.dim(); ++i) rows.push_back(o.basis_vec(i));
    return span(ambient_, rows);
}

Subspace Subspace::annihilator() const {
    // functionals vanishing on the span = kernel of basis matrix acting on columns
    return kernel_image(basis_).kernel;
}

Subspace Subspace::intersect(const Subspace& o) const {
    if (o.ambient_ != ambient_) throw std::invalid_argument("Subspace::intersect: ambient mismatch");
    return annihilator().sum(o.annihilator()).annihilator();
}

KernelImage kernel_image(const Matrix& m) {
    Matrix r(m);
    auto piv = r.rref();
    // kernel: one generator per free column
    std::vector<bool> is_piv(size_t(m.cols()), false);
    for (int p : piv) is_piv[size_t(p)] = true;
    std::vector<Vec> kgens;
    for (int c = 0; c < m.cols(); ++c) {
        if (is_piv[size_t(c)]) continue;
        Vec v = zero_vec(m.cols());
        v[size_t(c)] = Rational(1);
        for (int i = 0; i < int(piv.size()); ++i) v[size_t(piv[size_t(i)])] = -r.at(i, c);
        kgens.push_back(v);
    }
    KernelImage ki{Subspace::span(m.cols(), kgens), Subspace(m.rows())};
    std::vector<Vec> cols;
    for (int j = 0; j < m.cols(); ++j) cols.push_back(m.col(j));
    ki.image = Subspace::span(m.rows(), cols);
    return ki;
}

Subspace preimage(const Matrix& m, const Subspace& b) {
    if (m.rows() != b.ambient()) throw std::invalid_argument("preimage: shape mismatch");
    const Subspace ann = b.annihilator();
    if (ann.dim() == 0) return Subspace::full(m.cols());
    return kernel_image(ann.basis() * m).kernel;
}

Subspace image_of(const Matrix& m, const Subspace& s) {
    if (m.cols() != s.ambient()) throw std::invalid_argument("image_of: shape mismatch");
    std::vector<Vec> vs;
    for (int i = 0; i < s.dim(); ++i) vs.push_back(m.apply(s.basis_vec(i)));
    return Subspace::span(m.rows(), vs);
}

LatticeOps lattice_ops(const Subspace& a, const Subspace& b, const Matrix& m) {
    return LatticeOps{a.intersect(b), a.sum(b), preimage(m, b)};
}

Subspace annihilator(const Subspace& s) { return s.annihilator(); }

Vec QuotientSpace::lift(const Vec& cls) const {
    if (int(cls.size()) != dim()) throw std::invalid_argument("QuotientSpace::lift: wrong size");
    Vec v = zero_vec(ambient());
    for (int i = 0; i < dim(); ++i)
        if (!cls[size_t(i)].is_zero()) v = v + cls[size_t(i)] * representative(i);
    return v;
}

QuotientSpace quotient(const Subspace& num, const Subspace& den) {
    if (num.ambient() != den.ambient()) throw std::invalid_argument("quotient: ambient mismatch");
    for (int i = 0; i < den.dim(); ++i) {
        Vec v = den.basis_vec(i);
        if (!num.contains(v)) {
            std::ostringstream os;
            os << "quotient: denominator basis vector not inside numerator: [";
            for (size_t j = 0; j < v.size(); ++j) os << v[j].str() << (j + 1 < v.size() ? " " : "");
            os << "]";
            throw QuotientError(os.str(), v);
        }
    }
    const int amb = num.ambient();
    // Representatives: numerator basis vectors that extend the denominator.
    // Each added vector is independent of den + earlier picks, so the picks
    // descend to a basis of num/den.
    std::vector<Vec> ext;
    for (int i = 0; i < den.dim(); ++i) ext.push_back(den.basis_vec(i));
    std::vector<Vec> reps;
    for (int i = 0; i < num.dim(); ++i) {
        std::vector<Vec> trial = ext;
        trial.push_back(num.basis_vec(i));
        Matrix t = Matrix::from_rows(trial, amb);
        if (int(t.rref().size()) == int(ext.size()) + 1) {
            ext.push_back(num.basis_vec(i));
            reps.push_back(num.basis_vec(i));
        }
    }

    QuotientSpace q;
    q.numerator_ = num;
    q.denominator_ = den;
    q.reps_ = Matrix::from_rows(reps, amb);

    // Extend [reps; den] to an ambient basis with standard basis vectors, in
    // index order; projection reads off the rep-coordinates.
    const int qdim = int(reps.size());
    std::vector<Vec> basis_rows = reps;
    for (int i = 0; i < den.dim(); ++i) basis_rows.push_back(den.basis_vec(i));
    {
        Matrix acc = Matrix::from_rows(basis_rows, amb);
        acc.rref();
        int have = qdim + den.dim();
        for (int j = 0; j < amb && have < amb; ++j) {
            std::vector<Vec> trial = basis_rows;
            trial.push_back(unit_vec(amb, j));
            Matrix t = Matrix::from_rows(trial, amb);
            if (int(t.rref().size()) == have + 1) {
                basis_rows.push_back(unit_vec(amb, j));
                ++have;
            }
        }
    }
    Matrix M = Matrix::from_rows(basis_rows, amb);        // rows: ambient basis
    Matrix Minv = M.transpose().inverse();                // solves M^T c = v
    Matrix proj(qdim, amb);
    for (int i = 0; i < qdim; ++i)
        for (int j = 0; j < amb; ++j) proj.at(i, j) = Minv.at(i, j);
    q.proj_ = proj;
    return q;
}

}  // namespace rumin::la
