#include "rumin/numeric.hpp"

#include <algorithm>
#include <cfloat>
#include <climits>
#include <cmath>
#include <memory>

namespace rumin::numeric {

namespace {

double rat_to_double(const la::Rational& r) { return r.to_double(); }

double ipow(double t, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= t;
    return r;
}

}  // namespace

DVec dilate(const carnot::GradedLieAlgebra& g, double t, const DVec& x) {
    DVec r(x);
    for (int i = 0; i < g.n; ++i) r[size_t(i)] *= ipow(t, g.wt[size_t(i)]);
    return r;
}

DVec group_mul(const carnot::GradedLieAlgebra& g, const DVec& x, const DVec& y) {
    return carnot::bch_generic<double>(g, x, y, rat_to_double, 0.0);
}

DVec group_inv(const DVec& x) {
    DVec r(x);
    for (auto& v : r) v = -v;
    return r;
}

// ---- map catalog -----------------------------------------------------------

SmoothMap map_dilation(const carnot::GradedLieAlgebra& g, double t) {
    SmoothMap m;
    m.id = "dilation";
    m.g = g;
    m.eval = [g, t](const DVec& x) { return dilate(g, t, x); };
    m.exact_dp = [g, t](const DVec&) {
        DMat a(size_t(g.n), DVec(size_t(g.n), 0.0));
        for (int i = 0; i < g.n; ++i) a[size_t(i)][size_t(i)] = ipow(t, g.wt[size_t(i)]);
        return a;
    };
    return m;
}

SmoothMap map_left_translation(const carnot::GradedLieAlgebra& g, const DVec& a) {
    SmoothMap m;
    m.id = "left-translation";
    m.g = g;
    m.eval = [g, a](const DVec& x) { return group_mul(g, a, x); };
    m.exact_dp = [g](const DVec&) {
        DMat e(size_t(g.n), DVec(size_t(g.n), 0.0));
        for (int i = 0; i < g.n; ++i) e[size_t(i)][size_t(i)] = 1.0;
        return e;
    };
    return m;
}

SmoothMap map_automorphism(const carnot::GradedLieAlgebra& g, const DMat& A,
                           const std::string& id) {
    SmoothMap m;
    m.id = id;
    m.g = g;
    m.eval = [A](const DVec& x) {
        DVec r(A.size(), 0.0);
        for (size_t i = 0; i < A.size(); ++i)
            for (size_t j = 0; j < x.size(); ++j) r[i] += A[i][j] * x[j];
        return r;
    };
    m.exact_dp = [A](const DVec&) { return A; };
    return m;
}

SmoothMap heisenberg_shear(const std::string& profile) {
    std::function<double(double)> psi, dpsi, S;
    if (profile == "square") {
        psi = [](double u) { return u * u; };
        dpsi = [](double u) { return 2.0 * u; };
        S = [](double u) { return -u * u * u / 6.0; };
    } else if (profile == "sine") {
        psi = [](double u) { return std::sin(u); };
        dpsi = [](double u) { return std::cos(u); };
        S = [](double u) { return (1.0 - std::cos(u)) - u * std::sin(u) / 2.0; };
    } else {
        throw std::invalid_argument("heisenberg_shear: unknown profile " + profile);
    }
    SmoothMap m;
    m.id = "shear-" + profile;
    m.g = carnot::heisenberg();
    // S' = psi/2 - x2 psi'/2 keeps the contact form: F*theta3 = theta3.
    m.eval = [psi, S](const DVec& x) {
        return DVec{x[0] + psi(x[1]), x[1], x[2] + S(x[1])};
    };
    m.exact_dp = [dpsi](const DVec& x) {
        return DMat{{1.0, dpsi(x[1]), 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
    };
    return m;
}

// ---- Pansu difference quotients ---------------------------------------------

namespace {

DMat fd_quotient(const SmoothMap& f, const DVec& x, double t) {
    const auto& g = f.g;
    const int n = g.n;
    const DVec fin = group_inv(f.eval(x));
    DMat q(size_t(n), DVec(size_t(n), 0.0));
    for (int i = 0; i < n; ++i) {
        DVec e(size_t(n), 0.0);
        e[size_t(i)] = ipow(t, g.wt[size_t(i)]);
        const DVec d = group_mul(g, fin, f.eval(group_mul(g, x, e)));
        for (int r = 0; r < n; ++r) q[size_t(r)][size_t(i)] = d[size_t(r)] / ipow(t, g.wt[size_t(r)]);
    }
    return q;
}

double block_defect_of(const carnot::GradedLieAlgebra& g, const DMat& a) {
    double m = 0;
    for (int r = 0; r < g.n; ++r)
        for (int c = 0; c < g.n; ++c)
            if (g.wt[size_t(r)] != g.wt[size_t(c)]) m = std::max(m, std::abs(a[size_t(r)][size_t(c)]));
    return m;
}

double bracket_defect_of(const carnot::GradedLieAlgebra& g, const DMat& a) {
    const int n = g.n;
    double m = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            DVec u(static_cast<size_t>(n)), v(static_cast<size_t>(n)), ei(size_t(n), 0.0), ej(size_t(n), 0.0);
            for (int r = 0; r < n; ++r) {
                u[size_t(r)] = a[size_t(r)][size_t(i)];
                v[size_t(r)] = a[size_t(r)][size_t(j)];
            }
            ei[size_t(i)] = 1.0;
            ej[size_t(j)] = 1.0;
            const DVec b1 = carnot::bracket_generic<double>(g, u, v, rat_to_double, 0.0);
            const DVec w = carnot::bracket_generic<double>(g, ei, ej, rat_to_double, 0.0);
            for (int r = 0; r < n; ++r) {
                double ar = 0;
                for (int c = 0; c < n; ++c) ar += a[size_t(r)][size_t(c)] * w[size_t(c)];
                m = std::max(m, std::abs(b1[size_t(r)] - ar));
            }
        }
    return m;
}

constexpr double kDefectFloor = 1e-12;

}  // namespace

DMat pansu_fd(const SmoothMap& f, const DVec& x, double h) {
    const DMat q1 = fd_quotient(f, x, h);
    DMat q2 = fd_quotient(f, x, h / 2.0);
    for (size_t r = 0; r < q2.size(); ++r)
        for (size_t c = 0; c < q2[r].size(); ++c) q2[r][c] = 2.0 * q2[r][c] - q1[r][c];
    return q2;
}

PansuReport pansu_differential(const SmoothMap& f, const DVec& x, double h) {
    const DMat r1 = pansu_fd(f, x, h);
    const DMat r2 = pansu_fd(f, x, h / 2.0);
    const double d1 = block_defect_of(f.g, r1) + bracket_defect_of(f.g, r1);
    const double d2 = block_defect_of(f.g, r2) + bracket_defect_of(f.g, r2);
    if (d2 > kDefectFloor && d2 * 1.5 > d1)
        throw NumericError("NonConvergent",
                           "Pansu quotient structural defect fails to contract for " + f.id);
    PansuReport rep;
    rep.value = r2;
    rep.block_defect = block_defect_of(f.g, r2);
    rep.bracket_defect = bracket_defect_of(f.g, r2);
    rep.defect_coarse = d1;
    rep.defect_fine = d2;
    if (f.exact_dp) {
        const DMat e = f.exact_dp(x);
        double dev = 0;
        for (size_t r = 0; r < e.size(); ++r)
            for (size_t c = 0; c < e[r].size(); ++c)
                dev = std::max(dev, std::abs(r2[r][c] - e[r][c]));
        rep.exact_dev = dev;
    }
    return rep;
}

// ---- coefficient fields ------------------------------------------------------

ScalarField constant_field(double c) {
    ScalarField r;
    r.label = std::to_string(c);
    r.f = [c](const DVec&) { return c; };
    r.df = [](const DVec&, int) { return 0.0; };
    return r;
}

ScalarField poly_field(const forms::Poly& p) {
    ScalarField r;
    r.label = p.str();
    auto ds = std::make_shared<std::vector<forms::Poly>>();
    for (int i = 0; i < p.n; ++i) ds->push_back(p.deriv(i));
    r.f = [p](const DVec& x) { return p.eval_d(x); };
    r.df = [ds](const DVec& x, int i) { return (*ds)[size_t(i)].eval_d(x); };
    return r;
}

ScalarField bump_field(int n, double radius) {
    const double R = radius;
    auto phi = [R](double u) {
        const double s = 1.0 - (u / R) * (u / R);
        return s > 0 ? s * s * s * s : 0.0;
    };
    auto dphi = [R](double u) {
        const double s = 1.0 - (u / R) * (u / R);
        return s > 0 ? -8.0 * u / (R * R) * s * s * s : 0.0;
    };
    ScalarField r;
    r.label = "bump";
    r.f = [n, phi](const DVec& x) {
        double v = 1.0;
        for (int i = 0; i < n; ++i) v *= phi(x[size_t(i)]);
        return v;
    };
    r.df = [n, phi, dphi](const DVec& x, int i) {
        double v = dphi(x[size_t(i)]);
        for (int j = 0; j < n; ++j)
            if (j != i) v *= phi(x[size_t(j)]);
        return v;
    };
    return r;
}

ScalarField product_field(const ScalarField& a, const ScalarField& b) {
    ScalarField r;
    r.label = a.label + "*" + b.label;
    auto af = a.f, bf = b.f;
    auto adf = a.df, bdf = b.df;
    r.f = [af, bf](const DVec& x) { return af(x) * bf(x); };
    r.df = [af, bf, adf, bdf](const DVec& x, int i) {
        return adf(x, i) * bf(x) + af(x) * bdf(x, i);
    };
    return r;
}

void NumericForm::add_term(const forms::MultiIndex& J, ScalarField c) {
    terms.insert_or_assign(J, std::move(c));
}

NumericForm lift_exterior(const forms::ExteriorElement& a) {
    NumericForm out;
    out.n = a.n;
    out.k = a.k;
    out.label = a.str();
    std::map<forms::MultiIndex, forms::Poly> coeff;
    for (const auto& [jm, c] : a.terms) {
        auto& p = coeff.try_emplace(jm.first, forms::Poly::zero(a.n)).first->second;
        p = p + forms::Poly{a.n, {{jm.second, c}}};
    }
    for (auto& [J, p] : coeff) out.add_term(J, poly_field(p));
    return out;
}

NumericForm scale_form(const NumericForm& a, const ScalarField& c) {
    NumericForm out;
    out.n = a.n;
    out.k = a.k;
    out.label = c.label + "*(" + a.label + ")";
    for (const auto& [J, t] : a.terms) out.add_term(J, product_field(c, t));
    return out;
}

PointForm eval_form(const NumericForm& a, const DVec& x) {
    PointForm out;
    for (const auto& [J, c] : a.terms) out[J] = c.f(x);
    return out;
}

// ---- pointwise CE differential -----------------------------------------------

const std::vector<std::pair<forms::MultiIndex, double>>& FrameDifferential::dtheta_of(
    const forms::MultiIndex& J) {
    auto it = dtheta.find(J);
    if (it != dtheta.end()) return it->second;
    const forms::ExteriorElement d =
        forms::ce_differential(g, forms::ExteriorElement::theta(g.n, J));
    std::vector<std::pair<forms::MultiIndex, double>> v;
    for (const auto& [jm, c] : d.terms) v.emplace_back(jm.first, c.to_double());
    return dtheta.emplace(J, std::move(v)).first->second;
}

FrameDifferential frame_differential(const carnot::GradedLieAlgebra& g) {
    FrameDifferential fd;
    fd.g = g;
    fd.lif = forms::left_invariant_fields(g);
    return fd;
}

PointForm numeric_d(FrameDifferential& fd, const NumericForm& a, const DVec& x) {
    const auto& g = fd.g;
    PointForm out;
    for (const auto& [J, c] : a.terms) {
        const double cx = c.f(x);
        if (cx != 0.0)
            for (const auto& [K, coef] : fd.dtheta_of(J)) out[K] += coef * cx;
        for (int i = 1; i <= g.n; ++i) {
            double xa = 0;  // X_i(c)(x) = sum_k P[k][i-1](x) d_k c(x)
            for (int k = 0; k < g.n; ++k) {
                const forms::Poly& p = fd.lif.P[size_t(k)][size_t(i - 1)];
                if (p.is_zero()) continue;
                xa += p.eval_d(x) * c.df(x, k);
            }
            if (xa == 0.0) continue;
            std::vector<int> word;
            word.reserve(J.idx.size() + 1);
            word.push_back(i);
            word.insert(word.end(), J.idx.begin(), J.idx.end());
            const auto s = forms::sort_word(word);
            if (!s) continue;
            out[s->first] += double(s->second) * xa;
        }
    }
    return out;
}

// ---- pullback and top wedge ---------------------------------------------------

namespace {

// rows/cols 1-based strictly increasing; Gaussian elimination with partial
// pivoting on the k x k submatrix.
double det_minor(const DMat& a, const std::vector<int>& rows, const std::vector<int>& cols) {
    const size_t k = rows.size();
    if (k == 0) return 1.0;
    std::vector<std::vector<double>> m(k, std::vector<double>(k));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) m[i][j] = a[size_t(rows[i] - 1)][size_t(cols[j] - 1)];
    double det = 1.0;
    for (size_t c = 0; c < k; ++c) {
        size_t piv = c;
        for (size_t r = c + 1; r < k; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (m[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (size_t r = c + 1; r < k; ++r) {
            const double f = m[r][c] / m[c][c];
            for (size_t j = c; j < k; ++j) m[r][j] -= f * m[c][j];
        }
    }
    return det;
}

template <class Fn>
void for_combinations(int n, int k, Fn fn) {
    if (k < 0 || k > n) return;
    std::vector<int> J(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) J[size_t(i)] = i + 1;
    for (;;) {
        fn(J);
        int i = k - 1;
        while (i >= 0 && J[size_t(i)] == n - k + 1 + i) --i;
        if (i < 0) break;
        ++J[size_t(i)];
        for (int j = i + 1; j < k; ++j) J[size_t(j)] = J[size_t(j - 1)] + 1;
    }
}

}  // namespace

PointForm pansu_pullback(const DMat& A, int n, const PointForm& a, int k) {
    PointForm out;
    if (a.empty()) return out;
    for_combinations(n, k, [&](const std::vector<int>& J) {
        double v = 0;
        for (const auto& [K, c] : a) v += c * det_minor(A, K.idx, J);
        if (v != 0.0) out.emplace(forms::MultiIndex{J}, v);
    });
    return out;
}

double wedge_top(int n, const PointForm& a, const PointForm& b) {
    double s = 0;
    for (const auto& [J, u] : a)
        for (const auto& [K, v] : b) {
            std::vector<int> word = J.idx;
            word.insert(word.end(), K.idx.begin(), K.idx.end());
            if (int(word.size()) != n) continue;
            const auto sw = forms::sort_word(word);
            if (!sw) continue;
            s += double(sw->second) * u * v;
        }
    return s;
}

// ---- weight admissibility -------------------------------------------------------

std::set<forms::MultiIndex> formal_d_support(const carnot::GradedLieAlgebra& g,
                                             const NumericForm& a) {
    std::set<forms::MultiIndex> out;
    FrameDifferential fd = frame_differential(g);
    for (const auto& [J, c] : a.terms) {
        for (const auto& [K, coef] : fd.dtheta_of(J)) {
            (void)coef;
            out.insert(K);
        }
        for (int i = 1; i <= g.n; ++i) {
            std::vector<int> word;
            word.push_back(i);
            word.insert(word.end(), J.idx.begin(), J.idx.end());
            const auto s = forms::sort_word(word);
            if (s) out.insert(s->first);
        }
    }
    return out;
}

int support_weight_min(const carnot::GradedLieAlgebra& g,
                       const std::set<forms::MultiIndex>& support) {
    int m = INT_MAX;
    for (const auto& J : support) m = std::min(m, J.weight(g));
    return m;
}

// ---- pullback identity on a box ----------------------------------------------------

PullbackReport verify_pullback_identity(const carnot::GradedLieAlgebra& g, const SmoothMap& f,
                                        const NumericForm& omega, const NumericForm& eta,
                                        const PullbackOptions& opt) {
    const int n = g.n;
    if (omega.n != n || eta.n != n)
        throw NumericError("ShapeMismatch", "form lives on a different group");
    const int k = omega.k;
    if (eta.k != n - k - 1)
        throw NumericError("ShapeMismatch", "eta degree must complement omega for the top wedge");
    const int nu = g.hom_dim();

    PullbackReport rep;
    rep.map_id = f.id;
    rep.omega_label = omega.label;
    rep.eta_label = eta.label;
    rep.degree = k;
    rep.grids = opt.grids;

    auto term_support = [](const NumericForm& a) {
        std::set<forms::MultiIndex> s;
        for (const auto& kv : a.terms) s.insert(kv.first);
        return s;
    };
    const int ww = support_weight_min(g, term_support(omega));
    const int we = support_weight_min(g, term_support(eta));
    const int wdw = support_weight_min(g, formal_d_support(g, omega));
    const int wde = support_weight_min(g, formal_d_support(g, eta));
    auto admissible = [nu](int a, int b) {
        if (a == INT_MAX || b == INT_MAX) return true;  // a vanishing factor
        return a + b >= nu;
    };
    rep.weight_ok = admissible(ww, wde) && admissible(wdw, we);
    if (!rep.weight_ok && !opt.diagnostic)
        throw NumericError("WeightConditionViolated",
                           "weights of (" + omega.label + ", " + eta.label +
                               ") fall short of the homogeneous dimension");

    FrameDifferential fd = frame_differential(g);
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;

    for (int gi = 0; gi < 2; ++gi) {
        const int m = opt.grids[size_t(gi)];
        const double hp = opt.h_p / double(1 << gi);
        const double cell = 2.0 * opt.box / double(m);
        double t1 = 0, t2 = 0, l1 = 0, l2 = 0;
        std::vector<int> ix(size_t(n), 0);
        DVec x(static_cast<size_t>(n));
        for (;;) {
            for (int d = 0; d < n; ++d)
                x[size_t(d)] = -opt.box + cell * (double(ix[size_t(d)]) + 0.5);
            const DMat A = (opt.use_exact_dp && f.exact_dp) ? f.exact_dp(x) : pansu_fd(f, x, hp);
            const DVec fx = f.eval(x);
            const double c1 = wedge_top(n, pansu_pullback(A, n, eval_form(omega, fx), k),
                                        numeric_d(fd, eta, x));
            const double c2 = wedge_top(n, pansu_pullback(A, n, numeric_d(fd, omega, fx), k + 1),
                                        eval_form(eta, x));
            t1 += c1;
            t2 += c2;
            l1 += std::abs(c1);
            l2 += std::abs(c2);
            int d = n - 1;
            while (d >= 0 && ++ix[size_t(d)] == m) ix[size_t(d--)] = 0;
            if (d < 0) break;
        }
        const double vol = ipow(cell, n);
        t1 *= vol;
        t2 *= vol;
        l1 *= vol;
        l2 *= vol;
        rep.t1[size_t(gi)] = t1;
        rep.t2[size_t(gi)] = t2;
        rep.residuals[size_t(gi)] = std::abs(t1 + sgn * t2) /
            (std::abs(t1) + std::abs(t2) + opt.denom_rel * (l1 + l2) + DBL_MIN);
    }

    rep.floored = rep.residuals[0] < opt.floor && rep.residuals[1] < opt.floor;
    rep.order = rep.floored
                    ? opt.nominal_order
                    : std::log2((rep.residuals[0] + DBL_MIN) / (rep.residuals[1] + DBL_MIN));
    // Superconvergence is allowed; decaying slower than nominal is not.
    rep.pass = rep.weight_ok && rep.residuals[1] < opt.tol &&
               (rep.floored || rep.order >= opt.nominal_order - opt.order_window);
    return rep;
}

WeightSplit pullback_weight_split(const SmoothMap& f, const NumericForm& omega, int weight,
                                  int grid, double h_p, bool use_exact_dp) {
    const auto& g = f.g;
    const int n = g.n;
    WeightSplit ws;
    const double cell = 2.0 / double(grid);
    std::vector<int> ix(size_t(n), 0);
    DVec x(static_cast<size_t>(n));
    for (;;) {
        for (int d = 0; d < n; ++d)
            x[size_t(d)] = -1.0 + cell * (double(ix[size_t(d)]) + 0.5);
        const DMat A = (use_exact_dp && f.exact_dp) ? f.exact_dp(x) : pansu_fd(f, x, h_p);
        const PointForm p = pansu_pullback(A, n, eval_form(omega, f.eval(x)), omega.k);
        for (const auto& [J, v] : p)
            (J.weight(g) == weight ? ws.on : ws.off) += std::abs(v);
        int d = n - 1;
        while (d >= 0 && ++ix[size_t(d)] == grid) ix[size_t(d--)] = 0;
        if (d < 0) break;
    }
    return ws;
}

std::vector<std::pair<NumericForm, NumericForm>> heisenberg_pullback_fixtures() {
    // omega = q1 theta13 (weight 3), eta = q2 B (weight 0): both theorem
    // conditions are met with equality on nu = 4. A non-constant q1 matters:
    // with constant coefficients the finite-difference error of a shear
    // differential assembles into a closed 2-form and integrates to zero, so
    // the residual would never see the differentials at all.
    const NumericForm th13 =
        lift_exterior(forms::ExteriorElement::theta(3, forms::MultiIndex{{1, 3}}));
    const ScalarField B = bump_field(3, 0.9);
    const auto one = forms::Poly::constant(3, la::Rational(1));
    const auto x1 = forms::Poly::var(3, 0);
    const auto x2 = forms::Poly::var(3, 1);
    const auto x3 = forms::Poly::var(3, 2);
    std::vector<std::pair<forms::Poly, forms::Poly>> qs;
    qs.emplace_back(one + x1 * forms::Poly::constant(3, la::Rational(1, 2)), one);
    qs.emplace_back(x1, one + x2 * x2 * forms::Poly::constant(3, la::Rational(1, 2)));
    qs.emplace_back(one + x3 * forms::Poly::constant(3, la::Rational(1, 3)),
                    one + x1 * x1 * forms::Poly::constant(3, la::Rational(1, 4)));
    std::vector<std::pair<NumericForm, NumericForm>> out;
    for (const auto& [q1, q2] : qs) {
        NumericForm eta;
        eta.n = 3;
        eta.k = 0;
        ScalarField c = product_field(poly_field(q2), B);
        eta.label = c.label;
        eta.add_term(forms::MultiIndex{}, std::move(c));
        out.emplace_back(scale_form(th13, poly_field(q1)), eta);
    }
    return out;
}

}  // namespace rumin::numeric
