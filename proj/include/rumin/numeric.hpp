#pragma once
/* Floating-point side of the engine: Pansu difference quotients of group maps,
 * pointwise Chevalley-Eilenberg differentials of forms with smooth coefficient
 * fields, pullback along a pointwise graded matrix, and the integral check of
 * the pullback identity  int f#w ^ de = -(-1)^k int f#(dw) ^ e  on a box.
 *
 * Everything here is double-precision and deterministic: fixed loop orders,
 * no parallelism, no randomness. Exact counterparts live in forms/.
 */

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rumin/carnot.hpp"
#include "rumin/forms.hpp"

namespace rumin::numeric {

using DVec = std::vector<double>;
using DMat = std::vector<std::vector<double>>;  // row-major, value[i][j]

struct NumericError : std::runtime_error {
    std::string kind;  // NonConvergent | WeightConditionViolated | ShapeMismatch
    NumericError(std::string k, const std::string& what)
        : std::runtime_error(what), kind(std::move(k)) {}
};

// ---- group operations over double -----------------------------------------
DVec dilate(const carnot::GradedLieAlgebra& g, double t, const DVec& x);
DVec group_mul(const carnot::GradedLieAlgebra& g, const DVec& x, const DVec& y);
DVec group_inv(const DVec& x);

// A smooth self-map of the group in exponential coordinates. exact_dp, when
// set, returns the closed-form Pansu differential at a point (full n x n
// graded matrix); it is null for maps with no known closed form.
struct SmoothMap {
    std::string id;
    carnot::GradedLieAlgebra g;
    std::function<DVec(const DVec&)> eval;
    std::function<DMat(const DVec&)> exact_dp;
};

SmoothMap map_dilation(const carnot::GradedLieAlgebra& g, double t);
SmoothMap map_left_translation(const carnot::GradedLieAlgebra& g, const DVec& a);
// x -> A x for a graded matrix A; the caller is responsible for A being an
// automorphism (validate_homomorphism on the exact side).
SmoothMap map_automorphism(const carnot::GradedLieAlgebra& g, const DMat& A,
                           const std::string& id = "automorphism");
// Contact shear of the Heisenberg group: (x1, x2, x3) -> (x1 + psi(x2), x2,
// x3 + S(x2)) with S' = psi/2 - x2 psi'/2, which makes the map contact.
// profile: "square" (psi = u^2) or "sine" (psi = sin u).
SmoothMap heisenberg_shear(const std::string& profile);

// ---- Pansu differential by group difference quotients ----------------------
// Column i of the quotient at step t is delta_{1/t}(f(x)^{-1} f(x delta_t e_i));
// one Richardson step 2 Q(h/2) - Q(h) removes the O(h) term.
DMat pansu_fd(const SmoothMap& f, const DVec& x, double h);

struct PansuReport {
    DMat value;                 // Richardson value at the finer pair (h/2, h/4)
    double block_defect = 0;    // largest entry outside the graded blocks
    double bracket_defect = 0;  // largest entry of [Ae_i, Ae_j] - A[e_i, e_j]
    double defect_coarse = 0;   // structural defect at the (h, h/2) value
    double defect_fine = 0;     // structural defect at the (h/2, h/4) value
    std::optional<double> exact_dev;  // max deviation from exact_dp when known
};

// Throws NumericError{NonConvergent} when the structural defect fails to
// shrink by 1.5x between the two Richardson values and is above the 1e-12
// floor. Exact maps sit at the floor on both and pass.
PansuReport pansu_differential(const SmoothMap& f, const DVec& x, double h);

// ---- forms with smooth coefficients ----------------------------------------
struct ScalarField {
    std::string label;
    std::function<double(const DVec&)> f;
    std::function<double(const DVec&, int)> df;  // d/dx_{i+1}
};

ScalarField constant_field(double c);
ScalarField poly_field(const forms::Poly& p);
// prod_i (1 - (x_i/R)^2)^4 on |x_i| < R, zero outside; C^3 across the edge.
ScalarField bump_field(int n, double radius);
ScalarField product_field(const ScalarField& a, const ScalarField& b);

struct NumericForm {
    int n = 0, k = 0;
    std::string label;
    std::map<forms::MultiIndex, ScalarField> terms;

    void add_term(const forms::MultiIndex& J, ScalarField c);
};

NumericForm lift_exterior(const forms::ExteriorElement& a);
NumericForm scale_form(const NumericForm& a, const ScalarField& c);

// A form evaluated at one point: coefficient per multiindex.
using PointForm = std::map<forms::MultiIndex, double>;

PointForm eval_form(const NumericForm& a, const DVec& x);

// CE differential with the symbolic part precomputed: d theta_J is expanded
// once per multiindex, the frame derivatives X_i(a) are assembled per point
// from the coefficient fields' first partials.
struct FrameDifferential {
    carnot::GradedLieAlgebra g;
    forms::LeftInvariantFields lif;
    std::map<forms::MultiIndex, std::vector<std::pair<forms::MultiIndex, double>>> dtheta;

    const std::vector<std::pair<forms::MultiIndex, double>>& dtheta_of(const forms::MultiIndex& J);
};

FrameDifferential frame_differential(const carnot::GradedLieAlgebra& g);
PointForm numeric_d(FrameDifferential& fd, const NumericForm& a, const DVec& x);

// Pullback of a point-evaluated k-form along an n x n matrix: (A*w)_J =
// sum_K w_K det A[K|J] (rows K, columns J).
PointForm pansu_pullback(const DMat& A, int n, const PointForm& a, int k);

// Coefficient of theta_{1..n} in a ^ b; degrees must be complementary.
double wedge_top(int n, const PointForm& a, const PointForm& b);

// Multiindices that can occur in numeric_d(a), regardless of coefficient
// values. Weight admissibility below is judged on this formal support.
std::set<forms::MultiIndex> formal_d_support(const carnot::GradedLieAlgebra& g,
                                             const NumericForm& a);
// Minimal wt(J) over the support; INT_MAX for the empty form.
int support_weight_min(const carnot::GradedLieAlgebra& g,
                       const std::set<forms::MultiIndex>& support);

// ---- pullback identity on a box --------------------------------------------
struct PullbackOptions {
    std::array<int, 2> grids{32, 64};  // midpoint cells per axis, coarse/fine
    double box = 1.0;                  // integrate over [-box, box]^n
    double h_p = 0.02;                  // Pansu FD step on the coarse grid; halved with the grid
    double tol = 1e-3;
    double nominal_order = 2.0;
    double order_window = 0.5;
    double floor = 1e-12;
    double denom_rel = 1e-2;
    bool diagnostic = false;     // report weight violations instead of throwing
    bool use_exact_dp = false;   // closed-form differential when the map has one
};

struct PullbackReport {
    std::string map_id, omega_label, eta_label;
    int degree = 0;  // k = deg omega
    bool weight_ok = true;
    std::array<int, 2> grids{};
    std::array<double, 2> residuals{};
    std::array<double, 2> t1{}, t2{};
    double order = 0;
    bool floored = false;
    bool pass = false;
};

// Residual on each grid: |t1 + (-1)^k t2| over |t1| + |t2| + small L1 mass.
// pass needs the fine residual under tol and the observed decay order at
// least nominal minus the window (faster decay is fine), unless both
// residuals sit at the floor.
// Throws NumericError{WeightConditionViolated} when the weight conditions
// wt(w) + wt(de) >= nu and wt(dw) + wt(e) >= nu fail, unless diagnostic.
PullbackReport verify_pullback_identity(const carnot::GradedLieAlgebra& g, const SmoothMap& f,
                                        const NumericForm& omega, const NumericForm& eta,
                                        const PullbackOptions& opt = {});

// On/off-weight L1 mass of the pulled-back form of a form-homogeneous omega,
// sampled on a midpoint grid. For graded maps off vanishes to rounding.
struct WeightSplit {
    double on = 0, off = 0;
};
WeightSplit pullback_weight_split(const SmoothMap& f, const NumericForm& omega, int weight,
                                  int grid, double h_p, bool use_exact_dp);

// Fixture pairs for the Heisenberg integral checks: (q1 theta13, q2 B) with
// polynomial q1, q2 and B the bump of radius 0.9. Degrees (2, 0), weights
// (3, 0): both weight conditions meet nu = 4 with equality, and the
// non-constant q1 keeps the residual sensitive to the Pansu differential.
std::vector<std::pair<NumericForm, NumericForm>> heisenberg_pullback_fixtures();

}  // namespace rumin::numeric
