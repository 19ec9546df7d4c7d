#pragma once
/* Filtered (co)chain complexes over Q. Cochain complexes carry descending
 * filtrations, chain complexes ascending ones. Stored filtration steps cover a
 * normalized index window; outside it the filtration is extended by the
 * conventions: cochain F^p = full for p < p_min, 0 for p > p_max; chain
 * F_p = 0 for p < p_min, full for p > p_max. Normalization pins p_min/p_max so
 * the stored window starts at the last all-full step (cochain) resp. ends at
 * the first all-full step (chain), making representations canonical. */

#include "rumin/linalg.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rumin::filtered {

enum class Orient { cochain, chain };

class FilteredComplex {
public:
    Orient orient = Orient::cochain;

    // Degrees k_min..k_max; diff[t] is the map across edge t:
    // cochain: C^{k_min+t} -> C^{k_min+t+1}; chain: C_{k_min+t+1} -> C_{k_min+t}.
    static FilteredComplex make(Orient orient, int k_min, std::vector<int> dims,
                                std::vector<la::Matrix> diff, int p_lo,
                                std::vector<std::vector<la::Subspace>> steps);

    int k_min() const { return k_min_; }
    int k_max() const { return k_min_ + int(dims_.size()) - 1; }
    int p_min() const { return p_min_; }
    int p_max() const { return p_max_; }
    int dim(int k) const {
        return (k < k_min() || k > k_max()) ? 0 : dims_[size_t(k - k_min_)];
    }
    // Differential leaving degree k (cochain: k -> k+1, chain: k -> k-1),
    // zero-shaped outside the degree range.
    la::Matrix d_from(int k) const;
    // Filtration at degree k, any integer p, extended by the conventions.
    la::Subspace filtration(int k, int p) const;

    bool operator==(const FilteredComplex& o) const = default;

private:
    int k_min_ = 0;
    std::vector<int> dims_;
    std::vector<la::Matrix> diff_;
    int p_min_ = 0, p_max_ = 0;
    std::vector<std::vector<la::Subspace>> filt_;  // [degree][p - p_min]
};

struct ComplexViolation {
    std::string kind;  // D2Violation | NestingViolation | SubcomplexViolation
    int degree = 0, p = 0;
    la::Vec vec;
};

struct ComplexValidation {
    bool ok = false;
    std::vector<ComplexViolation> violations;
};

ComplexValidation validate_filtered(const FilteredComplex& fc);

// Dual complex: reversed arrows (plain adjoint; chain-model builders fold the
// degree sign into the boundary), annihilator filtration
//   chain -> cochain: F^p := ann(F_{p-1});  cochain -> chain: F_p := ann(F^{p+1}).
// Applying it twice reproduces the original complex datum.
FilteredComplex dualize(const FilteredComplex& fc);

// Direct-sum weight grading on top of a filtered complex; pieces per degree
// sorted by descending weight. Cochain: F^p = sum of pieces with w >= p.
// Chain: F_p = sum of pieces with w >= N - p, N the top weight.
struct WeightedComplex {
    FilteredComplex fc;
    std::vector<std::vector<std::pair<int, la::Subspace>>> grading;  // per degree

    la::Subspace weight_piece(int k, int w) const;
    la::Subspace weight_ge(int k, int w) const;  // sum of pieces of weight >= w
    int top_weight() const;
};

// Checks the grading is a direct sum and matches the filtration per the rule
// above; returns an error string on failure.
std::optional<std::string> check_weighted(const WeightedComplex& wc);

// Chain side bundled with its dual cochain complex. The pairing between
// dual^j coordinates and chain_j coordinates is the dot product.
struct DualityData {
    WeightedComplex chain;
    FilteredComplex dual;
};

DualityData make_duality(const WeightedComplex& chain);

struct CohomologyReport {
    int k_min = 0;
    std::vector<int> betti;                    // per degree
    std::map<std::pair<int, int>, int> filtered_dim;  // (k, p) -> dim F^p H^k (chain: F_p H_k)
    std::map<std::pair<int, int>, int> graded_dim;    // (k, p) -> dim gr^p H^k
    int betti_at(int k) const {
        int i = k - k_min;
        return (i < 0 || i >= int(betti.size())) ? 0 : betti[size_t(i)];
    }
    int graded_at(int k, int p) const {
        auto it = graded_dim.find({k, p});
        return it == graded_dim.end() ? 0 : it->second;
    }
};

// Cohomology (cochain) or homology (chain) with the induced filtration.
CohomologyReport total_cohomology(const FilteredComplex& fc);

}  // namespace rumin::filtered
