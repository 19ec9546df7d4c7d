#pragma once
/* Filtration-preserving maps into the dual of a chain complex, the discrete
 * pullback identity <f(d'w), h> = <f(w), bd h> on complementary-weight
 * subspaces, constrained sampling of such maps, the page-by-page induction of
 * spectral-sequence morphisms, the dual-pair page pairing, and the homology
 * transport that re-derives the page commutation from the identity. */

#include "rumin/filtered.hpp"
#include "rumin/spectral.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rumin::morphism {

struct MorphismError : std::runtime_error {
    std::string kind;  // FiltrationViolation | IllDefinedPairing | DegeneratePairing |
                       // RepresentativeDependence | CommutingSquareViolation |
                       // SamplerInconsistency | TransportConstruction
    MorphismError(std::string k, const std::string& what)
        : std::runtime_error(what), kind(std::move(k)) {}
};

// f^k : source C'^k -> dual^k of the chain complex, in dual coordinates, so
// <f(w), c> is a plain dot product against chain coordinates. Filtration
// preservation means f(F'^p) lies in F^p(dual) = ann F_{p-1}(chain).
struct FilteredMap {
    filtered::WeightedComplex source;  // cochain model with its weight grading
    filtered::DualityData target;      // chain complex and its dual
    std::map<int, la::Matrix> f;       // degree -> dim C_k x dim C'^k
    bool is_chain_map = false;         // f d' = d^ f, computed, never assumed
    bool satisfies_identity = false;

    la::Matrix at(int k) const;  // zero-shaped when absent
};

struct MapViolation {
    std::string kind;  // ShapeMismatch | FiltrationViolation
    int degree = 0;
    int p = 0;
    std::string detail;
};

struct MapValidation {
    bool ok = true;
    std::vector<MapViolation> violations;
};

MapValidation validate_filtered_map(const FilteredMap& fm);
bool chain_map_holds(const FilteredMap& fm);

// The identity quantified over threshold subspaces: for every a, b in [0, N]
// (N the chain top weight) and every w in F'^a cap d'^{-1}(F'^{N-b}),
// h in W_{>=b} cap bd^{-1}(W_{>=N-a}): <f(d'w), h> = <f(w), bd h>.
struct IdentityCertificate {
    int degree = 0;  // w lives in C'^degree, h in C_{degree+1}
    int a = 0, b = 0;
    la::Vec omega;
    la::Vec eta;
    la::Rational value;  // the nonzero pairing defect
};

struct IdentityReport {
    bool holds = true;
    std::optional<IdentityCertificate> certificate;
};

IdentityReport check_identity(const FilteredMap& fm);

// Draws f uniformly-by-seed from the exact solution space of the filtration
// and identity constraints (identity rows dropped when impose_identity is
// false). is_chain_map and satisfies_identity are measured on the sample.
struct SampleResult {
    FilteredMap map;
    bool empty_solution_space = false;  // only f = 0 satisfies the constraints
    int solution_dim = 0;
    std::uint64_t seed = 0;
};

SampleResult sample_constrained_map(const filtered::WeightedComplex& source,
                                    const filtered::DualityData& duality, std::uint64_t seed,
                                    bool impose_identity = true);

// Pages of a spectral-sequence morphism. phi[r] exists for r = 0..R where R
// is r_max or the first page whose chain-map verdict fails; the induction
// cannot continue past a failure and first_failure records where.
struct PageMorphism {
    spectral::SpectralResult src_ss, tgt_ss;
    std::vector<std::map<spectral::CellKey, la::Matrix>> phi;
    std::vector<bool> chain_map;                  // d_r phi_r = phi_r d_r, per page
    std::vector<bool> commuting_square;           // eta phi_{r+1} = H(phi_r) eta', r >= 1
    std::optional<std::array<int, 3>> first_failure;  // r, p, q

    la::Matrix phi_at(int r, spectral::CellKey k) const;  // zero-shaped when absent
};

// Generic core: any filtration-preserving map between cochain complexes.
PageMorphism induce_morphism_between(const filtered::FilteredComplex& src,
                                     const filtered::FilteredComplex& tgt,
                                     const std::map<int, la::Matrix>& f, int r_max);

PageMorphism induce_morphism(const FilteredMap& fm, int r_max);

// Cellwise Gram matrices of <dual class, chain class> on matching (p,q);
// descent (both annihilation conditions) and nondegeneracy are verified and
// violations throw, so a returned record is the statement that they hold.
struct PagePairing {
    int r = 0;
    std::map<spectral::CellKey, la::Matrix> gram;
    bool well_defined = true;
    bool nondegenerate = true;
};

std::vector<PagePairing> page_pairing(const spectral::SpectralResult& dual_ss,
                                      const spectral::SpectralResult& chain_ss,
                                      const filtered::DualityData& duality, int r_max);

// Re-enactment of the homology-transport argument: walk the representative
// chain w_0..w_r of phi_r down the pages, pair each correction against chain
// Z_r classes, and land on the identity instance that forces d_r phi_r =
// phi_r d_r. Failures are data and localize the defect; the page where the
// transport first breaks matches the induction's first_failure.
struct TransportReport {
    bool consistent = true;
    std::optional<std::array<int, 3>> mismatch;  // r, p, q of the source cell
    la::Vec eta;                                 // chain witness when inconsistent
    std::string note;
};

TransportReport verify_duality_transport(const FilteredMap& fm, const PageMorphism& pm,
                                         const spectral::SpectralResult& chain_ss);

}  // namespace rumin::morphism
