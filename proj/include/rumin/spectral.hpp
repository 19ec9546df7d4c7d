#pragma once
/* Spectral sequences of filtered complexes over Q: explicit Z/B/D/E cells with
 * chosen representatives, page differentials computed on representatives and
 * verified independent of the choice, page-turning isomorphisms eta_r, and
 * stabilization against the graded (co)homology. */

#include "rumin/filtered.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rumin::spectral {

struct CellKey {
    int p = 0, q = 0;
    auto operator<=>(const CellKey&) const = default;
};

struct Cell {
    la::Subspace Z, B, D;
    la::QuotientSpace E;  // Z/D
};

struct Page {
    int r = 0;
    std::map<CellKey, Cell> cells;
    // cohomological: E^{p,q} -> E^{p+r,q-r+1}; homological: E_{p,q} -> E_{p-r,q+r-1}
    std::map<CellKey, la::Matrix> d;

    const Cell* find(CellKey k) const;
    int dimE(CellKey k) const;
    la::Matrix d_at(CellKey k) const;  // zero-shaped when the key is absent
};

// Witness of E_{r+1} = H(E_r, d_r): H is homology in E_r coordinates, eta maps
// E_{r+1} coordinates to H coordinates through a Z_{r+1} representative.
struct PageIso {
    int r = 0;
    std::map<CellKey, la::QuotientSpace> H;
    std::map<CellKey, la::Matrix> eta;  // square, invertible
};

struct SpectralError : std::runtime_error {
    std::string kind;  // RepresentativeDependence | BoundaryMismatch | PageIsoViolation | NonStabilized
    SpectralError(std::string k, const std::string& what)
        : std::runtime_error(what), kind(std::move(k)) {}
};

struct SpectralResult {
    filtered::FilteredComplex fc;  // the input complex (a chain input stays a chain)
    bool homological = false;
    std::vector<Page> pages;    // r = 0..r_max
    std::vector<PageIso> isos;  // r = 0..r_max-1

    int r_max() const { return int(pages.size()) - 1; }
    const Page& page(int r) const { return pages.at(size_t(r)); }
};

SpectralResult compute_pages(const filtered::FilteredComplex& fc, int r_max);
SpectralResult compute_pages_homological(const filtered::FilteredComplex& fc, int r_max);

// The defining subspaces at any (p,q), stored cell or not. On a cochain
// complex these are the cohomological formulas; feeding a chain complex reads
// them with p as the ascending filtration index.
la::Subspace z_space(const filtered::FilteredComplex& fc, int p, int q, int r);
la::Subspace b_space(const filtered::FilteredComplex& fc, int p, int q, int r);
la::Subspace d_space(const filtered::FilteredComplex& fc, int p, int q, int r);

struct LimitReport {
    int r_stab = 0;
    std::map<CellKey, int> einf;  // nonzero limit cells
    bool matches_graded = true;
    std::vector<std::array<int, 4>> mismatches;  // p, q, dim E_inf, dim gr H
    filtered::CohomologyReport cohomology;
};

// Stabilization and comparison with graded (co)homology; requires pages past
// the filtration width (NonStabilized otherwise, asking for a larger r_max).
LimitReport limit_page(const SpectralResult& s);

// Seeded corpus generator: weights per degree, a nilpotent flag U with
// d(U) = 0 and im(d) in U, weight-compatible random entries, then an optional
// filtration-preserving change of basis. Always valid, d^2 = 0 by construction.
struct RandomComplexSpec {
    int degrees = 3;     // degrees 0..degrees
    int max_dim = 5;     // per-degree dimension in [1, max_dim]
    int max_weight = 3;  // basis weights in [0, max_weight]
    filtered::Orient orient = filtered::Orient::cochain;
    bool mix_basis = true;
};

filtered::FilteredComplex random_filtered_complex(std::uint64_t seed, const RandomComplexSpec& spec);
// Same construction with the weight grading attached (pieces are unit runs).
filtered::WeightedComplex random_weighted_complex(std::uint64_t seed, const RandomComplexSpec& spec);

std::uint64_t split_seed(std::uint64_t seed, const std::string& label);
std::mt19937_64 rng_for(std::uint64_t seed, const std::string& label);

}  // namespace rumin::spectral
