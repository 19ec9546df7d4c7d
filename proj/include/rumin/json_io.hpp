#pragma once
/* JSON input and output. Inputs are strict: unknown fields, wrong types, bad
 * rational literals, and inconsistent shapes are rejected as malformed, which
 * callers distinguish from semantically invalid data (Jacobi failures, d^2
 * violations) found by the validators. Rationals travel as canonical strings
 * "p" or "p/q"; group indices are 1-based on the wire, 0-based in memory.
 * Report builders emit ordered JSON so identical inputs dump byte-identically.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rumin/carnot.hpp"
#include "rumin/filtered.hpp"
#include "rumin/morphism.hpp"
#include "rumin/numeric.hpp"
#include "rumin/spectral.hpp"

namespace rumin::io {

using Json = nlohmann::ordered_json;

// Canonical serialization: two-space indent, trailing newline.
std::string dump(const Json& j);

// ---- groups -----------------------------------------------------------------
Json group_to_json(const carnot::GradedLieAlgebra& g);

struct GroupLoad {
    bool malformed = false;
    std::string error;                     // set when malformed
    carnot::AlgebraValidation validation;  // meaningful otherwise
};
GroupLoad parse_group(const std::string& text);
GroupLoad load_group_file(const std::string& path);

// ---- weighted complexes -------------------------------------------------------
// Degrees carry basis labels and non-increasing weights; the filtration is the
// weight-threshold one reconstructed from those weights. A dual document embeds
// the primal under "dual_of" and the loader rebuilds the dual by dualizing.
Json complex_to_json(const std::string& name, const filtered::WeightedComplex& wc,
                     const std::vector<std::vector<std::string>>& labels);
Json duality_to_json(const std::string& name, const filtered::DualityData& dd,
                     const std::vector<std::vector<std::string>>& labels);

struct ComplexLoad {
    bool malformed = false;
    std::string error;
    std::string name;
    bool is_dual = false;
    filtered::WeightedComplex wc;                   // the (embedded) primal
    std::optional<filtered::FilteredComplex> dual;  // dualize(wc.fc) when is_dual
    std::vector<std::vector<std::string>> labels;
};
ComplexLoad parse_complex(const std::string& text);
ComplexLoad load_complex_file(const std::string& path);

// ---- reports ------------------------------------------------------------------
struct ReportMeta {
    std::string group, model;
    int poly_weight = -1;  // included when >= 0
    std::uint64_t seed = 0;
    int max_page = 0;
};

Json spectral_report(const spectral::SpectralResult& s, const spectral::LimitReport& lim,
                     const ReportMeta& meta);
Json morphism_report(const morphism::PageMorphism& pm, const morphism::IdentityReport& idr,
                     std::uint64_t seed);
Json numeric_report(const numeric::PullbackReport& r, std::uint64_t seed);

Json vec_to_json(const la::Vec& v);

}  // namespace rumin::io
