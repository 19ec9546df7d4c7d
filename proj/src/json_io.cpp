#include "rumin/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace rumin::io {

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace {

struct Malformed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Malformed(what);
}

void only_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    require(j.is_object(), where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        require(allowed.count(it.key()) > 0, where + ": unknown field '" + it.key() + "'");
}

int get_int(const Json& j, const std::string& where) {
    require(j.is_number_integer(), where + ": expected an integer");
    return j.get<int>();
}

std::string get_str(const Json& j, const std::string& where) {
    require(j.is_string(), where + ": expected a string");
    return j.get<std::string>();
}

la::Rational get_rat(const Json& j, const std::string& where) {
    const std::string s = get_str(j, where);
    try {
        return la::Rational::parse(s);
    } catch (const std::exception& e) {
        throw Malformed(where + ": " + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Malformed("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

// ---- groups -----------------------------------------------------------------

Json group_to_json(const carnot::GradedLieAlgebra& g) {
    Json j;
    j["name"] = g.name;
    j["layers"] = g.layers;
    Json brackets = Json::array();
    for (const auto& [ij, ks] : g.c) {
        Json b;
        b["i"] = ij.first + 1;
        b["j"] = ij.second + 1;
        Json coeffs = Json::object();
        for (const auto& [k, c] : ks)
            if (!c.is_zero()) coeffs[std::to_string(k + 1)] = c.str();
        b["coeffs"] = coeffs;
        brackets.push_back(std::move(b));
    }
    j["brackets"] = std::move(brackets);
    return j;
}

GroupLoad parse_group(const std::string& text) {
    GroupLoad out;
    try {
        const Json j = Json::parse(text);
        only_keys(j, {"name", "layers", "brackets"}, "group");
        require(j.contains("name") && j.contains("layers") && j.contains("brackets"),
                "group: fields name, layers, brackets are required");
        carnot::AlgebraData data;
        data.name = get_str(j["name"], "name");
        require(j["layers"].is_array(), "layers: expected an array");
        for (const auto& l : j["layers"]) data.layers.push_back(get_int(l, "layers"));
        require(j["brackets"].is_array(), "brackets: expected an array");
        for (const auto& b : j["brackets"]) {
            only_keys(b, {"i", "j", "coeffs"}, "bracket");
            require(b.contains("i") && b.contains("j") && b.contains("coeffs"),
                    "bracket: fields i, j, coeffs are required");
            carnot::BracketEntry e;
            e.i = get_int(b["i"], "bracket.i") - 1;
            e.j = get_int(b["j"], "bracket.j") - 1;
            require(b["coeffs"].is_object(), "bracket.coeffs: expected an object");
            for (auto it = b["coeffs"].begin(); it != b["coeffs"].end(); ++it) {
                int k = 0;
                try {
                    size_t pos = 0;
                    k = std::stoi(it.key(), &pos);
                    require(pos == it.key().size(), "bracket.coeffs: bad index");
                } catch (const Malformed&) {
                    throw;
                } catch (const std::exception&) {
                    throw Malformed("bracket.coeffs: bad index '" + it.key() + "'");
                }
                e.coeffs[k - 1] = get_rat(it.value(), "bracket.coeffs");
            }
            data.brackets.push_back(std::move(e));
        }
        out.validation = carnot::validate_algebra(data);
    } catch (const std::exception& e) {
        out.malformed = true;
        out.error = e.what();
    }
    return out;
}

GroupLoad load_group_file(const std::string& path) {
    try {
        return parse_group(read_file(path));
    } catch (const std::exception& e) {
        GroupLoad out;
        out.malformed = true;
        out.error = e.what();
        return out;
    }
}

// ---- weighted complexes -------------------------------------------------------

namespace {

// Weights of the graded pieces read back per basis index; the builders store
// bases sorted by descending weight, so pieces are unit-vector runs.
std::vector<std::vector<int>> weights_per_degree(const filtered::WeightedComplex& wc) {
    std::vector<std::vector<int>> out;
    const int k_min = wc.fc.k_min();
    for (int k = k_min; k <= wc.fc.k_max(); ++k) {
        std::vector<int> row(size_t(wc.fc.dim(k)), 0);
        for (const auto& [w, sp] : wc.grading[size_t(k - k_min)])
            for (int i = 0; i < sp.dim(); ++i) {
                const la::Vec v = sp.basis_vec(i);
                for (size_t c = 0; c < v.size(); ++c)
                    if (!v[c].is_zero()) row[c] = w;
            }
        out.push_back(std::move(row));
    }
    return out;
}

Json weighted_to_json(const std::string& name, const filtered::WeightedComplex& wc,
                      const std::vector<std::vector<std::string>>& labels) {
    const auto& fc = wc.fc;
    Json j;
    j["name"] = name;
    j["orientation"] = fc.orient == filtered::Orient::cochain ? "cochain" : "chain";
    j["k_min"] = fc.k_min();
    j["p_lo"] = fc.p_min();
    j["p_hi"] = fc.p_max();
    const auto wts = weights_per_degree(wc);
    Json degrees = Json::array();
    for (int k = fc.k_min(); k <= fc.k_max(); ++k) {
        Json d;
        d["k"] = k;
        Json labs = Json::array();
        for (int i = 0; i < fc.dim(k); ++i) labs.push_back(labels[size_t(k - fc.k_min())][size_t(i)]);
        d["labels"] = std::move(labs);
        d["weights"] = wts[size_t(k - fc.k_min())];
        degrees.push_back(std::move(d));
    }
    j["degrees"] = std::move(degrees);
    Json diffs = Json::array();
    const bool co = fc.orient == filtered::Orient::cochain;
    for (int t = 0; t + 1 <= fc.k_max() - fc.k_min(); ++t) {
        const int from = co ? fc.k_min() + t : fc.k_min() + t + 1;
        const la::Matrix m = fc.d_from(from);
        Json e;
        e["from"] = from;
        Json trip = Json::array();
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c)
                if (!m.at(r, c).is_zero()) trip.push_back(Json::array({r, c, m.at(r, c).str()}));
        e["triplets"] = std::move(trip);
        diffs.push_back(std::move(e));
    }
    j["differential"] = std::move(diffs);
    return j;
}

filtered::WeightedComplex weighted_from_json(const Json& j,
                                             std::vector<std::vector<std::string>>& labels) {
    only_keys(j, {"name", "orientation", "k_min", "p_lo", "p_hi", "degrees", "differential"},
              "complex");
    for (const char* f : {"orientation", "k_min", "p_lo", "p_hi", "degrees", "differential"})
        require(j.contains(f), std::string("complex: field '") + f + "' is required");
    const std::string orient_s = get_str(j["orientation"], "orientation");
    require(orient_s == "cochain" || orient_s == "chain", "orientation: cochain or chain");
    const bool co = orient_s == "cochain";
    const int k_min = get_int(j["k_min"], "k_min");
    const int p_lo = get_int(j["p_lo"], "p_lo");
    const int p_hi = get_int(j["p_hi"], "p_hi");
    require(p_lo <= p_hi, "p_lo must not exceed p_hi");

    require(j["degrees"].is_array() && !j["degrees"].empty(), "degrees: expected a nonempty array");
    std::vector<int> dims;
    std::vector<std::vector<int>> wts;
    int idx = 0;
    for (const auto& d : j["degrees"]) {
        only_keys(d, {"k", "labels", "weights"}, "degree");
        require(d.contains("k") && d.contains("labels") && d.contains("weights"),
                "degree: fields k, labels, weights are required");
        require(get_int(d["k"], "degree.k") == k_min + idx, "degree.k: degrees must be contiguous");
        require(d["labels"].is_array() && d["weights"].is_array(),
                "degree: labels and weights must be arrays");
        require(d["labels"].size() == d["weights"].size(),
                "degree: labels and weights must have equal length");
        std::vector<std::string> labs;
        std::vector<int> row;
        for (const auto& l : d["labels"]) labs.push_back(get_str(l, "degree.labels"));
        int prev = INT32_MAX;
        for (const auto& w : d["weights"]) {
            const int wi = get_int(w, "degree.weights");
            require(wi <= prev, "degree.weights: weights must be non-increasing");
            prev = wi;
            row.push_back(wi);
        }
        dims.push_back(int(labs.size()));
        labels.push_back(std::move(labs));
        wts.push_back(std::move(row));
        ++idx;
    }
    const int k_max = k_min + int(dims.size()) - 1;

    require(j["differential"].is_array(), "differential: expected an array");
    require(int(j["differential"].size()) == int(dims.size()) - 1,
            "differential: one entry per degree edge");
    std::vector<la::Matrix> diffs;
    int t = 0;
    for (const auto& e : j["differential"]) {
        only_keys(e, {"from", "triplets"}, "differential");
        require(e.contains("from") && e.contains("triplets"),
                "differential: fields from, triplets are required");
        const int from = co ? k_min + t : k_min + t + 1;
        require(get_int(e["from"], "differential.from") == from,
                "differential.from: must follow the degree edges in order");
        const int rows = dims[size_t(co ? t + 1 : t)];
        const int cols = dims[size_t(co ? t : t + 1)];
        la::Matrix m(rows, cols);
        require(e["triplets"].is_array(), "differential.triplets: expected an array");
        for (const auto& tr : e["triplets"]) {
            require(tr.is_array() && tr.size() == 3, "triplet: expected [row, col, value]");
            const int r = get_int(tr[0], "triplet.row");
            const int c = get_int(tr[1], "triplet.col");
            require(r >= 0 && r < rows && c >= 0 && c < cols, "triplet: index out of range");
            m.at(r, c) = get_rat(tr[2], "triplet.value");
        }
        diffs.push_back(std::move(m));
        ++t;
    }

    // top weight drives the chain-side thresholds
    int top = 0;
    for (const auto& row : wts)
        for (int w : row) top = std::max(top, w);

    std::vector<std::vector<la::Subspace>> steps(dims.size());
    for (size_t kd = 0; kd < dims.size(); ++kd) {
        for (int p = p_lo; p <= p_hi; ++p) {
            const int thr = co ? p : top - p;
            int cnt = 0;
            while (cnt < dims[kd] && wts[kd][size_t(cnt)] >= thr) ++cnt;
            std::vector<la::Vec> units;
            for (int i = 0; i < cnt; ++i) units.push_back(la::unit_vec(dims[kd], i));
            steps[kd].push_back(la::Subspace::span(dims[kd], units));
        }
    }

    filtered::WeightedComplex wc;
    wc.fc = filtered::FilteredComplex::make(co ? filtered::Orient::cochain : filtered::Orient::chain,
                                            k_min, dims, std::move(diffs), p_lo, std::move(steps));
    for (size_t kd = 0; kd < dims.size(); ++kd) {
        std::vector<std::pair<int, la::Subspace>> pieces;
        int i = 0;
        while (i < dims[kd]) {
            const int w = wts[kd][size_t(i)];
            std::vector<la::Vec> units;
            int jj = i;
            while (jj < dims[kd] && wts[kd][size_t(jj)] == w) {
                units.push_back(la::unit_vec(dims[kd], jj));
                ++jj;
            }
            pieces.emplace_back(w, la::Subspace::span(dims[kd], units));
            i = jj;
        }
        wc.grading.push_back(std::move(pieces));
    }
    (void)k_max;
    return wc;
}

}  // namespace

Json complex_to_json(const std::string& name, const filtered::WeightedComplex& wc,
                     const std::vector<std::vector<std::string>>& labels) {
    return weighted_to_json(name, wc, labels);
}

Json duality_to_json(const std::string& name, const filtered::DualityData& dd,
                     const std::vector<std::vector<std::string>>& labels) {
    Json j;
    j["name"] = name;
    j["dual_of"] = weighted_to_json(name + "-primal", dd.chain, labels);
    return j;
}

ComplexLoad parse_complex(const std::string& text) {
    ComplexLoad out;
    try {
        const Json j = Json::parse(text);
        require(j.is_object(), "complex: expected an object");
        if (j.contains("dual_of")) {
            only_keys(j, {"name", "dual_of"}, "dual complex");
            require(j.contains("name"), "dual complex: field name is required");
            out.name = get_str(j["name"], "name");
            out.is_dual = true;
            out.wc = weighted_from_json(j["dual_of"], out.labels);
            out.dual = filtered::dualize(out.wc.fc);
        } else {
            out.wc = weighted_from_json(j, out.labels);
            out.name = get_str(j["name"], "name");
        }
    } catch (const std::exception& e) {
        out.malformed = true;
        out.error = e.what();
    }
    return out;
}

ComplexLoad load_complex_file(const std::string& path) {
    try {
        return parse_complex(read_file(path));
    } catch (const std::exception& e) {
        ComplexLoad out;
        out.malformed = true;
        out.error = e.what();
        return out;
    }
}

// ---- reports ------------------------------------------------------------------

Json vec_to_json(const la::Vec& v) {
    Json a = Json::array();
    for (const auto& c : v) a.push_back(c.str());
    return a;
}

Json spectral_report(const spectral::SpectralResult& s, const spectral::LimitReport& lim,
                     const ReportMeta& meta) {
    Json j;
    j["kind"] = "spectral";
    j["group"] = meta.group;
    j["model"] = meta.model;
    if (meta.poly_weight >= 0) j["poly_weight"] = meta.poly_weight;
    j["seed"] = meta.seed;
    j["max_page"] = meta.max_page;
    j["homological"] = s.homological;
    Json pages = Json::array();
    for (const auto& pg : s.pages) {
        Json p;
        p["r"] = pg.r;
        Json cells = Json::array();
        for (const auto& [key, cell] : pg.cells) {
            if (cell.E.dim() == 0) continue;
            Json c;
            c["p"] = key.p;
            c["q"] = key.q;
            c["dimE"] = cell.E.dim();
            c["d_rank"] = pg.d_at(key).rank();
            cells.push_back(std::move(c));
        }
        p["cells"] = std::move(cells);
        pages.push_back(std::move(p));
    }
    j["pages"] = std::move(pages);
    j["stable_from"] = lim.r_stab;
    Json limit;
    Json einf = Json::array();
    for (const auto& [key, d] : lim.einf) {
        Json c;
        c["p"] = key.p;
        c["q"] = key.q;
        c["dim"] = d;
        einf.push_back(std::move(c));
    }
    limit["einf"] = std::move(einf);
    limit["matches_graded"] = lim.matches_graded;
    Json mism = Json::array();
    for (const auto& m : lim.mismatches) mism.push_back(Json::array({m[0], m[1], m[2], m[3]}));
    limit["mismatches"] = std::move(mism);
    limit["k_min"] = lim.cohomology.k_min;
    limit["betti"] = lim.cohomology.betti;
    j["limit"] = std::move(limit);
    return j;
}

Json morphism_report(const morphism::PageMorphism& pm, const morphism::IdentityReport& idr,
                     std::uint64_t seed) {
    Json j;
    j["kind"] = "morphism";
    j["seed"] = seed;
    Json pages = Json::array();
    for (size_t r = 0; r < pm.phi.size(); ++r) {
        Json p;
        p["r"] = int(r);
        p["chain_map"] = bool(pm.chain_map[r]);
        // commuting_square[i] certifies the descent onto page i+1
        if (r >= 1 && r - 1 < pm.commuting_square.size())
            p["commuting_square"] = bool(pm.commuting_square[r - 1]);
        Json cells = Json::array();
        for (const auto& [key, m] : pm.phi[r]) {
            if (m.rows() == 0 && m.cols() == 0) continue;
            Json c;
            c["p"] = key.p;
            c["q"] = key.q;
            c["rank_phi"] = m.rank();
            cells.push_back(std::move(c));
        }
        p["cells"] = std::move(cells);
        pages.push_back(std::move(p));
    }
    j["pages"] = std::move(pages);
    Json idc;
    idc["holds"] = idr.holds;
    if (idr.certificate) {
        const auto& c = *idr.certificate;
        Json cert;
        cert["degree"] = c.degree;
        cert["a"] = c.a;
        cert["b"] = c.b;
        cert["omega"] = vec_to_json(c.omega);
        cert["eta"] = vec_to_json(c.eta);
        cert["value"] = c.value.str();
        idc["certificate"] = std::move(cert);
    }
    j["identity_check"] = std::move(idc);
    if (pm.first_failure) {
        Json f;
        f["r"] = (*pm.first_failure)[0];
        f["p"] = (*pm.first_failure)[1];
        f["q"] = (*pm.first_failure)[2];
        j["first_failure"] = std::move(f);
    }
    return j;
}

Json numeric_report(const numeric::PullbackReport& r, std::uint64_t seed) {
    Json j;
    j["kind"] = "pullback";
    j["seed"] = seed;
    j["map"] = r.map_id;
    j["omega"] = r.omega_label;
    j["eta"] = r.eta_label;
    j["degree"] = r.degree;
    j["weight_ok"] = r.weight_ok;
    j["grids"] = Json::array({r.grids[0], r.grids[1]});
    j["residuals"] = Json::array({r.residuals[0], r.residuals[1]});
    j["t1"] = Json::array({r.t1[0], r.t1[1]});
    j["t2"] = Json::array({r.t2[0], r.t2[1]});
    j["order"] = r.order;
    j["floored"] = r.floored;
    j["pass"] = r.pass;
    return j;
}

}  // namespace rumin::io
