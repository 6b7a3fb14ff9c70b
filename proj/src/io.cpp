#include "kvwb/io.hpp"

#include "kvwb/builtins.hpp"

#include <fstream>

namespace kvwb {

namespace {

template <class T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::vector<std::string> outcome_ids(const Json& j) {
    if (!j.is_array()) throw ParseError("'outcomes' must be an array of ids");
    std::vector<std::string> out;
    for (const auto& x : j) {
        if (!x.is_string()) throw ParseError("outcome ids must be strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

int index_of(const TestSpace& ts, const std::string& id) {
    for (int i = 0; i < ts.size(); ++i)
        if (ts.outcomes[static_cast<size_t>(i)] == id) return i;
    throw ParseError("unknown outcome id '" + id + "'");
}

Json field_name(Field f) { return to_string(f); }

}  // namespace

Json to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number()) return rational_from_decimal_double(j.get<double>());
    throw ParseError("expected a rational number, got " + j.dump());
}

Json to_json(const QVector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
    return out;
}

Json to_json(const QMatrix& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(QVector(m.row(r).transpose())));
    return out;
}

QVector qvector_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("expected an array of rationals");
    QVector v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = rational_from_json(j[i]);
    return v;
}

QMatrix qmatrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("expected a non-empty array of rows");
    const auto cols = j[0].size();
    QMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < j.size(); ++r) {
        if (j[r].size() != cols) throw ParseError("matrix rows differ in length");
        m.row(static_cast<Eigen::Index>(r)) = qvector_from_json(j[r]).transpose();
    }
    return m;
}

Json decimal_json(double x) { return format_double(x); }

Json decimal_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(decimal_json(v(i)));
    return out;
}

Json decimal_json(const Eigen::MatrixXd& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(decimal_json(Eigen::VectorXd(m.row(r).transpose())));
    return out;
}

double double_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s.find('/') != std::string::npos) return to_double(parse_rational(s));
        try {
            size_t used = 0;
            const double d = std::stod(s, &used);
            if (used == s.size()) return d;
        } catch (const std::exception&) {
        }
    }
    throw ParseError("expected a decimal number, got " + j.dump());
}

Eigen::VectorXd dvector_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("expected an array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = double_from_json(j[i]);
    return v;
}

Eigen::MatrixXd dmatrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("expected a non-empty array of rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (size_t r = 0; r < j.size(); ++r) {
        if (j[r].size() != j[0].size()) throw ParseError("matrix rows differ in length");
        m.row(static_cast<Eigen::Index>(r)) = dvector_from_json(j[r]).transpose();
    }
    return m;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

// ---------------------------------------------------------------------------
// Models

Model model_from_json(const Json& j, std::uint64_t seed) {
    if (!j.is_object()) throw ParseError("model must be a JSON object");
    const Json& states = require(j, "states");
    const std::string kind = require(states, "kind").get<std::string>();
    Model m;
    if (kind == "quantum") {
        const Field field = parse_field(require(states, "field").get<std::string>());
        const int dim = require(states, "dim").get<int>();
        std::uint64_t group_seed = seed;
        int generator_count = 2;
        if (j.contains("group")) {
            group_seed = j["group"].value("seed", seed);
            generator_count = j["group"].value("generator_count", 2);
        }
        m = quantum_model(field, dim, group_seed, generator_count);
        if (j.contains("outcomes") && outcome_ids(j["outcomes"]) != m.testspace.outcomes)
            throw ParseError("quantum model outcomes must match the default frame sample");
    } else if (kind == "polytope") {
        m.testspace.outcomes = outcome_ids(require(j, "outcomes"));
        for (const auto& t : require(j, "tests")) {
            std::vector<int> test;
            for (const auto& x : t) test.push_back(index_of(m.testspace, x.get<std::string>()));
            m.testspace.tests.push_back(test);
        }
        PolytopeStates ps;
        for (const auto& e : require(states, "extreme")) {
            if (!e.is_object()) throw ParseError("extreme states are objects {outcome: probability}");
            State s = zero_vector(m.testspace.size());
            for (const auto& [id, p] : e.items()) s(index_of(m.testspace, id)) = rational_from_json(p);
            ps.extreme.push_back(s);
        }
        m.states = ps;
        if (j.contains("group")) {
            const Json& g = j["group"];
            const std::string gk = g.value("kind", "permutation");
            if (gk != "permutation") throw ParseError("polytope models take permutation groups, got '" + gk + "'");
            m.group.cap = g.value("cap", static_cast<std::size_t>(kDefaultEnumerationCap));
            for (const auto& gen : g.value("generators", Json::array())) {
                Permutation p = identity_permutation(m.testspace.size());
                for (const auto& [from, to] : gen.items())
                    p[static_cast<size_t>(index_of(m.testspace, from))] = index_of(m.testspace, to.get<std::string>());
                m.group.permutations.push_back(p);
            }
        }
    } else {
        throw ParseError("unknown state-space kind '" + kind + "'");
    }
    if (j.contains("name")) m.name = j["name"].get<std::string>();
    return m;
}

Json model_to_json(const Model& m) {
    Json j;
    j["name"] = m.name;
    j["outcomes"] = m.testspace.outcomes;
    Json tests = Json::array();
    for (const auto& t : m.testspace.tests) {
        Json ids = Json::array();
        for (int x : t) ids.push_back(m.testspace.outcomes[static_cast<size_t>(x)]);
        tests.push_back(ids);
    }
    j["tests"] = tests;
    if (m.is_quantum()) {
        j["states"] = {{"kind", "quantum"}, {"field", field_name(m.quantum().field)}, {"dim", m.quantum().dim}};
        j["group"] = {{"kind", "unitary"},
                      {"seed", m.group.seed},
                      {"generator_count", m.group.unitaries.size()}};
    } else {
        Json extreme = Json::array();
        for (const auto& s : m.polytope().extreme) {
            Json e = Json::object();
            for (Eigen::Index x = 0; x < s.size(); ++x)
                if (s(x) != 0) e[m.testspace.outcomes[static_cast<size_t>(x)]] = to_json(s(x));
            extreme.push_back(e);
        }
        j["states"] = {{"kind", "polytope"}, {"extreme", extreme}};
        Json gens = Json::array();
        for (const auto& p : m.group.permutations) {
            Json g = Json::object();
            for (size_t x = 0; x < p.size(); ++x)
                g[m.testspace.outcomes[x]] = m.testspace.outcomes[static_cast<size_t>(p[x])];
            gens.push_back(g);
        }
        j["group"] = {{"kind", "permutation"}, {"generators", gens}, {"cap", m.group.cap}};
    }
    return j;
}

Model load_model(const std::string& path, std::uint64_t seed) {
    Model m = model_from_json(read_json_file(path), seed);
    if (m.name.empty()) m.name = path;
    return m;
}

// ---------------------------------------------------------------------------
// Reports

Json to_json(const ValidationReport& r) {
    Json v = Json::array();
    for (const auto& x : r.violations) v.push_back({{"code", x.code}, {"detail", x.detail}});
    return {{"ok", r.ok()}, {"violations", v}};
}

Json to_json(const BisymmetryReport& r) {
    return {{"method", r.method},
            {"pure_state_transitive", optional_json(r.pure_state_transitive)},
            {"test_transitive", optional_json(r.test_transitive)},
            {"pair_transitive", optional_json(r.pair_transitive)},
            {"fully_bisymmetric", optional_json(r.fully_bisymmetric)},
            {"group_order", optional_json(r.group_order)},
            {"outcome_orbits", optional_json(r.outcome_orbits)}};
}

Json to_json(const FormFlags& f) {
    return {{"positive_on_cone", optional_json(f.positive_on_cone)},
            {"invariant", optional_json(f.invariant)},
            {"normalized", optional_json(f.normalized)},
            {"orthogonalizing", optional_json(f.orthogonalizing)},
            {"positive_definite", optional_json(f.positive_definite)}};
}

Json to_json(const BilinearForm& f) { return {{"matrix", to_json(f.matrix)}, {"flags", to_json(f.flags)}}; }

QMatrix form_from_json(const Json& j) {
    // Output of `kvwb spin` nests the form.
    if (j.is_object() && !j.contains("matrix") && j.contains("form")) return form_from_json(j["form"]);
    const QMatrix m = qmatrix_from_json(j.is_object() ? require(j, "matrix") : j);
    if (m.rows() != m.cols()) throw ParseError("form matrix must be square");
    return m;
}

Json bipartite_to_json(const Model& a, const Model& b, const BipartiteState& w) {
    Json out = Json::array();
    for (Eigen::Index x = 0; x < w.table.rows(); ++x)
        for (Eigen::Index y = 0; y < w.table.cols(); ++y)
            if (w.table(x, y) != 0)
                out.push_back({a.testspace.outcomes[static_cast<size_t>(x)], b.testspace.outcomes[static_cast<size_t>(y)],
                               to_json(w.table(x, y))});
    return out;
}

BipartiteState bipartite_from_json(const Json& j, const Model& a, const Model& b) {
    BipartiteState w{zero_matrix(a.testspace.size(), b.testspace.size())};
    const Json& entries = j.is_object() && j.contains("table") ? j["table"] : j;
    if (entries.is_array()) {
        for (const auto& e : entries) {
            if (!e.is_array() || e.size() != 3) throw ParseError("table entries are [x, y, p]");
            w.table(index_of(a.testspace, e[0].get<std::string>()), index_of(b.testspace, e[1].get<std::string>())) =
                rational_from_json(e[2]);
        }
    } else if (entries.is_object()) {
        // Keys "x,y".
        for (const auto& [key, p] : entries.items()) {
            const auto comma = key.find(',');
            if (comma == std::string::npos) throw ParseError("table keys are \"x,y\"");
            w.table(index_of(a.testspace, key.substr(0, comma)), index_of(b.testspace, key.substr(comma + 1))) =
                rational_from_json(p);
        }
    } else {
        throw ParseError("bipartite table must be an array or an object");
    }
    return w;
}

Json to_json(const Cone& k) {
    Json gens = Json::array();
    for (const auto& g : k.generators) gens.push_back(to_json(g));
    Json j = {{"kind", k.kind == ConeKind::Polyhedral ? "polyhedral" : "psd"}, {"dim", k.dim}, {"generators", gens}};
    if (k.kind == ConeKind::Psd && k.operators) {
        j["field"] = field_name(k.operators->field());
        j["hilbert_dim"] = k.operators->hilbert_dim();
    }
    return j;
}

Json to_json(const MembershipCertificate& c) {
    Json j = {{"member", c.member}, {"method", c.method}};
    if (c.coefficients.size()) j["coefficients"] = to_json(c.coefficients);
    if (c.separator.size()) j["separator"] = to_json(c.separator);
    if (c.method != "exact") j["eigenvalue_floor"] = decimal_json(c.eigenvalue_floor);
    return j;
}

MembershipCertificate membership_from_json(const Json& j) {
    MembershipCertificate c;
    c.member = require(j, "member").get<bool>();
    c.method = j.value("method", "exact");
    if (j.contains("coefficients")) c.coefficients = qvector_from_json(j["coefficients"]);
    if (j.contains("separator")) c.separator = qvector_from_json(j["separator"]);
    if (j.contains("eigenvalue_floor")) c.eigenvalue_floor = double_from_json(j["eigenvalue_floor"]);
    return c;
}

Json to_json(const DualityCertificate& c) {
    Json cone_rays = Json::array(), dual_rays = Json::array(), cid = Json::array(), dic = Json::array();
    for (const auto& r : c.cone_rays) cone_rays.push_back(to_json(r));
    for (const auto& r : c.dual_rays) dual_rays.push_back(to_json(r));
    for (const auto& m : c.cone_in_dual) cid.push_back(to_json(m));
    for (const auto& m : c.dual_in_cone) dic.push_back(to_json(m));
    Json j = {{"verdict", c.verdict}, {"method", c.method}, {"cone_rays", cone_rays}, {"dual_rays", dual_rays},
              {"cone_in_dual", cid},  {"dual_in_cone", dic}};
    if (c.method != "exact") {
        j["min_sample_pairing"] = decimal_json(c.min_sample_pairing);
        j["form_is_trace_multiple"] = optional_json(c.form_is_trace_multiple);
    }
    return j;
}

DualityCertificate duality_from_json(const Json& j) {
    DualityCertificate c;
    c.verdict = require(j, "verdict").get<bool>();
    c.method = require(j, "method").get<std::string>();
    for (const auto& r : require(j, "cone_rays")) c.cone_rays.push_back(qvector_from_json(r));
    for (const auto& r : require(j, "dual_rays")) c.dual_rays.push_back(qvector_from_json(r));
    for (const auto& m : require(j, "cone_in_dual")) c.cone_in_dual.push_back(membership_from_json(m));
    for (const auto& m : require(j, "dual_in_cone")) c.dual_in_cone.push_back(membership_from_json(m));
    if (j.contains("min_sample_pairing")) c.min_sample_pairing = double_from_json(j["min_sample_pairing"]);
    if (j.contains("form_is_trace_multiple") && !j["form_is_trace_multiple"].is_null())
        c.form_is_trace_multiple = j["form_is_trace_multiple"].get<bool>();
    return c;
}

Json to_json(const WeakDualityResult& r) {
    Json j = {{"verdict", optional_json(r.verdict)}, {"reason", r.reason}};
    if (r.verdict == true) {
        j["map"] = to_json(r.map);
        j["bijection"] = r.bijection;
        j["scales"] = to_json(r.scales);
    }
    return j;
}

Json to_json(const IsomorphismCheck& c) {
    return {{"verdict", c.verdict},
            {"invertible", c.invertible},
            {"positive", c.positive},
            {"inverse_positive", c.inverse_positive},
            {"method", c.method}};
}

Json to_json(const HomogeneityReport& r) {
    Json w = Json::array();
    for (const auto& c : r.witnesses) w.push_back(to_json(c));
    return {{"verdict", r.verdict},
            {"all_covered", r.all_covered},
            {"witnesses", w},
            {"covered", r.covered},
            {"covering_witness", r.covering_witness}};
}

// ---------------------------------------------------------------------------
// Jordan algebras

Json to_json(const JordanAlgebra& j) {
    Json product = Json::array();
    for (int a = 0; a < j.dim; ++a) {
        Json row = Json::array();
        for (int b = 0; b < j.dim; ++b) {
            if (j.is_exact()) {
                QVector v(j.dim);
                for (int k = 0; k < j.dim; ++k) v(k) = j.exact_structure[static_cast<size_t>(k)](a, b);
                row.push_back(to_json(v));
            } else {
                Eigen::VectorXd v(j.dim);
                for (int k = 0; k < j.dim; ++k) v(k) = j.structure[static_cast<size_t>(k)](a, b);
                row.push_back(decimal_json(v));
            }
        }
        product.push_back(row);
    }
    return {{"kind", to_string(j.kind)},
            {"name", j.name()},
            {"dim", j.dim},
            {"exact", j.is_exact()},
            {"unit", j.is_exact() ? to_json(j.exact_unit) : decimal_json(j.unit)},
            {"product", product}};
}

JordanAlgebra algebra_from_json(const Json& j) {
    const Json& root = j.contains("algebra") ? j["algebra"] : j;
    const int d = require(root, "dim").get<int>();
    const Json& product = require(root, "product");
    if (static_cast<int>(product.size()) != d) throw ParseError("product must be dim x dim x dim");
    const bool exact = root.value("exact", false);
    if (exact) {
        std::vector<QMatrix> s(static_cast<size_t>(d), zero_matrix(d, d));
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                const QVector v = qvector_from_json(product[static_cast<size_t>(a)][static_cast<size_t>(b)]);
                if (v.size() != d) throw ParseError("product entries must have length dim");
                for (int k = 0; k < d; ++k) s[static_cast<size_t>(k)](a, b) = v(k);
            }
        return algebra_from_exact_structure(std::move(s), qvector_from_json(require(root, "unit")));
    }
    std::vector<Eigen::MatrixXd> s(static_cast<size_t>(d), Eigen::MatrixXd::Zero(d, d));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            const Eigen::VectorXd v = dvector_from_json(product[static_cast<size_t>(a)][static_cast<size_t>(b)]);
            if (v.size() != d) throw ParseError("product entries must have length dim");
            for (int k = 0; k < d; ++k) s[static_cast<size_t>(k)](a, b) = v(k);
        }
    return algebra_from_structure(std::move(s), dvector_from_json(require(root, "unit")));
}

Json to_json(const IdentityCheck& c) {
    return {{"commutative", c.commutative},
            {"unital", c.unital},
            {"exact_identity", optional_json(c.exact_identity)},
            {"residual", decimal_json(c.residual)},
            {"passed", c.passed()}};
}

Json to_json(const SymmetricConeReport& r) {
    return {{"pass", r.pass},
            {"failure", r.failure},
            {"identity", to_json(r.identity)},
            {"identity_gate", r.identity_gate},
            {"self_dual", r.self_dual},
            {"min_pairing", decimal_json(r.min_pairing)},
            {"homogeneous", r.homogeneous},
            {"max_sqrt_error", decimal_json(r.max_sqrt_error)},
            {"cone_preserved", r.cone_preserved},
            {"formally_real", r.formally_real},
            {"trace_form_floor", decimal_json(r.trace_form_floor)},
            {"samples", r.samples},
            {"seed", r.seed}};
}

Json to_json(const RecoveryResult& r) {
    Json runs = Json::array();
    for (const auto& run : r.runs)
        runs.push_back({{"seed", run.seed},
                        {"converged", run.converged},
                        {"residual", decimal_json(run.residual)},
                        {"iterations", run.iterations}});
    Json j = {{"status", r.status},
              {"linear_solution_dim", r.linear_solution_dim},
              {"exact", r.exact},
              {"residual", decimal_json(r.residual)},
              {"unique", r.unique},
              {"seed_spread", decimal_json(r.seed_spread)},
              {"self_dual_verified", r.self_dual_verified},
              {"squares_in_cone", r.squares_in_cone},
              {"trace_form_pd", r.trace_form_pd},
              {"imposed_constraints", r.imposed_constraints},
              {"runs", runs}};
    j["algebra"] = r.algebra ? to_json(*r.algebra) : Json(nullptr);
    return j;
}

Json to_json(const Identification& id) {
    Json comps = Json::array();
    for (const auto& [d, r] : id.simple_components) comps.push_back({{"dim", d}, {"rank", r}});
    return {{"rank", id.rank}, {"simple_components", comps}, {"candidates", id.candidates}};
}

}  // namespace kvwb
