#include "kvwb/pipeline.hpp"

#include "kvwb/composites.hpp"
#include "kvwb/cones.hpp"
#include "kvwb/forms.hpp"
#include "kvwb/jordan.hpp"
#include "kvwb/linearization.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace kvwb {

std::string to_string(StageStatus s) {
    switch (s) {
        case StageStatus::Pass: return "pass";
        case StageStatus::Fail: return "fail";
        case StageStatus::NotApplicable: return "not-applicable";
        case StageStatus::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

struct StageSpec {
    const char* name;
    const char* negative;
};

constexpr StageSpec kStages[] = {
    {"validation", "invalid"},
    {"bisymmetry", "not-bisymmetric"},
    {"irreducibility", "reducible"},
    {"spin_form", "no-spin-form"},
    {"conjugate", "no-conjugate"},
    {"self_duality", "not-self-dual"},
    {"sharpness", "not-sharp"},
    {"homogeneity", "not-homogeneous"},
    {"jordan_recovery", "no-jordan"},
    {"identification", "unidentified"},
};

StageStatus verdict(bool ok) { return ok ? StageStatus::Pass : StageStatus::Fail; }

StageStatus verdict(const std::optional<bool>& ok) {
    return ok ? verdict(*ok) : StageStatus::Unknown;
}

bool forms_agree(const QMatrix& a, const QMatrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    if (a == b) return true;
    return (to_double(a) - to_double(b)).cwiseAbs().maxCoeff() <= tol;
}

// Hermitian diag(1, 2, ..., n): a full-rank purification sample.
CMatrix sample_root(int n) {
    CMatrix s = CMatrix::zero(n);
    for (int i = 0; i < n; ++i) s.re(i, i) = i + 1;
    return s;
}

State quantum_state(const Model& m, const CMatrix& rho) {
    const auto& p = m.quantum().projectors;
    State s(static_cast<Eigen::Index>(p.size()));
    for (size_t x = 0; x < p.size(); ++x) s(static_cast<Eigen::Index>(x)) = (rho * p[x]).trace_re();
    return s;
}

Json rays_json(const std::vector<QVector>& rays) {
    Json out = Json::array();
    for (const auto& r : rays) out.push_back(to_json(r));
    return out;
}

class Runner {
public:
    Runner(const Model& m, const PipelineOptions& o) : m_(m), o_(o) {}

    PipelineReport run() {
        PipelineReport r;
        r.model = model_to_json(m_);
        r.seed = o_.seed;
        r.tol = o_.tol;
        r.expectations = o_.expectations;
        stage("validation", {}, [&](Json& d) {
            const auto v = validate_model(m_);
            d["report"] = to_json(v);
            if (v.ok()) {
                e_ = build_effect_space(m_);
                g_ = linear_group(m_, *e_);
                d["effect_space_dim"] = e_->dim;
                d["rank"] = m_.rank();
            }
            return verdict(v.ok());
        });
        stage("bisymmetry", {"validation"}, [&](Json& d) {
            const auto b = check_bisymmetry(m_);
            d = to_json(b);
            return verdict(b.fully_bisymmetric);
        });
        stage("irreducibility", {"validation"}, [&](Json& d) {
            const auto ir = is_irreducible(*e_, *g_);
            d["irreducible"] = ir.irreducible;
            d["form_space_dim"] = ir.form_space_dim;
            if (m_.is_quantum()) d["generator_seed"] = m_.group.seed;
            return verdict(ir.irreducible);
        });
        stage("spin_form", {"validation"}, [&](Json& d) {
            const auto u = check_spin_uniqueness(m_, *e_, *g_);
            d["verdict"] = u.verdict;
            d["irreducible"] = u.irreducible;
            d["solution_space_dim"] = u.solution_space_dim;
            d["positive_definite"] = u.positive_definite ? Json(*u.positive_definite) : Json(nullptr);
            d["eigenvalue_floor"] = decimal_json(u.eigenvalue_floor);
            d["form"] = u.form ? to_json(*u.form) : Json(nullptr);
            if (u.form) form_ = u.form->matrix;
            return verdict(u.form_found && u.positive_definite == true && u.verdict != "violated");
        });
        stage("conjugate", {"spin_form"}, [&](Json& d) {
            const Permutation gamma = conjugation_map(m_);
            const auto search = find_conjugate_state(m_, *e_, *g_, gamma, true, o_.seed);
            d["gamma"] = gamma;
            d["invariance_required"] = true;
            d["seed"] = o_.seed;
            d["method"] = search.method;
            d["free_parameters"] = search.free_parameters;
            d["cutting_rounds"] = search.cutting_rounds;
            if (!search.eta) {
                d["eta"] = nullptr;
                return StageStatus::Fail;
            }
            eta_ = *search.eta;
            d["eta"] = bipartite_to_json(m_, m_, *eta_);
            d["isomorphism_state"] = to_json(is_isomorphism_state(*e_, *e_, *eta_));
            const auto cf = spin_form_from_conjugate(m_, *e_, *g_, Conjugate{gamma, *eta_});
            d["form"] = to_json(cf.form);
            d["averaged"] = cf.averaged;
            d["symmetric"] = cf.symmetric;
            const bool agrees = forms_agree(cf.form.matrix, *form_, o_.tol);
            d["matches_spin_form"] = agrees;
            return verdict(agrees);
        });
        stage("self_duality", {"spin_form"}, [&](Json& d) {
            cone_ = effect_cone(*e_, 20, o_.seed);
            d["cone_seed"] = o_.seed;
            d["cone"] = to_json(*cone_);
            const auto cert = is_self_dual(*cone_, *form_, o_.tol);
            d["certificate"] = to_json(cert);
            if (cone_->kind == ConeKind::Polyhedral) {
                const auto weak = is_weakly_self_dual(*cone_, *form_);
                Json w = to_json(weak);
                w["rays"] = rays_json(irredundant_generators(cone_->generators));
                w["targets"] = rays_json(dual_cone(*cone_, *form_).generators);
                d["weak_self_duality"] = w;
            }
            return verdict(cert.verdict);
        });
        stage("sharpness", {"validation"}, [&](Json& d) {
            const bool sharp = is_sharp(m_);
            d["sharp"] = sharp;
            if (!m_.is_quantum()) {
                Json faces = Json::object();
                for (int x = 0; x < m_.testspace.size(); ++x)
                    faces[m_.testspace.outcomes[static_cast<size_t>(x)]] = certainty_face(m_, x);
                d["certainty_faces"] = faces;
            } else {
                d["method"] = "analytic";
            }
            return verdict(sharp);
        });
        stage("homogeneity", {"conjugate", "self_duality"}, [&](Json& d) {
            std::vector<BipartiteState> witnesses{*eta_};
            std::vector<State> samples;
            if (m_.is_quantum()) {
                const int n = m_.quantum().dim;
                samples.push_back(quantum_state(m_, Rational(1, n) * CMatrix::identity(n)));
                const CMatrix s = sample_root(n);
                const CMatrix s2 = s * s;
                samples.push_back(quantum_state(m_, Rational(1) / s2.trace_re() * s2));
                witnesses.push_back(purification_witness(m_, s));
                d["sample_root"] = "diag(1..n)";
            } else {
                // Interior samples: the barycenter and its midpoints with each vertex.
                const auto& ext = m_.polytope().extreme;
                State bary = zero_vector(m_.testspace.size());
                for (const auto& v : ext) bary += v;
                bary /= Rational(static_cast<long>(ext.size()));
                samples.push_back(bary);
                for (const auto& v : ext) samples.push_back(State((v + bary) / Rational(2)));
                const Permutation gamma = conjugation_map(m_);
                for (const auto& s : samples)
                    if (auto w = diagonal_witness(m_, *e_, gamma, s)) witnesses.push_back(*w);
            }
            const auto h = homogeneity_report(m_, *e_, witnesses, samples, o_.tol);
            d = to_json(h);
            Json js = Json::array();
            for (const auto& s : samples) js.push_back(to_json(s));
            d["samples"] = js;
            return verdict(h.all_covered);
        });
        stage("jordan_recovery", {"self_duality"}, [&](Json& d) {
            auto p = recovery_problem(*e_, *g_, *form_);
            p.seed = o_.seed;
            const auto rr = recover_jordan_product(p);
            d = to_json(rr);
            d["seed"] = o_.seed;
            d["newton_seeds"] = p.newton_seeds;
            if (rr.algebra) algebra_ = *rr.algebra;
            return verdict(rr.status == "recovered" && rr.unique);
        });
        stage("identification", {"jordan_recovery"}, [&](Json& d) {
            const auto id = identify_algebra(*algebra_);
            d = to_json(id);
            const bool named = !id.candidates.empty() &&
                               std::none_of(id.candidates.begin(), id.candidates.end(),
                                            [](const std::string& c) { return c.find("unclassified") != std::string::npos; });
            return verdict(named);
        });
        r.stages = std::move(stages_);
        std::set<std::string> expected(o_.expectations.begin(), o_.expectations.end());
        std::set<std::string> failed;
        for (const auto& s : r.stages) {
            if (s.status != StageStatus::Fail) continue;
            failed.insert(s.negative);
            if (!expected.count(s.negative)) r.unexpected_failures.push_back(s.negative);
        }
        for (const auto& x : o_.expectations)
            if (!failed.count(x)) r.unmet_expectations.push_back(x);
        return r;
    }

private:
    void stage(const std::string& name, const std::vector<std::string>& needs, const std::function<StageStatus(Json&)>& body) {
        Stage s;
        s.name = name;
        for (const auto& known : kStages)
            if (name == known.name) s.negative = known.negative;
        s.detail = Json::object();
        std::vector<std::string> missing;
        for (const auto& n : needs) {
            const auto it = std::find_if(stages_.begin(), stages_.end(), [&](const Stage& t) { return t.name == n; });
            if (it == stages_.end() || it->status != StageStatus::Pass) missing.push_back(n);
        }
        if (!missing.empty()) {
            s.status = StageStatus::NotApplicable;
            s.detail["requires"] = missing;
        } else {
            try {
                s.status = body(s.detail);
            } catch (const CapExceeded&) {
                throw;
            } catch (const Error& e) {
                s.status = StageStatus::Fail;
                s.detail["error"] = e.what();
            }
        }
        stages_.push_back(std::move(s));
    }

    const Model& m_;
    const PipelineOptions& o_;
    std::vector<Stage> stages_;
    std::optional<OrderUnitSpace> e_;
    std::optional<LinearGroup> g_;
    std::optional<QMatrix> form_;
    std::optional<BipartiteState> eta_;
    std::optional<Cone> cone_;
    std::optional<JordanAlgebra> algebra_;
};

}  // namespace

std::vector<std::string> expectation_tokens() {
    std::vector<std::string> out;
    for (const auto& s : kStages) out.emplace_back(s.negative);
    return out;
}

int PipelineReport::exit_code() const { return unexpected_failures.empty() && unmet_expectations.empty() ? 0 : 1; }

const Stage& PipelineReport::stage(const std::string& name) const {
    for (const auto& s : stages)
        if (s.name == name) return s;
    throw Error("no stage named '" + name + "'");
}

PipelineReport run_pipeline(const Model& m, const PipelineOptions& options) {
    const auto tokens = expectation_tokens();
    for (const auto& x : options.expectations)
        if (std::find(tokens.begin(), tokens.end(), x) == tokens.end())
            throw ParseError("unknown expectation '" + x + "'");
    return Runner(m, options).run();
}

Json to_json(const PipelineReport& r) {
    Json stages = Json::array();
    for (const auto& s : r.stages)
        stages.push_back({{"name", s.name}, {"status", to_string(s.status)}, {"negative", s.negative}, {"detail", s.detail}});
    return {{"model", r.model},
            {"seed", r.seed},
            {"tol", decimal_json(r.tol)},
            {"expectations", r.expectations},
            {"unexpected_failures", r.unexpected_failures},
            {"unmet_expectations", r.unmet_expectations},
            {"exit_code", r.exit_code()},
            {"stages", stages}};
}

namespace {

bool is_leaf(const Json& j) {
    if (j.is_object()) return j.empty();
    if (j.is_array()) return std::none_of(j.begin(), j.end(), [](const Json& x) { return x.is_object(); });
    return true;
}

void markdown_fields(std::ostringstream& out, const Json& j, int depth) {
    const std::string indent(static_cast<size_t>(2 * depth), ' ');
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (is_leaf(v)) {
                out << indent << "- " << k << ": `" << v.dump() << "`\n";
            } else {
                out << indent << "- " << k << ":\n";
                markdown_fields(out, v, depth + 1);
            }
        }
    } else {
        size_t i = 0;
        for (const auto& v : j) {
            if (is_leaf(v)) {
                out << indent << "- [" << i << "]: `" << v.dump() << "`\n";
            } else {
                out << indent << "- [" << i << "]:\n";
                markdown_fields(out, v, depth + 1);
            }
            ++i;
        }
    }
}

}  // namespace

std::string json_to_markdown(const Json& report) {
    std::ostringstream out;
    const std::string name = report.contains("model") ? report["model"].value("name", "") : "";
    out << "# kvwb report: " << name << "\n\n";
    for (const auto& [k, v] : report.items()) {
        if (k == "stages") continue;
        if (is_leaf(v)) {
            out << "- " << k << ": `" << v.dump() << "`\n";
        } else {
            out << "- " << k << ":\n";
            markdown_fields(out, v, 1);
        }
    }
    if (report.contains("stages")) {
        for (const auto& s : report["stages"]) {
            out << "\n## " << s.value("name", "") << ": " << s.value("status", "") << "\n\n";
            for (const auto& [k, v] : s.items()) {
                if (k == "name" || k == "status") continue;
                if (is_leaf(v)) {
                    out << "- " << k << ": `" << v.dump() << "`\n";
                } else {
                    out << "- " << k << ":\n";
                    markdown_fields(out, v, 1);
                }
            }
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Re-verification

namespace {

const Json* find_stage(const Json& report, const std::string& name) {
    for (const auto& s : report.at("stages"))
        if (s.value("name", "") == name) return &s;
    return nullptr;
}

bool passed(const Json* s) { return s && s->value("status", "") == "pass"; }

}  // namespace

std::vector<RecheckItem> recheck_report(const Json& report) {
    std::vector<RecheckItem> items;
    const Json& mj = report.at("model");
    std::uint64_t seed = report.value("seed", std::uint64_t{42});
    if (mj.contains("group") && mj["group"].contains("seed")) seed = mj["group"]["seed"].get<std::uint64_t>();
    const Model m = model_from_json(mj, seed);
    const double tol = report.contains("tol") ? double_from_json(report["tol"]) : 1e-9;

    const auto v = validate_model(m);
    const Json* vs = find_stage(report, "validation");
    items.push_back({"validation", vs && passed(vs) == v.ok(), std::to_string(v.violations.size()) + " violations"});
    if (!v.ok()) return items;
    const auto e = build_effect_space(m);
    const auto g = linear_group(m, e);

    std::optional<QMatrix> form;
    const Json* spin = find_stage(report, "spin_form");
    if (spin && spin->at("detail").contains("form") && !spin->at("detail")["form"].is_null()) {
        const Json& fj = spin->at("detail")["form"];
        form = form_from_json(fj);
        const Json flags = to_json(check_form_flags(*form, m, e, g));
        items.push_back({"spin_form.flags", flags == fj["flags"], flags.dump()});
    }

    const Json* conj = find_stage(report, "conjugate");
    if (conj && conj->at("detail").contains("eta") && !conj->at("detail")["eta"].is_null()) {
        const Json& d = conj->at("detail");
        const BipartiteState eta = bipartite_from_json(d["eta"], m, m);
        const auto vb = validate_bipartite(m, m, eta);
        items.push_back({"conjugate.table", vb.ok(), std::to_string(vb.violations.size()) + " violations"});
        const Permutation gamma = d["gamma"].get<Permutation>();
        bool diagonal = true;
        const Rational n(m.rank());
        for (int x = 0; x < m.testspace.size(); ++x)
            if (eta.table(x, gamma[static_cast<size_t>(x)]) != Rational(1) / n) diagonal = false;
        items.push_back({"conjugate.diagonal", diagonal, "eta(x, gamma x) = 1/n"});
        const auto cf = spin_form_from_conjugate(m, e, g, Conjugate{gamma, eta});
        const bool same = cf.form.matrix == form_from_json(d["form"]);
        items.push_back({"conjugate.form", same, "B(x, y) = eta(x, gamma y)"});
    }

    const Json* sd = find_stage(report, "self_duality");
    if (sd && form && sd->at("detail").contains("certificate")) {
        const Json& d = sd->at("detail");
        const auto cert = duality_from_json(d["certificate"]);
        if (cert.method == "exact") {
            const Cone k = polyhedral_cone(e.dim, cert.cone_rays);
            const bool dual_ok = same_rays(dual_cone(k, *form).generators, cert.dual_rays);
            items.push_back({"self_duality.dual_rays", dual_ok, "double description of the embedded rays"});
            items.push_back({"self_duality.certificate", verify_duality_certificate(cert), "substitution"});
        } else {
            const auto again = is_self_dual(effect_cone(e, 20, d.value("cone_seed", std::uint64_t{42})), *form, tol);
            items.push_back({"self_duality.verdict", again.verdict == cert.verdict, cert.method});
        }
        if (d.contains("weak_self_duality") && d["weak_self_duality"]["verdict"] == true) {
            const Json& w = d["weak_self_duality"];
            const QMatrix t = qmatrix_from_json(w["map"]);
            const auto sigma = w["bijection"].get<std::vector<int>>();
            const QVector scales = qvector_from_json(w["scales"]);
            std::vector<QVector> rays, targets;
            for (const auto& r : w["rays"]) rays.push_back(qvector_from_json(r));
            for (const auto& r : w["targets"]) targets.push_back(qvector_from_json(r));
            bool ok = inverse(t).has_value() && sigma.size() == rays.size() && std::set<int>(sigma.begin(), sigma.end()).size() == sigma.size();
            for (size_t i = 0; ok && i < rays.size(); ++i) {
                const auto& target = targets.at(static_cast<size_t>(sigma[i]));
                ok = scales(static_cast<Eigen::Index>(i)) > 0 &&
                     QVector(t * rays[i]) == QVector(scales(static_cast<Eigen::Index>(i)) * target);
            }
            const Cone k = polyhedral_cone(e.dim, rays);
            ok = ok && same_rays(dual_cone(k, *form).generators, targets);
            items.push_back({"weak_self_duality.map", ok, "T r_i = s_i d_sigma(i), s_i > 0"});
        }
    }

    const Json* jr = find_stage(report, "jordan_recovery");
    if (jr && jr->at("detail").contains("algebra") && !jr->at("detail")["algebra"].is_null()) {
        JordanAlgebra a = algebra_from_json(jr->at("detail")["algebra"]);
        a.kind = JordanKind::Recovered;
        const auto c = check_jordan_identity(a);
        items.push_back({"jordan_recovery.identity", c.passed(), "residual " + format_double(c.residual)});
        const Json* idj = find_stage(report, "identification");
        if (passed(idj)) {
            const auto id = identify_algebra(a);
            items.push_back({"identification.candidates", Json(id.candidates) == idj->at("detail")["candidates"], ""});
        }
    }
    return items;
}

}  // namespace kvwb
