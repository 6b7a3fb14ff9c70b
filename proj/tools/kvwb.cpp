#include "kvwb/builtins.hpp"
#include "kvwb/image.hpp"
#include "kvwb/io.hpp"
#include "kvwb/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

using namespace kvwb;

namespace {

enum ExitCode { kOk = 0, kNegative = 1, kParse = 2, kCap = 3, kFailure = 4 };

struct Options {
    double tol = 1e-9;
    std::uint64_t seed = 42;
    std::optional<std::size_t> cap;
    std::string out;
};

struct ModelSource {
    std::string path;
    std::string builtin;
};

std::optional<std::size_t> env_cap() {
    const char* v = std::getenv("KVWB_CAP");
    if (!v || !*v) return std::nullopt;
    try {
        return static_cast<std::size_t>(std::stoull(v));
    } catch (const std::exception&) {
        throw ParseError(std::string("KVWB_CAP is not a number: '") + v + "'");
    }
}

Model load(const ModelSource& src, const Options& o) {
    if (src.path.empty() == src.builtin.empty()) throw ParseError("give exactly one of a model file or --builtin NAME");
    Model m = src.builtin.empty() ? load_model(src.path, o.seed) : builtin_model(src.builtin, o.seed);
    if (o.cap) m.group.cap = *o.cap;
    else if (const auto c = env_cap()) m.group.cap = *c;
    return m;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) std::cout << text;
    else write_text_file(o.out, text);
}

void emit(const Options& o, const Json& j) { emit(o, j.dump(2) + "\n"); }

void add_model_args(CLI::App* cmd, ModelSource& src) {
    cmd->add_option("model", src.path, "model JSON file");
    cmd->add_option("--builtin", src.builtin, "built-in model name");
}

struct Context {
    Model model;
    OrderUnitSpace space;
    LinearGroup group;
};

Context context(const ModelSource& src, const Options& o) {
    Context c{load(src, o), {}, {}};
    require_valid(c.model);
    c.space = build_effect_space(c.model);
    c.group = linear_group(c.model, c.space);
    return c;
}

QMatrix form_or_spin(const Context& c, const std::string& form_path) {
    if (!form_path.empty()) return form_from_json(read_json_file(form_path));
    const auto r = find_orthogonalizing_spin_form(c.model, c.space, c.group);
    if (!r.form) throw ModelError("no orthogonalizing SPIN form; pass --form");
    return r.form->matrix;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kvwb: probabilistic models, self-dual cones and Jordan algebras"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--tol", o.tol, "numerical tolerance")->capture_default_str();
    app.add_option("--seed", o.seed, "seed for every random choice")->capture_default_str();
    app.add_option("--cap", o.cap, "group enumeration cap (overrides KVWB_CAP)");
    app.add_option("--out", o.out, "write the output to this path");

    ModelSource src;
    int code = kOk;
    std::function<void()> action;

    auto* validate = app.add_subcommand("validate", "list violated model invariants");
    add_model_args(validate, src);
    validate->callback([&] {
        action = [&] {
            const Model m = load(src, o);
            const auto r = validate_model(m);
            emit(o, Json{{"model", m.name}, {"validation", to_json(r)}});
            if (!r.ok()) code = kNegative;
        };
    });

    auto* bisym = app.add_subcommand("bisym", "bi-symmetry and transitivity checks");
    add_model_args(bisym, src);
    bisym->callback([&] {
        action = [&] {
            const Model m = load(src, o);
            require_valid(m);
            emit(o, Json{{"model", m.name}, {"bisymmetry", to_json(check_bisymmetry(m))}});
        };
    });

    auto* spin = app.add_subcommand("spin", "orthogonalizing SPIN form and its uniqueness");
    add_model_args(spin, src);
    spin->callback([&] {
        action = [&] {
            const Context c = context(src, o);
            const auto u = check_spin_uniqueness(c.model, c.space, c.group);
            emit(o, Json{{"model", c.model.name},
                         {"irreducible", u.irreducible},
                         {"solution_space_dim", u.solution_space_dim},
                         {"verdict", u.verdict},
                         {"form", u.form ? to_json(*u.form) : Json(nullptr)}});
            if (!u.form) code = kNegative;
        };
    });

    bool no_invariance = false;
    std::string gamma_kind = "conjugation";
    auto* conj = app.add_subcommand("conjugate", "LP search for a conjugate state");
    add_model_args(conj, src);
    conj->add_flag("--no-invariance", no_invariance, "do not require group invariance");
    conj->add_option("--gamma", gamma_kind, "identity or conjugation")->check(CLI::IsMember({"identity", "conjugation"}));
    conj->callback([&] {
        action = [&] {
            const Context c = context(src, o);
            const Permutation gamma =
                gamma_kind == "identity" ? identity_permutation(c.model.testspace.size()) : conjugation_map(c.model);
            const auto s = find_conjugate_state(c.model, c.space, c.group, gamma, !no_invariance, o.seed);
            Json j = {{"model", c.model.name},   {"gamma", gamma},
                      {"seed", o.seed},          {"method", s.method},
                      {"free_parameters", s.free_parameters}, {"cutting_rounds", s.cutting_rounds}};
            if (s.eta) {
                j["eta"] = bipartite_to_json(c.model, c.model, *s.eta);
                j["isomorphism_state"] = to_json(is_isomorphism_state(c.space, c.space, *s.eta));
                j["form"] = to_json(spin_form_from_conjugate(c.model, c.space, c.group, Conjugate{gamma, *s.eta}).form);
            } else {
                j["eta"] = nullptr;
                code = kNegative;
            }
            emit(o, j);
        };
    });

    std::string cone_mode, form_path;
    auto* cone = app.add_subcommand("cone", "dual cone, self-duality and weak self-duality");
    cone->add_option("mode", cone_mode, "dual | selfdual | weak")->required()->check(CLI::IsMember({"dual", "selfdual", "weak"}));
    add_model_args(cone, src);
    cone->add_option("--form", form_path, "form JSON (default: the SPIN form)");
    cone->callback([&] {
        action = [&] {
            const Context c = context(src, o);
            const QMatrix form = form_or_spin(c, form_path);
            const Cone k = effect_cone(c.space, 20, o.seed);
            Json j = {{"model", c.model.name}, {"form", to_json(form)}, {"cone_seed", o.seed}, {"cone", to_json(k)}};
            if (cone_mode == "dual") {
                j["dual"] = to_json(dual_cone(k, form));
            } else if (cone_mode == "selfdual") {
                const auto cert = is_self_dual(k, form, o.tol);
                j["certificate"] = to_json(cert);
                if (!cert.verdict) code = kNegative;
            } else {
                const auto w = is_weakly_self_dual(k, form);
                j["weak_self_duality"] = to_json(w);
                if (w.verdict != true) code = kNegative;
            }
            emit(o, j);
        };
    });

    std::string blocks, map_path;
    bool search = false;
    auto* image = app.add_subcommand("image", "image of a model under a surjective outcome map");
    add_model_args(image, src);
    image->add_option("--blocks", blocks, "block index per outcome, e.g. 0,0,1,1");
    image->add_option("--map", map_path, "JSON {outcome_map, target_outcomes, target_tests?}");
    image->add_flag("--search", search, "exhaustive search over maps of a two-level quantum model");
    image->callback([&] {
        action = [&] {
            const Model m = load(src, o);
            require_valid(m);
            if (search) {
                const auto s = search_quantum_images(m);
                emit(o, Json{{"model", m.name},
                             {"partitions_checked", s.partitions_checked},
                             {"admissible", s.admissible},
                             {"relabellings", s.relabellings},
                             {"trivial", s.trivial},
                             {"nontrivial", s.nontrivial}});
                if (!s.nontrivial.empty()) code = kNegative;
                return;
            }
            ImageMap f;
            if (!map_path.empty()) {
                const Json j = read_json_file(map_path);
                f.outcome_map = j.at("outcome_map").get<std::vector<int>>();
                f.target_outcomes = j.at("target_outcomes").get<std::vector<std::string>>();
                if (j.contains("target_tests")) f.target_tests = j["target_tests"].get<std::vector<std::vector<int>>>();
            } else if (!blocks.empty()) {
                std::vector<int> b;
                for (const auto& s : split_list(blocks)) b.push_back(std::stoi(s));
                f = partition_map(b);
            } else {
                throw ParseError("give --blocks, --map or --search");
            }
            const Model img = image_model(m, f);
            Json j = {{"model", m.name}, {"image", model_to_json(img)}, {"trivial", is_trivial_model(img)}};
            Json matches = Json::array();
            for (const auto& name : builtin_names()) {
                const Model b = builtin_model(name, o.seed);
                if (auto iso = find_model_isomorphism(img, b)) matches.push_back({{"builtin", name}, {"relabelling", *iso}});
            }
            j["isomorphic_builtins"] = matches;
            emit(o, j);
        };
    });

    std::string jordan_mode, target;
    int samples = 50;
    auto* jordan = app.add_subcommand("jordan", "Jordan product recovery, verification and identification");
    jordan->add_option("mode", jordan_mode, "recover | verify | identify")->required()->check(CLI::IsMember({"recover", "verify", "identify"}));
    jordan->add_option("target", target, "model file (recover), catalog name (verify), algebra JSON or catalog name (identify)");
    jordan->add_option("--builtin", src.builtin, "built-in model name (recover)");
    jordan->add_option("--form", form_path, "form JSON (recover; default: the SPIN form)");
    jordan->add_option("--samples", samples, "random samples (verify)")->capture_default_str();
    jordan->callback([&] {
        action = [&] {
            if (jordan_mode == "recover") {
                src.path = target;
                const Context c = context(src, o);
                const QMatrix form = form_or_spin(c, form_path);
                auto p = recovery_problem(c.space, c.group, form);
                p.seed = o.seed;
                const auto r = recover_jordan_product(p);
                Json j = {{"model", c.model.name}, {"seed", o.seed}, {"recovery", to_json(r)}};
                if (r.algebra) j["identification"] = to_json(identify_algebra(*r.algebra));
                else code = kNegative;
                emit(o, j);
            } else if (jordan_mode == "verify") {
                const auto a = catalog_algebra(target);
                const auto r = verify_symmetric_cone(a, samples, o.seed);
                emit(o, Json{{"algebra", a.name()}, {"report", to_json(r)}});
                if (!r.pass) code = kNegative;
            } else {
                JordanAlgebra a;
                try {
                    a = catalog_algebra(target);
                } catch (const ParseError&) {
                    a = algebra_from_json(read_json_file(target));
                }
                emit(o, Json{{"algebra", a.name()}, {"identification", to_json(identify_algebra(a))}});
            }
        };
    });

    std::string expect, format = "json", input;
    auto run_pipeline_cmd = [&](bool markdown) {
        PipelineOptions po;
        po.seed = o.seed;
        po.tol = o.tol;
        po.expectations = split_list(expect);
        const auto r = run_pipeline(load(src, o), po);
        const Json j = to_json(r);
        emit(o, markdown ? json_to_markdown(j) : j.dump(2) + "\n");
        code = r.exit_code() == 0 ? kOk : kNegative;
    };

    auto* run = app.add_subcommand("run", "full pipeline, JSON report");
    add_model_args(run, src);
    run->add_option("--expect", expect, "expected negative results, e.g. not-self-dual,not-sharp");
    run->callback([&] { action = [&] { run_pipeline_cmd(false); }; });

    auto* report = app.add_subcommand("report", "full pipeline report, or convert a saved report");
    add_model_args(report, src);
    report->add_option("--format", format, "json or md")->check(CLI::IsMember({"json", "md"}))->capture_default_str();
    report->add_option("--input", input, "saved JSON report to convert instead of running");
    report->add_option("--expect", expect, "expected negative results");
    report->callback([&] {
        action = [&] {
            if (input.empty()) {
                run_pipeline_cmd(format == "md");
                return;
            }
            const Json j = read_json_file(input);
            emit(o, format == "md" ? json_to_markdown(j) : j.dump(2) + "\n");
        };
    });

    std::string report_path;
    auto* recheck = app.add_subcommand("recheck", "re-verify every certificate in a saved JSON report");
    recheck->add_option("report", report_path, "JSON report from `run`")->required();
    recheck->callback([&] {
        action = [&] {
            const auto items = recheck_report(read_json_file(report_path));
            Json list = Json::array();
            bool all = true;
            for (const auto& i : items) {
                list.push_back({{"check", i.name}, {"agrees", i.agrees}, {"detail", i.detail}});
                all = all && i.agrees;
            }
            emit(o, Json{{"report", report_path}, {"all_agree", all}, {"checks", list}});
            if (!all) code = kNegative;
        };
    });

    auto* list = app.add_subcommand("builtins", "list built-in model names");
    list->callback([&] { action = [&] { emit(o, Json(builtin_names())); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kParse;
    }
    try {
        action();
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return kCap;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    }
    return code;
}
