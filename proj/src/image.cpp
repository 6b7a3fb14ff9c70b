#include "kvwb/image.hpp"

#include "kvwb/cones.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace kvwb {

ImageMap partition_map(const std::vector<int>& block_of) {
    ImageMap f;
    std::map<int, int> index;
    for (int b : block_of) {
        if (!index.count(b)) {
            const int i = static_cast<int>(index.size());
            index[b] = i;
        }
    }
    f.target_outcomes.resize(index.size());
    for (const auto& [b, i] : index) f.target_outcomes[static_cast<size_t>(i)] = "b" + std::to_string(b);
    for (int b : block_of) f.outcome_map.push_back(index[b]);
    return f;
}

namespace {

void check_surjective(const Model& m, const ImageMap& f) {
    if (static_cast<int>(f.outcome_map.size()) != m.testspace.size())
        throw ModelError("outcome map has " + std::to_string(f.outcome_map.size()) + " entries for " +
                         std::to_string(m.testspace.size()) + " outcomes");
    std::vector<bool> hit(f.target_outcomes.size(), false);
    for (int y : f.outcome_map) {
        if (y < 0 || y >= static_cast<int>(f.target_outcomes.size())) throw ModelError("outcome map out of range");
        hit[static_cast<size_t>(y)] = true;
    }
    for (size_t y = 0; y < hit.size(); ++y)
        if (!hit[y]) throw ModelError("outcome map is not surjective: '" + f.target_outcomes[y] + "' is not hit");
}

std::vector<std::vector<int>> image_tests(const Model& m, const ImageMap& f) {
    std::set<std::vector<int>> images;
    for (const auto& t : m.testspace.tests) {
        std::set<int> img;
        for (int x : t) img.insert(f.outcome_map[static_cast<size_t>(x)]);
        images.insert(std::vector<int>(img.begin(), img.end()));
    }
    if (!f.target_tests) {
        // Keep the order of first appearance.
        std::vector<std::vector<int>> out;
        std::set<std::vector<int>> seen;
        for (const auto& t : m.testspace.tests) {
            std::set<int> img;
            for (int x : t) img.insert(f.outcome_map[static_cast<size_t>(x)]);
            std::vector<int> v(img.begin(), img.end());
            if (seen.insert(v).second) out.push_back(v);
        }
        return out;
    }
    std::vector<std::vector<int>> out;
    for (auto t : *f.target_tests) {
        std::sort(t.begin(), t.end());
        if (!images.count(t)) throw ModelError("target test is not the image of a test");
        out.push_back(t);
    }
    return out;
}

std::vector<Permutation> induced_group(const Model& m, const ImageMap& f) {
    const auto& phi = f.outcome_map;
    const int ny = static_cast<int>(f.target_outcomes.size());
    if (f.group_images) {
        if (f.group_images->size() != m.group.permutations.size()) throw ModelError("one group image per generator required");
        for (size_t i = 0; i < m.group.permutations.size(); ++i) {
            const auto& g = m.group.permutations[i];
            const auto& h = (*f.group_images)[i];
            if (static_cast<int>(h.size()) != ny) throw ModelError("group image has the wrong degree");
            for (size_t x = 0; x < phi.size(); ++x)
                if (phi[static_cast<size_t>(g[x])] != h[static_cast<size_t>(phi[x])])
                    throw ModelError("outcome map is not equivariant for generator " + std::to_string(i));
        }
        return *f.group_images;
    }
    std::vector<Permutation> out;
    for (size_t i = 0; i < m.group.permutations.size(); ++i) {
        const auto& g = m.group.permutations[i];
        Permutation h(static_cast<size_t>(ny), -1);
        for (size_t x = 0; x < phi.size(); ++x) {
            int& slot = h[static_cast<size_t>(phi[x])];
            const int target = phi[static_cast<size_t>(g[x])];
            if (slot >= 0 && slot != target)
                throw ModelError("outcome map is not equivariant: generator " + std::to_string(i) +
                                 " does not act on the blocks");
            slot = target;
        }
        if (h != identity_permutation(ny)) out.push_back(h);
    }
    return out;
}

Model trivial_image(const Model& m, const ImageMap& f, const std::vector<std::vector<int>>& tests) {
    Model out;
    out.name = m.name + "/trivial";
    out.testspace.outcomes = f.target_outcomes;
    out.testspace.tests = tests;
    State ones(static_cast<Eigen::Index>(f.target_outcomes.size()));
    for (Eigen::Index i = 0; i < ones.size(); ++i) ones(i) = 1;
    out.states = PolytopeStates{{ones}};
    return out;
}

// Overlap class of each ordered pair of sample outcomes.
std::vector<std::vector<int>> overlap_classes(const Model& m) {
    const auto& p = m.quantum().projectors;
    const auto n = p.size();
    std::map<Rational, int> index;
    std::vector<std::vector<int>> cls(n, std::vector<int>(n));
    for (size_t x = 0; x < n; ++x) {
        for (size_t y = 0; y < n; ++y) {
            const Rational o = (p[x] * p[y]).trace_re();
            auto it = index.find(o);
            if (it == index.end()) it = index.emplace(o, static_cast<int>(index.size())).first;
            cls[x][y] = it->second;
        }
    }
    return cls;
}

bool partition_is_admissible(const std::vector<std::vector<int>>& cls, const std::vector<int>& block_of) {
    std::map<int, bool> merged;
    for (size_t x = 0; x < cls.size(); ++x) {
        for (size_t y = 0; y < cls.size(); ++y) {
            const bool same = block_of[x] == block_of[y];
            auto [it, inserted] = merged.emplace(cls[x][y], same);
            if (!inserted && it->second != same) return false;
        }
    }
    return true;
}

bool is_discrete(const std::vector<int>& phi) {
    return std::set<int>(phi.begin(), phi.end()).size() == phi.size();
}

bool tests_collapse(const std::vector<std::vector<int>>& tests) {
    return std::all_of(tests.begin(), tests.end(), [](const auto& t) { return t.size() == 1; });
}

Model quantum_image(const Model& m, const ImageMap& f) {
    const auto tests = image_tests(m, f);
    std::vector<int> block_of = f.outcome_map;
    if (!is_discrete(f.outcome_map) && !tests_collapse(tests)) {
        if (m.quantum().dim != 2)
            throw ModelError("images of quantum models are only decided for Hilbert dimension 2");
    }
    if (m.quantum().dim == 2 && !partition_is_admissible(overlap_classes(m), block_of))
        throw ModelError("outcome map is not equivariant: merged pairs are not a union of unitary orbits");
    if (is_discrete(f.outcome_map)) {
        Model out = m;
        for (size_t x = 0; x < f.outcome_map.size(); ++x)
            out.testspace.outcomes[x] = f.target_outcomes[static_cast<size_t>(f.outcome_map[x])];
        return out;
    }
    if (tests_collapse(tests)) return trivial_image(m, f, tests);
    throw ModelError("admissible non-trivial quantum image found; Gamma is not computed for quantum models");
}

}  // namespace

QMatrix pullback_matrix(const Model& m, const ImageMap& f) {
    const int nx = m.testspace.size();
    QMatrix l = zero_matrix(nx, static_cast<Eigen::Index>(f.target_outcomes.size()));
    for (int x = 0; x < nx; ++x) {
        const int y = f.outcome_map[static_cast<size_t>(x)];
        int count = -1;
        for (const auto& t : m.testspace.tests) {
            if (std::find(t.begin(), t.end(), x) == t.end()) continue;
            const int c = static_cast<int>(
                std::count_if(t.begin(), t.end(), [&](int z) { return f.outcome_map[static_cast<size_t>(z)] == y; }));
            if (count >= 0 && c != count)
                throw ModelError("pullback is ill-defined at '" + m.testspace.outcomes[static_cast<size_t>(x)] +
                                 "': its tests merge different numbers of outcomes");
            count = c;
        }
        l(x, y) = Rational(1, count);
    }
    return l;
}

bool is_trivial_model(const Model& m) {
    return tests_collapse(m.testspace.tests);
}

Model unit_model() {
    Model m;
    m.name = "unit";
    m.testspace.outcomes = {"1"};
    m.testspace.tests = {{0}};
    State one(1);
    one << Rational(1);
    m.states = PolytopeStates{{one}};
    return m;
}

Model image_model(const Model& m, const ImageMap& f) {
    check_surjective(m, f);
    if (m.is_quantum()) return quantum_image(m, f);
    const auto tests = image_tests(m, f);
    const auto group = induced_group(m, f);
    const QMatrix l = pullback_matrix(m, f);
    const int nx = m.testspace.size();
    const int ny = static_cast<int>(f.target_outcomes.size());

    // Homogenized Gamma: beta >= 0, equal mass on every test, phi* beta in cone(Omega).
    const Cone omega = polyhedral_cone(nx, m.polytope().extreme);
    const Cone omega_dual = dual_cone(omega, identity_matrix(nx));
    std::vector<QVector> rows;
    for (int y = 0; y < ny; ++y) {
        QVector r = zero_vector(ny);
        r(y) = 1;
        rows.push_back(r);
    }
    auto mass = [&](const std::vector<int>& t) {
        QVector r = zero_vector(ny);
        for (int y : t) r(y) += 1;
        return r;
    };
    for (size_t j = 1; j < tests.size(); ++j) {
        const QVector r = mass(tests[j]) - mass(tests[0]);
        rows.push_back(r);
        rows.push_back(-r);
    }
    for (const auto& h : omega_dual.generators) rows.push_back(l.transpose() * h);
    QMatrix a(static_cast<Eigen::Index>(rows.size()), ny);
    for (size_t i = 0; i < rows.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();

    std::vector<State> vertices;
    const QVector first = mass(tests[0]);
    for (const auto& ray : cone_from_inequalities(a, ny)) {
        const Rational s = first.dot(ray);
        if (s <= 0) continue;
        vertices.push_back(ray / s);
    }
    if (vertices.empty()) throw ModelError("image state space is empty");
    std::sort(vertices.begin(), vertices.end(), [](const State& x, const State& y) { return lex_less(y, x); });

    Model out;
    out.name = m.name + "/image";
    out.testspace.outcomes = f.target_outcomes;
    out.testspace.tests = tests;
    out.states = PolytopeStates{vertices};
    out.group.kind = GroupKind::FinitePermutation;
    out.group.permutations = group;
    out.group.cap = m.group.cap;
    return out;
}

namespace {

bool same_test_structure(const TestSpace& a, const TestSpace& b, const Permutation& pi) {
    std::set<std::vector<int>> mapped;
    for (const auto& t : a.tests) {
        std::vector<int> img;
        for (int x : t) img.push_back(pi[static_cast<size_t>(x)]);
        std::sort(img.begin(), img.end());
        mapped.insert(img);
    }
    return mapped == b.test_set();
}

bool same_states(const Model& a, const Model& b, const Permutation& pi) {
    if (a.is_quantum() != b.is_quantum()) return false;
    if (a.is_quantum()) {
        const auto& qa = a.quantum();
        const auto& qb = b.quantum();
        if (qa.field != qb.field || qa.dim != qb.dim) return false;
        for (size_t x = 0; x < qa.projectors.size(); ++x)
            for (size_t y = 0; y < qa.projectors.size(); ++y)
                if ((qa.projectors[x] * qa.projectors[y]).trace_re() !=
                    (qb.projectors[static_cast<size_t>(pi[x])] * qb.projectors[static_cast<size_t>(pi[y])]).trace_re())
                    return false;
        return true;
    }
    std::vector<State> moved;
    for (const auto& v : a.polytope().extreme) {
        State w(v.size());
        for (Eigen::Index x = 0; x < v.size(); ++x) w(pi[static_cast<size_t>(x)]) = v(x);
        moved.push_back(w);
    }
    auto key = [](std::vector<State> s) {
        std::sort(s.begin(), s.end(), lex_less);
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return s;
    };
    return key(moved) == key(b.polytope().extreme);
}

bool extend_isomorphism(const Model& a, const Model& b, Permutation& pi, std::vector<bool>& used, size_t x,
                        const std::vector<int>& degree_a, const std::vector<int>& degree_b) {
    if (x == pi.size()) return same_test_structure(a.testspace, b.testspace, pi) && same_states(a, b, pi);
    for (size_t y = 0; y < pi.size(); ++y) {
        if (used[y] || degree_a[x] != degree_b[y]) continue;
        used[y] = true;
        pi[x] = static_cast<int>(y);
        if (extend_isomorphism(a, b, pi, used, x + 1, degree_a, degree_b)) return true;
        used[y] = false;
    }
    return false;
}

std::vector<int> test_degrees(const TestSpace& t) {
    std::vector<int> d(static_cast<size_t>(t.size()), 0);
    for (const auto& test : t.tests)
        for (int x : test) ++d[static_cast<size_t>(x)];
    return d;
}

}  // namespace

std::optional<Permutation> find_model_isomorphism(const Model& a, const Model& b) {
    if (a.testspace.size() != b.testspace.size() || a.testspace.test_set().size() != b.testspace.test_set().size())
        return std::nullopt;
    if (a.is_quantum() != b.is_quantum()) return std::nullopt;
    if (!a.is_quantum() && a.polytope().extreme.size() != b.polytope().extreme.size()) return std::nullopt;
    Permutation pi(static_cast<size_t>(a.testspace.size()), -1);
    std::vector<bool> used(pi.size(), false);
    if (extend_isomorphism(a, b, pi, used, 0, test_degrees(a.testspace), test_degrees(b.testspace))) return pi;
    return std::nullopt;
}

ImageClosureResult check_image_closure(const std::vector<Model>& catalog, const ImageMap& f) {
    ImageClosureResult r;
    std::optional<Model> image;
    std::string last_error = "no catalog member accepts the map";
    for (size_t i = 0; i < catalog.size() && !image; ++i) {
        if (static_cast<int>(f.outcome_map.size()) != catalog[i].testspace.size()) continue;
        try {
            image = image_model(catalog[i], f);
            r.source = static_cast<int>(i);
        } catch (const ModelError& e) {
            last_error = e.what();
        }
    }
    if (!image) {
        // No member admits the map: nothing to close under.
        r.closed = true;
        r.detail = last_error;
        return r;
    }
    if (is_trivial_model(*image)) {
        r.closed = r.trivial = true;
        r.detail = "image is a copy of the unit model";
        return r;
    }
    for (size_t i = 0; i < catalog.size(); ++i) {
        if (find_model_isomorphism(*image, catalog[i])) {
            r.closed = true;
            r.match = static_cast<int>(i);
            r.detail = "image is isomorphic to " + catalog[i].name;
            return r;
        }
    }
    r.detail = "image is not isomorphic to any catalog member";
    return r;
}

QuantumImageSearch search_quantum_images(const Model& m) {
    const auto& q = m.quantum();
    if (q.dim != 2) throw ModelError("quantum image search is implemented for Hilbert dimension 2 only");
    const auto cls = overlap_classes(m);
    const int n = m.testspace.size();
    QuantumImageSearch s;
    // Restricted growth strings enumerate set partitions once each.
    std::vector<int> block(static_cast<size_t>(n), 0);
    std::vector<int> prefix_max(static_cast<size_t>(n), 0);
    for (;;) {
        ++s.partitions_checked;
        if (partition_is_admissible(cls, block)) {
            ++s.admissible;
            const ImageMap f = partition_map(block);
            const auto tests = image_tests(m, f);
            if (is_discrete(f.outcome_map)) ++s.relabellings;
            else if (tests_collapse(tests)) ++s.trivial;
            else s.nontrivial.push_back(block);
        }
        int i = n - 1;
        while (i > 0 && block[static_cast<size_t>(i)] > prefix_max[static_cast<size_t>(i - 1)]) --i;
        if (i <= 0) break;
        ++block[static_cast<size_t>(i)];
        for (int j = i; j < n; ++j) {
            if (j > i) block[static_cast<size_t>(j)] = 0;
            prefix_max[static_cast<size_t>(j)] =
                std::max(j > 0 ? prefix_max[static_cast<size_t>(j - 1)] : 0, block[static_cast<size_t>(j)]);
        }
    }
    return s;
}

}  // namespace kvwb
