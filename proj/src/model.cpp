#include "kvwb/model.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

namespace kvwb {

int TestSpace::index_of(const std::string& id) const {
    auto it = std::find(outcomes.begin(), outcomes.end(), id);
    if (it == outcomes.end()) throw UnknownOutcome("unknown outcome '" + id + "'");
    return static_cast<int>(it - outcomes.begin());
}

std::optional<int> TestSpace::uniform_rank() const {
    if (tests.empty()) return std::nullopt;
    const auto n = tests.front().size();
    for (const auto& t : tests)
        if (t.size() != n) return std::nullopt;
    return static_cast<int>(n);
}

std::set<std::vector<int>> TestSpace::test_set() const {
    std::set<std::vector<int>> out;
    for (auto t : tests) {
        std::sort(t.begin(), t.end());
        out.insert(std::move(t));
    }
    return out;
}

Permutation compose(const Permutation& g, const Permutation& h) {
    Permutation out(h.size());
    for (size_t x = 0; x < h.size(); ++x) out[x] = g[static_cast<size_t>(h[x])];
    return out;
}

Permutation inverse(const Permutation& g) {
    Permutation out(g.size());
    for (size_t x = 0; x < g.size(); ++x) out[static_cast<size_t>(g[x])] = static_cast<int>(x);
    return out;
}

Permutation identity_permutation(int n) {
    Permutation p(static_cast<size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    return p;
}

State act(const Permutation& g, const State& alpha) {
    State out(alpha.size());
    for (size_t x = 0; x < g.size(); ++x) out(g[x]) = alpha(static_cast<Eigen::Index>(x));
    return out;
}

std::vector<Permutation> enumerate_group(const std::vector<Permutation>& generators, int degree,
                                         std::size_t cap) {
    std::set<Permutation> seen;
    std::vector<Permutation> order;
    std::deque<Permutation> queue;
    Permutation id = identity_permutation(degree);
    seen.insert(id);
    order.push_back(id);
    queue.push_back(id);
    while (!queue.empty()) {
        Permutation g = queue.front();
        queue.pop_front();
        for (const auto& s : generators) {
            Permutation h = compose(s, g);
            if (seen.insert(h).second) {
                if (seen.size() > cap)
                    throw CapExceeded("group enumeration exceeded cap of " + std::to_string(cap) + " elements");
                order.push_back(h);
                queue.push_back(std::move(h));
            }
        }
    }
    return order;
}

const PolytopeStates& Model::polytope() const {
    if (!std::holds_alternative<PolytopeStates>(states)) throw ModelError(name + ": not a polytope model");
    return std::get<PolytopeStates>(states);
}

const QuantumStates& Model::quantum() const {
    if (!std::holds_alternative<QuantumStates>(states)) throw ModelError(name + ": not a quantum model");
    return std::get<QuantumStates>(states);
}

int Model::rank() const {
    auto r = testspace.uniform_rank();
    if (!r) throw ModelError(name + ": tests differ in size; the rank is undefined");
    return *r;
}

bool ValidationReport::has(const std::string& code) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; });
}

namespace {

void check_testspace(const TestSpace& ts, ValidationReport& report) {
    std::set<std::string> ids;
    for (const auto& id : ts.outcomes)
        if (!ids.insert(id).second) report.violations.push_back({"duplicate-outcome", "outcome '" + id + "' listed twice"});
    if (ts.tests.empty()) report.violations.push_back({"no-tests", "test space has no tests"});
    std::vector<bool> covered(static_cast<size_t>(ts.size()), false);
    for (size_t t = 0; t < ts.tests.size(); ++t) {
        const auto& test = ts.tests[t];
        if (test.empty()) report.violations.push_back({"empty-test", "test " + std::to_string(t) + " is empty"});
        std::set<int> members;
        for (int x : test) {
            if (x < 0 || x >= ts.size()) {
                report.violations.push_back({"unknown-outcome", "test " + std::to_string(t) + " refers to an unknown outcome"});
                continue;
            }
            if (!members.insert(x).second)
                report.violations.push_back({"repeated-outcome-in-test", "test " + std::to_string(t) + " repeats '" + ts.outcomes[static_cast<size_t>(x)] + "'"});
            covered[static_cast<size_t>(x)] = true;
        }
    }
    for (int x = 0; x < ts.size(); ++x)
        if (!covered[static_cast<size_t>(x)])
            report.violations.push_back({"uncovered-outcome", "outcome '" + ts.outcomes[static_cast<size_t>(x)] + "' lies in no test"});
    if (!ts.tests.empty() && !ts.uniform_rank())
        report.violations.push_back({"rank-nonuniform", "tests differ in size"});
}

void check_state(const TestSpace& ts, const State& alpha, const std::string& label, ValidationReport& report) {
    if (alpha.size() != ts.size()) {
        report.violations.push_back({"state-dimension", label + " has " + std::to_string(alpha.size()) + " entries"});
        return;
    }
    for (int x = 0; x < ts.size(); ++x) {
        if (alpha(x) < 0 || alpha(x) > 1)
            report.violations.push_back({"state-range", label + " assigns " + to_string(alpha(x)) + " to '" + ts.outcomes[static_cast<size_t>(x)] + "'"});
    }
    for (size_t t = 0; t < ts.tests.size(); ++t) {
        Rational sum = 0;
        for (int x : ts.tests[t])
            if (x >= 0 && x < ts.size()) sum += alpha(x);
        if (sum != 1)
            report.violations.push_back({"state-normalization violated", label + " sums to " + to_string(sum) + " on test " + std::to_string(t)});
    }
}

bool is_bijection(const Permutation& g, int n) {
    if (static_cast<int>(g.size()) != n) return false;
    std::vector<bool> hit(static_cast<size_t>(n), false);
    for (int y : g) {
        if (y < 0 || y >= n || hit[static_cast<size_t>(y)]) return false;
        hit[static_cast<size_t>(y)] = true;
    }
    return true;
}

std::vector<int> image_of(const Permutation& g, const std::vector<int>& test) {
    std::vector<int> out;
    out.reserve(test.size());
    for (int x : test) out.push_back(g[static_cast<size_t>(x)]);
    std::sort(out.begin(), out.end());
    return out;
}

bool contains_state(const std::vector<State>& list, const State& s) {
    return std::any_of(list.begin(), list.end(), [&](const State& t) { return t == s; });
}

void check_permutation_group(const Model& m, ValidationReport& report) {
    const auto& ts = m.testspace;
    const auto tests = ts.test_set();
    bool all_valid = true;
    for (size_t k = 0; k < m.group.permutations.size(); ++k) {
        const auto& g = m.group.permutations[k];
        const std::string label = "generator " + std::to_string(k);
        if (!is_bijection(g, ts.size())) {
            report.violations.push_back({"generator-not-bijection", label + " is not a bijection of the outcomes"});
            all_valid = false;
            continue;
        }
        const Permutation gi = inverse(g);
        for (const auto& t : tests) {
            if (!tests.count(image_of(g, t)) || !tests.count(image_of(gi, t))) {
                report.violations.push_back({"generator-breaks-tests", label + " does not map tests onto tests"});
                all_valid = false;
                break;
            }
        }
        if (const auto* poly = std::get_if<PolytopeStates>(&m.states)) {
            for (size_t v = 0; v < poly->extreme.size(); ++v) {
                if (poly->extreme[v].size() != ts.size()) continue;
                if (!contains_state(poly->extreme, act(g, poly->extreme[v]))) {
                    report.violations.push_back({"state-space-not-invariant", label + " moves extreme state " + std::to_string(v) + " outside the list"});
                    break;
                }
            }
        }
    }
    if (all_valid) {
        try {
            enumerate_group(m.group.permutations, ts.size(), m.group.cap);
        } catch (const CapExceeded& e) {
            report.violations.push_back({"group-cap-exceeded", e.what()});
        }
    }
}

bool is_zero_matrix(const CMatrix& a) {
    return is_zero(QVector(a.re.reshaped())) && is_zero(QVector(a.im.reshaped()));
}

void check_quantum(const Model& m, ValidationReport& report) {
    const auto& q = m.quantum();
    const auto& ts = m.testspace;
    if (static_cast<int>(q.projectors.size()) != ts.size()) {
        report.violations.push_back({"projector-count", "quantum model needs one projector per outcome"});
        return;
    }
    for (int x = 0; x < ts.size(); ++x) {
        const CMatrix& p = q.projectors[static_cast<size_t>(x)];
        const std::string id = ts.outcomes[static_cast<size_t>(x)];
        if (p.dim() != q.dim) {
            report.violations.push_back({"projector-dimension", "'" + id + "' has the wrong dimension"});
            continue;
        }
        if (!p.is_hermitian() || !(p * p == p) || p.trace_re() != 1)
            report.violations.push_back({"not-rank-one-projector", "'" + id + "' is not a rank-one projector"});
        if (q.field == Field::Real && !is_zero(QVector(p.im.reshaped())))
            report.violations.push_back({"not-real", "'" + id + "' has imaginary entries in a real model"});
    }
    const CMatrix id = CMatrix::identity(q.dim);
    for (size_t t = 0; t < ts.tests.size(); ++t) {
        CMatrix sum = CMatrix::zero(q.dim);
        const auto& test = ts.tests[t];
        for (size_t i = 0; i < test.size(); ++i) {
            const CMatrix& pi = q.projectors[static_cast<size_t>(test[i])];
            sum = sum + pi;
            for (size_t j = i + 1; j < test.size(); ++j)
                if (!is_zero_matrix(pi * q.projectors[static_cast<size_t>(test[j])]))
                    report.violations.push_back({"test-not-orthogonal", "test " + std::to_string(t) + " has non-orthogonal projectors"});
        }
        if (!(sum == id)) report.violations.push_back({"test-not-frame", "test " + std::to_string(t) + " does not resolve the identity"});
    }
    for (size_t k = 0; k < m.group.unitaries.size(); ++k) {
        const CMatrix& u = m.group.unitaries[k];
        if (u.dim() != q.dim || !(u * u.adjoint() == id))
            report.violations.push_back({"generator-not-unitary", "unitary generator " + std::to_string(k) + " is not unitary"});
    }
}

}  // namespace

ValidationReport validate_model(const Model& m) {
    ValidationReport report;
    check_testspace(m.testspace, report);
    if (report.has("unknown-outcome")) return report;
    if (const auto* poly = std::get_if<PolytopeStates>(&m.states)) {
        if (poly->extreme.empty()) report.violations.push_back({"no-states", "state space has no extreme states"});
        for (size_t v = 0; v < poly->extreme.size(); ++v)
            check_state(m.testspace, poly->extreme[v], "extreme state " + std::to_string(v), report);
    } else {
        check_quantum(m, report);
    }
    if (m.group.kind == GroupKind::FinitePermutation) {
        if (m.is_quantum())
            report.violations.push_back({"group-kind", "quantum models take topological (unitary) generators"});
        else
            check_permutation_group(m, report);
    } else {
        for (size_t k = 0; k < m.group.linear_actions.size(); ++k)
            if (!inverse(m.group.linear_actions[k]))
                report.violations.push_back({"generator-singular", "linear generator " + std::to_string(k) + " is not invertible"});
    }
    return report;
}

void require_valid(const Model& m) {
    const auto report = validate_model(m);
    if (report.ok()) return;
    std::string msg = m.name + ": invalid model";
    for (const auto& v : report.violations) msg += "\n  " + v.code + ": " + v.detail;
    throw ModelError(msg);
}

bool distinguishable(const TestSpace& ts, int x, int y) {
    if (x < 0 || x >= ts.size() || y < 0 || y >= ts.size()) throw UnknownOutcome("outcome index out of range");
    if (x == y) return false;
    for (const auto& t : ts.tests) {
        const bool hx = std::find(t.begin(), t.end(), x) != t.end();
        const bool hy = std::find(t.begin(), t.end(), y) != t.end();
        if (hx && hy) return true;
    }
    return false;
}

bool distinguishable(const Model& m, const std::string& x, const std::string& y) {
    return distinguishable(m.testspace, m.testspace.index_of(x), m.testspace.index_of(y));
}

std::vector<std::pair<int, int>> distinguishable_pairs(const TestSpace& ts) {
    std::vector<std::pair<int, int>> out;
    for (int x = 0; x < ts.size(); ++x)
        for (int y = 0; y < ts.size(); ++y)
            if (distinguishable(ts, x, y)) out.emplace_back(x, y);
    return out;
}

std::vector<std::vector<int>> outcome_orbits(const std::vector<Permutation>& generators, int degree) {
    std::vector<int> label(static_cast<size_t>(degree), -1);
    std::vector<std::vector<int>> orbits;
    for (int start = 0; start < degree; ++start) {
        if (label[static_cast<size_t>(start)] >= 0) continue;
        const int id = static_cast<int>(orbits.size());
        std::vector<int> orbit{start};
        label[static_cast<size_t>(start)] = id;
        for (size_t i = 0; i < orbit.size(); ++i) {
            for (const auto& g : generators) {
                const int y = g[static_cast<size_t>(orbit[i])];
                if (label[static_cast<size_t>(y)] < 0) {
                    label[static_cast<size_t>(y)] = id;
                    orbit.push_back(y);
                }
            }
        }
        std::sort(orbit.begin(), orbit.end());
        orbits.push_back(std::move(orbit));
    }
    return orbits;
}

namespace {

template <class T, class Act>
std::set<T> orbit_of(const T& start, const std::vector<Permutation>& generators, Act act_fn) {
    std::set<T> seen{start};
    std::deque<T> queue{start};
    while (!queue.empty()) {
        T cur = queue.front();
        queue.pop_front();
        for (const auto& g : generators) {
            T next = act_fn(g, cur);
            if (seen.insert(next).second) queue.push_back(std::move(next));
        }
    }
    return seen;
}

std::vector<std::string> state_key(const State& s) {
    return to_strings(s);
}

}  // namespace

BisymmetryReport check_bisymmetry(const Model& m) {
    BisymmetryReport r;
    if (m.is_quantum()) {
        // Unitaries act transitively on pure states, on frames, on orthogonal
        // pairs, and any bijection between frames is implemented by a unitary.
        if (!m.group.unitaries.empty()) {
            r.pure_state_transitive = true;
            r.test_transitive = true;
            r.pair_transitive = true;
            r.fully_bisymmetric = true;
            r.outcome_orbits = 1;
            r.method = "analytic";
        } else {
            r.method = "unknown";
        }
        return r;
    }
    if (m.group.kind != GroupKind::FinitePermutation) {
        r.method = "unknown";
        return r;
    }
    r.method = "enumeration";
    const auto& gens = m.group.permutations;
    const auto& ts = m.testspace;
    const int n = ts.size();

    const auto& extreme = m.polytope().extreme;
    if (!extreme.empty()) {
        std::set<std::vector<std::string>> all;
        for (const auto& s : extreme) all.insert(state_key(s));
        auto orbit = orbit_of(state_key(extreme.front()), gens, [&](const Permutation& g, const std::vector<std::string>& key) {
            State s(static_cast<Eigen::Index>(key.size()));
            for (size_t i = 0; i < key.size(); ++i) s(static_cast<Eigen::Index>(i)) = Rational(key[i]);
            return state_key(act(g, s));
        });
        r.pure_state_transitive = orbit == all;
    }

    const auto tests = ts.test_set();
    if (!tests.empty()) {
        auto orbit = orbit_of(*tests.begin(), gens, [](const Permutation& g, const std::vector<int>& t) { return image_of(g, t); });
        r.test_transitive = orbit.size() == tests.size();
    }

    const auto pairs = distinguishable_pairs(ts);
    if (!pairs.empty()) {
        auto orbit = orbit_of(pairs.front(), gens, [](const Permutation& g, const std::pair<int, int>& p) {
            return std::make_pair(g[static_cast<size_t>(p.first)], g[static_cast<size_t>(p.second)]);
        });
        r.pair_transitive = orbit.size() == pairs.size();
    } else {
        r.pair_transitive = true;
    }
    r.outcome_orbits = static_cast<int>(outcome_orbits(gens, n).size());

    const auto elements = enumerate_group(gens, n, m.group.cap);
    r.group_order = elements.size();

    // Every bijection E -> F must be the restriction of a group element.
    auto rank = ts.uniform_rank();
    if (!rank) {
        r.fully_bisymmetric = false;
        return r;
    }
    double factorial = 1;
    for (int k = 2; k <= *rank; ++k) factorial *= k;
    const double needed = factorial * static_cast<double>(tests.size());
    bool full = static_cast<double>(elements.size()) >= needed;
    for (size_t t = 0; full && t < ts.tests.size(); ++t) {
        std::set<std::vector<int>> restrictions;
        for (const auto& g : elements) {
            std::vector<int> img;
            for (int x : ts.tests[t]) img.push_back(g[static_cast<size_t>(x)]);
            restrictions.insert(std::move(img));
        }
        full = static_cast<double>(restrictions.size()) == needed;
    }
    r.fully_bisymmetric = full;
    return r;
}

std::vector<int> certainty_face(const Model& m, int x) {
    std::vector<int> face;
    const auto& extreme = m.polytope().extreme;
    for (size_t v = 0; v < extreme.size(); ++v)
        if (extreme[v](x) == 1) face.push_back(static_cast<int>(v));
    return face;
}

bool is_sharp(const Model& m) {
    // Quantum: the only density matrix with tr(rho P) = 1 for a rank-one P is P.
    if (m.is_quantum()) return true;
    for (int x = 0; x < m.testspace.size(); ++x)
        if (certainty_face(m, x).size() != 1) return false;
    return true;
}

}  // namespace kvwb
