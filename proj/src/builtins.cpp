#include "kvwb/builtins.hpp"

namespace kvwb {

std::vector<std::string> builtin_names() {
    return {"classical:2", "classical:3", "classical:4", "classical:5", "bitsum",
            "squit",       "qubit:real",  "qubit:complex", "qutrit:complex"};
}

Model classical_model(int n) {
    if (n < 1) throw ParseError("classical:n needs n >= 1");
    Model m;
    m.name = "classical:" + std::to_string(n);
    std::vector<int> test;
    for (int i = 0; i < n; ++i) {
        m.testspace.outcomes.push_back("x" + std::to_string(i));
        test.push_back(i);
    }
    m.testspace.tests.push_back(test);
    PolytopeStates states;
    for (int i = 0; i < n; ++i) {
        State s = zero_vector(n);
        s(i) = 1;
        states.extreme.push_back(s);
    }
    m.states = states;
    m.group.kind = GroupKind::FinitePermutation;
    if (n >= 2) {
        Permutation swap = identity_permutation(n);
        std::swap(swap[0], swap[1]);
        m.group.permutations.push_back(swap);
    }
    if (n >= 3) {
        Permutation cycle(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) cycle[static_cast<size_t>(i)] = (i + 1) % n;
        m.group.permutations.push_back(cycle);
    }
    return m;
}

Model bit_sum_model() {
    Model m = classical_model(4);
    m.name = "bitsum";
    m.testspace.outcomes = {"a0", "a1", "b0", "b1"};
    m.group.permutations = {{1, 0, 2, 3}, {0, 1, 3, 2}};
    return m;
}

Model squit_model() {
    Model m;
    m.name = "squit";
    m.testspace.outcomes = {"x0", "x1", "y0", "y1"};
    m.testspace.tests = {{0, 1}, {2, 3}};
    PolytopeStates states;
    for (const auto& [p, q] : std::vector<std::pair<int, int>>{{1, 1}, {1, 0}, {0, 1}, {0, 0}}) {
        State s(4);
        s << Rational(p), Rational(1 - p), Rational(q), Rational(1 - q);
        states.extreme.push_back(s);
    }
    m.states = states;
    m.group.kind = GroupKind::FinitePermutation;
    // Quarter turn of the square x0 -> y0 -> x1 -> y1 -> x0, and the x <-> y reflection.
    m.group.permutations = {{2, 3, 1, 0}, {2, 3, 0, 1}};
    return m;
}

FrameSample default_frames(Field field, int dim) {
    using GV = GaussVector;
    FrameSample s;
    if (dim == 2) {
        s.names = {"z", "x"};
        s.frames = {{GV{{1, 0}, {0, 0}}, GV{{0, 0}, {1, 0}}}, {GV{{1, 0}, {1, 0}}, GV{{1, 0}, {-1, 0}}}};
        if (field == Field::Complex) {
            s.names.push_back("y");
            s.frames.push_back({GV{{1, 0}, {0, 1}}, GV{{1, 0}, {0, -1}}});
        }
        return s;
    }
    if (dim == 3 && field == Field::Complex) {
        const std::vector<std::vector<long>> f1 = {{1, 2, 2}, {2, 1, -2}, {2, -2, 1}};
        const std::vector<std::vector<long>> f2 = {{2, 3, 6}, {3, -6, 2}, {6, 2, -3}};
        auto frame = [](const std::vector<std::vector<long>>& rows, int phase_slot, long phase) {
            std::vector<GV> out;
            for (const auto& r : rows) {
                GV v;
                for (int k = 0; k < 3; ++k) {
                    const long a = r[static_cast<size_t>(k)];
                    v.emplace_back(k == phase_slot ? std::pair<long, long>{0, phase * a} : std::pair<long, long>{a, 0});
                }
                out.push_back(v);
            }
            return out;
        };
        s.names = {"c", "f", "g", "fi", "fj", "gi", "gj"};
        s.frames = {{GV{{1, 0}, {0, 0}, {0, 0}}, GV{{0, 0}, {1, 0}, {0, 0}}, GV{{0, 0}, {0, 0}, {1, 0}}},
                    frame(f1, -1, 0),
                    frame(f2, -1, 0),
                    frame(f1, 1, 1),
                    frame(f1, 1, -1),
                    frame(f2, 2, 1),
                    frame(f2, 2, -1)};
        return s;
    }
    throw ParseError("no default frame sample for " + to_string(field) + " dimension " + std::to_string(dim) +
                     "; give explicit vectors");
}

Model quantum_model_from_frames(Field field, int dim, const FrameSample& frames, std::uint64_t seed,
                                int generator_count) {
    Model m;
    QuantumStates q;
    q.field = field;
    q.dim = dim;
    for (size_t f = 0; f < frames.frames.size(); ++f) {
        std::vector<int> test;
        const auto& frame = frames.frames[f];
        for (size_t i = 0; i < frame.size(); ++i) {
            std::string id = frames.names[f];
            if (dim == 2) id += i == 0 ? "+" : "-";
            else id += std::to_string(i);
            test.push_back(m.testspace.size());
            m.testspace.outcomes.push_back(id);
            q.projectors.push_back(projector(frame[i]));
        }
        m.testspace.tests.push_back(test);
    }
    m.states = q;
    m.group.kind = GroupKind::TopologicalGenerators;
    m.group.seed = seed;
    m.group.unitaries = random_cayley_unitaries(field, dim, generator_count, seed);
    return m;
}

Model quantum_model(Field field, int dim, std::uint64_t seed, int generator_count) {
    Model m = quantum_model_from_frames(field, dim, default_frames(field, dim), seed, generator_count);
    m.name = (dim == 2 ? "qubit:" : dim == 3 ? "qutrit:" : "quantum" + std::to_string(dim) + ":") + to_string(field);
    return m;
}

Model builtin_model(const std::string& name, std::uint64_t seed) {
    if (name.rfind("classical:", 0) == 0) {
        const std::string n = name.substr(10);
        if (n.empty() || n.find_first_not_of("0123456789") != std::string::npos || n.size() > 3)
            throw ParseError("bad built-in '" + name + "'");
        return classical_model(std::stoi(n));
    }
    if (name == "bitsum") return bit_sum_model();
    if (name == "squit") return squit_model();
    if (name == "qubit:real") return quantum_model(Field::Real, 2, seed);
    if (name == "qubit:complex") return quantum_model(Field::Complex, 2, seed);
    if (name == "qutrit:complex") return quantum_model(Field::Complex, 3, seed);
    throw ParseError("unknown built-in model '" + name + "'");
}

}  // namespace kvwb
