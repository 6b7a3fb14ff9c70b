#pragma once

// Built-in models addressed by name, e.g. "classical:3", "squit",
// "qubit:complex".

#include "kvwb/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kvwb {

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Every accepted name, classical:n listed for n = 2..5.
std::vector<std::string> builtin_names();

/// Throws ParseError for unknown names. `seed` drives the random unitary
/// generators of quantum models.
Model builtin_model(const std::string& name, std::uint64_t seed = kDefaultSeed);

Model classical_model(int n);

/// Two classical bits whose tests are merged, with only the product group
/// S2 x S2 (a reducible classical 4-outcome model).
Model bit_sum_model();

/// Square state space on two binary tests with the dihedral group of order 8.
Model squit_model();

/// Quantum model on the default sample of frames for (field, dim).
Model quantum_model(Field field, int dim, std::uint64_t seed = kDefaultSeed, int generator_count = 2);

/// The default frames: one list of Gaussian-integer vectors per test, and
/// the outcome-id prefix of each frame.
struct FrameSample {
    std::vector<std::string> names;
    std::vector<std::vector<GaussVector>> frames;
};
FrameSample default_frames(Field field, int dim);

/// Quantum model from explicit frames (each an orthogonal basis).
Model quantum_model_from_frames(Field field, int dim, const FrameSample& frames, std::uint64_t seed,
                                int generator_count = 2);

}  // namespace kvwb
