#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nmloc/homological.hpp"
#include "nmloc/iteration.hpp"
#include "nmloc/models.hpp"
#include "nmloc/operator.hpp"
#include "nmloc/tame.hpp"

namespace nmloc::fixtures {

using Rng = std::mt19937_64;

cplx random_unit_disk(Rng& rng);

// A few random diagonals, entries of size up to amp <k>^{-decay}.
LatticeOperator random_sparse_operator(const LatticeBox& box, Rng& rng, int diagonals, double amp, double decay);

// Every off-diagonal entry filled, size up to amp <i-j>^{-decay}.
LatticeOperator random_dense_offdiag(const LatticeBox& box, Rng& rng, double amp, double decay);

// Rescales x so that |x|_s equals target.
LatticeOperator scaled_to(const LatticeOperator& x, double s, double target);

struct SuiteResult {
    bool passed = true;
    int instances = 0;
    double worst = 0.0;
    std::string detail;
    void fail(const std::string& why) {
        if (passed) detail = why;
        passed = false;
    }
};

SuiteResult tame_suite(const LatticeBox& box, int pairs, std::uint64_t seed);
SuiteResult smoothing_suite(const LatticeBox& box);
SuiteResult homological_suite(int N, int instances, std::uint64_t seed);
SuiteResult fixed_point_suite(int N, int instances, std::uint64_t seed);
SuiteResult neumann_suite(int N, int instances, std::uint64_t seed);

// Power-law hopping and a formula potential on a box.
struct Model {
    LatticeOperator T;
    DiagonalOperator D;
};
Model make_model(PotentialKind kind, int d, int N, double s, double epsilon, int M = -1);

SchemeParams empirical_params(int d, double s, double epsilon, double gamma, Mode mode = Mode::Inverse);

}  // namespace nmloc::fixtures
