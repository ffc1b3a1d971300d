#pragma once

// Synthetic regression instances for the benchmark harness.

#include "lever/densemat.hpp"
#include "lever/random.hpp"

#include <string>

namespace lever {

enum class Generator {
    gaussian,        // i.i.d. standard normal entries
    ill_conditioned, // planted SVD, singular values 1 ... 1e-8 geometric
    coherent_rows,   // gaussian plus one heavy row with leverage close to 1
};

std::string to_string(Generator g);
Generator parse_generator(const std::string& text);

DenseMatrix generate_design(Generator g, std::size_t n, std::size_t d, Seed seed);

struct RegressionInstance {
    DenseMatrix A;
    DenseMatrix B;
    Matrix planted;  // X such that B = A X + noise
};

/// B = A X + E with ||E||_F = residual_fraction * ||A X||_F.
RegressionInstance make_instance(Generator g, std::size_t n, std::size_t d, std::size_t big_n, Seed seed,
                                 double residual_fraction = 0.5);

} // namespace lever
