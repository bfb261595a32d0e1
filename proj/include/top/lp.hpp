#pragma once

#include "top/model.hpp"

#include <vector>

namespace top {

/// min objective . z  subject to  constraints * z <= bounds, and z_j >= 0
/// for every j with nonneg[j] set (others are free).
struct LinearProgram {
    Vector objective;
    Matrix constraints;
    Vector bounds;
    std::vector<bool> nonneg;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Vector z;
    double objective_value = 0.0;
    int iterations = 0;
};

/// Two-phase dense simplex with Bland's anti-cycling rule. Free variables
/// are split internally. max_iter < 0 selects the default cap of
/// 50 * (variables + rows).
LpSolution solve(const LinearProgram& lp, double tol = 1e-9, int max_iter = -1);

/// Epigraph encoding of: minimize ||w||_1 subject to
/// ||theta_ll * w - e_k||_1 <= lambda * ||w||_1, over w in R^K.
/// Variables are [w+ (K), w- (K), r (K)], all nonnegative; 2K residual rows
/// plus one budget row.
LinearProgram omega_program(const Matrix& theta_ll, int k, double lambda);

/// Recovers w = w+ - w- from an omega_program solution vector.
Vector decode_omega(const Vector& z, int k_dim);

}  // namespace top
