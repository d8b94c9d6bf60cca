#pragma once

#include <functional>

#include "sprox/model.hpp"

namespace sprox {

/// Largest eigenvalue of a symmetric positive-semidefinite operator by power
/// iteration. Deterministic: the start vector is all-ones perturbed by a
/// fixed-seed LCG stream, which keeps it from being orthogonal to the top
/// eigenspace of signed incidence maps. Stops when the Rayleigh quotient
/// changes by less than tol relatively, or after max_iter steps.
double power_iteration_max_eigenvalue(
    const std::function<Vector(const Vector&)>& apply, Index dim, double tol,
    int max_iter = 10000);

}  // namespace sprox
