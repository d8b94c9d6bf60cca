#include "sprox/power_iteration.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace sprox {

double power_iteration_max_eigenvalue(
    const std::function<Vector(const Vector&)>& apply, Index dim, double tol,
    int max_iter) {
  if (dim < 1) throw std::invalid_argument("power iteration: dim must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("power iteration: tol must be positive");

  // All-ones start vectors are exactly orthogonal to the top eigenvector of
  // some incidence-style operators (a single equality edge already does it),
  // so each coordinate gets a fixed deterministic perturbation in
  // [0.5, 1.5).
  Vector v(dim);
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  for (Index i = 0; i < dim; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
    v[i] = 1.0 + (u - 0.5);
  }
  v /= v.norm();

  double eig = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector av = apply(v);
    const double next = v.dot(av);  // Rayleigh quotient at the unit vector v
    const double norm = av.norm();
    if (norm == 0.0) return 0.0;  // v is in the null space and so is the max
    v = av / norm;
    if (it > 0 && std::abs(next - eig) <= tol * std::max(std::abs(next), 1.0)) {
      return next;
    }
    eig = next;
  }
  return eig;
}

}  // namespace sprox
