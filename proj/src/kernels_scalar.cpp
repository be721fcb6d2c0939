#include "iga/kernels.hpp"

namespace iga::kernels::scalar {

void stiffness(const double* gx, const double* gy, const double* c, int nq, int nb, double* ke) {
  for (int k = 0; k < nq; ++k) {
    const double* x = gx + k * nb;
    const double* y = gy + k * nb;
    for (int a = 0; a < nb; ++a) {
      const double sx = c[k] * x[a];
      const double sy = c[k] * y[a];
      double* row = ke + a * nb;
      for (int b = 0; b < nb; ++b) row[b] += sx * x[b] + sy * y[b];
    }
  }
}

void mass(const double* n, const double* c, int nq, int nb, double* me) {
  for (int k = 0; k < nq; ++k) {
    const double* v = n + k * nb;
    for (int a = 0; a < nb; ++a) {
      const double s = c[k] * v[a];
      double* row = me + a * nb;
      for (int b = 0; b < nb; ++b) row[b] += s * v[b];
    }
  }
}

void load(const double* n, const double* c, int nq, int nb, double* fe) {
  for (int k = 0; k < nq; ++k) {
    const double* v = n + k * nb;
    for (int a = 0; a < nb; ++a) fe[a] += c[k] * v[a];
  }
}

}  // namespace iga::kernels::scalar
