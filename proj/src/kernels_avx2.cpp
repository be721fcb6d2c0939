#include "iga/kernels.hpp"

#include <immintrin.h>

namespace iga::kernels::avx2 {

void stiffness(const double* gx, const double* gy, const double* c, int nq, int nb, double* ke) {
  const int nv = nb & ~3;
  for (int k = 0; k < nq; ++k) {
    const double* x = gx + k * nb;
    const double* y = gy + k * nb;
    for (int a = 0; a < nb; ++a) {
      const double sx = c[k] * x[a];
      const double sy = c[k] * y[a];
      const __m256d vx = _mm256_set1_pd(sx);
      const __m256d vy = _mm256_set1_pd(sy);
      double* row = ke + a * nb;
      int b = 0;
      for (; b < nv; b += 4) {
        __m256d acc = _mm256_loadu_pd(row + b);
        acc = _mm256_fmadd_pd(vx, _mm256_loadu_pd(x + b), acc);
        acc = _mm256_fmadd_pd(vy, _mm256_loadu_pd(y + b), acc);
        _mm256_storeu_pd(row + b, acc);
      }
      for (; b < nb; ++b) row[b] += sx * x[b] + sy * y[b];
    }
  }
}

void mass(const double* n, const double* c, int nq, int nb, double* me) {
  const int nv = nb & ~3;
  for (int k = 0; k < nq; ++k) {
    const double* v = n + k * nb;
    for (int a = 0; a < nb; ++a) {
      const double s = c[k] * v[a];
      const __m256d vs = _mm256_set1_pd(s);
      double* row = me + a * nb;
      int b = 0;
      for (; b < nv; b += 4) {
        _mm256_storeu_pd(row + b, _mm256_fmadd_pd(vs, _mm256_loadu_pd(v + b), _mm256_loadu_pd(row + b)));
      }
      for (; b < nb; ++b) row[b] += s * v[b];
    }
  }
}

void load(const double* n, const double* c, int nq, int nb, double* fe) {
  const int nv = nb & ~3;
  for (int k = 0; k < nq; ++k) {
    const double* v = n + k * nb;
    const __m256d vc = _mm256_set1_pd(c[k]);
    int a = 0;
    for (; a < nv; a += 4) {
      _mm256_storeu_pd(fe + a, _mm256_fmadd_pd(vc, _mm256_loadu_pd(v + a), _mm256_loadu_pd(fe + a)));
    }
    for (; a < nb; ++a) fe[a] += c[k] * v[a];
  }
}

}  // namespace iga::kernels::avx2
