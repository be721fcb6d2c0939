#pragma once

// Element-level accumulation kernels.
//
// Quadrature data is stored point-major: for point k and local function a the
// value sits at index k * nb + a. Element matrices are dense nb x nb,
// row-major. All kernels accumulate (+=) into the output.

#include <string_view>

namespace iga::kernels {

enum class Isa { Scalar, Avx2 };

/// ke[a,b] += sum_k c[k] * (gx[k,a] gx[k,b] + gy[k,a] gy[k,b])
void stiffness(const double* gx, const double* gy, const double* c, int nq, int nb, double* ke);
/// me[a,b] += sum_k c[k] * n[k,a] n[k,b]
void mass(const double* n, const double* c, int nq, int nb, double* me);
/// fe[a] += sum_k c[k] * n[k,a]
void load(const double* n, const double* c, int nq, int nb, double* fe);

namespace scalar {
void stiffness(const double* gx, const double* gy, const double* c, int nq, int nb, double* ke);
void mass(const double* n, const double* c, int nq, int nb, double* me);
void load(const double* n, const double* c, int nq, int nb, double* fe);
}  // namespace scalar

#ifdef IGA_WITH_AVX2
namespace avx2 {
void stiffness(const double* gx, const double* gy, const double* c, int nq, int nb, double* ke);
void mass(const double* n, const double* c, int nq, int nb, double* me);
void load(const double* n, const double* c, int nq, int nb, double* fe);
}  // namespace avx2
#endif

/// Best variant supported by both the build and the running CPU.
Isa detected_isa();
Isa active_isa();
/// Overrides the dispatch (tests, benchmarking). Requesting an unavailable
/// variant falls back to scalar and returns false.
bool set_isa(Isa isa);
std::string_view isa_name(Isa isa);

}  // namespace iga::kernels
