#pragma once

// Field evaluation, error norms, flux linkage and EMF spectra.

#include "iga/assembly.hpp"
#include "iga/models.hpp"
#include "iga/mortar.hpp"
#include "iga/trace.hpp"

#include <functional>
#include <vector>

namespace iga {

struct FieldValue {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  /// B = (dA/dy, -dA/dx)
  Vec2 b() const { return Vec2(grad.y(), -grad.x()); }
};

class SolutionField {
 public:
  SolutionField(const MultiPatchDomain& domain, const DiscreteSpace& space, const Eigen::VectorXd& u);

  FieldValue at_param(int patch, double xi, double eta) const;

  struct PointResult {
    bool found = false;
    int patch = -1;
    Vec2 param = Vec2::Zero();
    FieldValue field;
  };
  /// Locates the point by inverse mapping (patches tried in order of their
  /// bounding boxes); `found` is false when no patch contains it.
  PointResult at_point(const Vec2& x) const;

  const MultiPatchDomain& domain() const { return *domain_; }
  const DiscreteSpace& space() const { return *space_; }
  const Eigen::VectorXd& coefficients() const { return u_; }

 private:
  const MultiPatchDomain* domain_;
  const DiscreteSpace* space_;
  Eigen::VectorXd u_;
  Eigen::VectorXd local_;
};

struct L2Result {
  double error = 0.0;
  double norm = 0.0;  // L2 norm of the exact function
  double relative() const { return norm > 0 ? error / norm : error; }
};

/// sqrt(int (u - u*)^2) with q points per direction per element.
L2Result error_l2(const SolutionField& field, const std::function<double(const Vec2&)>& exact, int q);

/// Trace coefficients (one per trace function) of a global vector.
Eigen::VectorXd trace_coefficients(const TraceSpace& trace, const Eigen::VectorXd& u);

/// Trace value at any angle, folded into the trace's own interval using the
/// (anti-)periodic continuation with the given pitch.
double trace_value_wrapped(const TraceSpace& trace, const Eigen::VectorXd& coeffs, double theta, Symmetry symmetry,
                           double pitch);

/// sqrt(int (u_rt(theta - alpha) - u_st(theta))^2 dtheta) over the stator
/// interface, integrated on the union of both element partitions.
double error_jump(const TraceSpace& rt, const Eigen::VectorXd& u_rt, const TraceSpace& st, const Eigen::VectorXd& u_st,
                  double alpha, Symmetry symmetry, double pitch, int q);

/// sqrt(int (h*(theta) - sum_l lambda_l e^{-i l theta})^2 dtheta) over
/// [theta0, theta1]; the real part of the multiplier field is used.
double error_multiplier(const HarmonicSet& set, const Eigen::VectorXcd& lambda,
                        const std::function<double(double)>& exact, double theta0, double theta1);

/// Max |Im H(theta)| / max |H(theta)| over `samples` angles.
double multiplier_imag_ratio(const HarmonicSet& set, const Eigen::VectorXcd& lambda, double theta0, double theta1,
                             int samples = 100);

/// Rows map stator coefficients to full-machine flux linkage of phases a, b, c:
/// psi = poles * l_z * N_w / A * sum(polarity * int A_z) over the coil sides.
Eigen::MatrixXd flux_linkage_operator(const MultiPatchDomain& st, const DiscreteSpace& space,
                                      const std::vector<CoilSide>& coils, int n_turns, double axial_length, int poles,
                                      const QuadratureRule& quad);

struct Spectrum {
  std::vector<double> magnitude;   // one-sided |E_k|, index k = 0..K
  std::vector<cplx> coeff;         // complex coefficients of e(t), same indexing
  std::vector<double> waveform;    // e at the reconstructed full-period samples
  double f_el = 0.0;               // electrical frequency [Hz]

  int modes() const { return static_cast<int>(magnitude.size()) - 1; }
};

/// EMF e = -dPsi/dt from flux-linkage samples on a uniform grid over one pole
/// pitch (anti-periodic reconstruction, spectral differentiation). `omega`
/// is the mechanical speed in rad/s.
Spectrum emf_spectrum(const std::vector<double>& alpha, const std::vector<double>& psi, double pitch, double omega);

/// sqrt(sum_{k>=2} |E_k|^2) / |E_1|. Throws DomainError for a vanishing
/// fundamental.
double thd(const Spectrum& s);

}  // namespace iga
