#include "iga/assembly.hpp"

#include "iga/errors.hpp"
#include "iga/kernels.hpp"

#include <sstream>

namespace iga {

MaterialMap MaterialMap::uniform(int n_patches, double nu) {
  MaterialMap m;
  m.patch.assign(n_patches, Material{"uniform", nu, 0.0, Vec2::Zero()});
  return m;
}

void MaterialMap::validate(int n_patches) const {
  if (static_cast<int>(patch.size()) != n_patches) {
    throw DomainError("material map covers " + std::to_string(patch.size()) + " patches, domain has " +
                      std::to_string(n_patches));
  }
  for (int p = 0; p < n_patches; ++p) {
    if (!(patch[p].nu > 0)) throw DomainError("non-positive reluctivity on patch " + std::to_string(p));
  }
}

void for_each_element(const MultiPatchDomain& domain, const DiscreteSpace& space, const QuadratureRule& quad,
                      const std::function<void(const ElementData&)>& visit) {
  if (space.num_patches() != domain.num_patches()) throw MismatchError("space/domain patch count mismatch");
  ElementData ed;
  const GaussRule& g = quad.line;
  for (int p = 0; p < domain.num_patches(); ++p) {
    const NurbsPatch& geo = domain.patch(p);
    const PatchSpace& ps = space.patch_space(p);
    const auto bu = ps.u.breakpoints();
    const auto bv = ps.v.breakpoints();
    const int pu = ps.u.degree(), pv = ps.v.degree();
    ed.patch = p;
    ed.nb = (pu + 1) * (pv + 1);
    ed.nq = g.size() * g.size();
    ed.local.resize(ed.nb);
    ed.n.resize(ed.nq * ed.nb);
    ed.gx.resize(ed.nq * ed.nb);
    ed.gy.resize(ed.nq * ed.nb);
    ed.wdet.resize(ed.nq);
    ed.x.resize(ed.nq);
    ed.param.resize(ed.nq);
    std::vector<BasisDerivs> bxu(g.size()), bxv(g.size());
    for (std::size_t ev = 0; ev + 1 < bv.size(); ++ev) {
      const double hv = bv[ev + 1] - bv[ev];
      for (int k = 0; k < g.size(); ++k) bxv[k] = bspline_eval(ps.v, bv[ev] + hv * g.x[k], 1);
      for (std::size_t eu = 0; eu + 1 < bu.size(); ++eu) {
        const double hu = bu[eu + 1] - bu[eu];
        for (int k = 0; k < g.size(); ++k) bxu[k] = bspline_eval(ps.u, bu[eu] + hu * g.x[k], 1);
        ed.eu = static_cast<int>(eu);
        ed.ev = static_cast<int>(ev);
        const int fu = bxu[0].first, fv = bxv[0].first;
        for (int j = 0; j <= pv; ++j) {
          for (int i = 0; i <= pu; ++i) ed.local[i + (pu + 1) * j] = space.offset(p) + ps.index(fu + i, fv + j);
        }
        for (int kv = 0; kv < g.size(); ++kv) {
          for (int ku = 0; ku < g.size(); ++ku) {
            const int q = ku + g.size() * kv;
            const double xi = bu[eu] + hu * g.x[ku];
            const double eta = bv[ev] + hv * g.x[kv];
            const MapSample ms = geo.eval(xi, eta);
            if (!(ms.det > 0)) {
              std::ostringstream os;
              os << "non-positive Jacobian determinant " << ms.det << " on patch " << p << ", element (" << eu << ", "
                 << ev << ")";
              throw DomainError(os.str());
            }
            const Mat2 jinv_t = ms.jacobian.inverse().transpose();
            ed.wdet[q] = g.w[ku] * g.w[kv] * hu * hv * ms.det;
            ed.x[q] = ms.point;
            ed.param[q] = Vec2(xi, eta);
            for (int j = 0; j <= pv; ++j) {
              for (int i = 0; i <= pu; ++i) {
                const int a = i + (pu + 1) * j;
                const Vec2 gref(bxu[ku](1, i) * bxv[kv](0, j), bxu[ku](0, i) * bxv[kv](1, j));
                const Vec2 gphys = jinv_t * gref;
                ed.n[q * ed.nb + a] = bxu[ku](0, i) * bxv[kv](0, j);
                ed.gx[q * ed.nb + a] = gphys.x();
                ed.gy[q * ed.nb + a] = gphys.y();
              }
            }
          }
        }
        visit(ed);
      }
    }
  }
}

namespace {

struct Scatter {
  const DiscreteSpace& space;
  std::vector<Eigen::Triplet<double>> trip;

  void matrix(const ElementData& ed, const std::vector<double>& ke) {
    for (int a = 0; a < ed.nb; ++a) {
      const DofMap& ma = space.map_flat(ed.local[a]);
      if (ma.global < 0) continue;
      for (int b = 0; b < ed.nb; ++b) {
        const DofMap& mb = space.map_flat(ed.local[b]);
        if (mb.global < 0) continue;
        trip.emplace_back(ma.global, mb.global, ma.sign * mb.sign * ke[a * ed.nb + b]);
      }
    }
  }

  SpMat finish() {
    SpMat k(space.num_dofs(), space.num_dofs());
    k.setFromTriplets(trip.begin(), trip.end());
    k.makeCompressed();
    return k;
  }
};

void scatter_vector(const DiscreteSpace& space, const ElementData& ed, const std::vector<double>& fe,
                    Eigen::VectorXd& out) {
  for (int a = 0; a < ed.nb; ++a) {
    const DofMap& m = space.map_flat(ed.local[a]);
    if (m.global >= 0) out[m.global] += m.sign * fe[a];
  }
}

}  // namespace

SpMat assemble_stiffness(const MultiPatchDomain& domain, const DiscreteSpace& space, const MaterialMap& materials,
                         const QuadratureRule& quad) {
  materials.validate(domain.num_patches());
  Scatter s{space, {}};
  std::vector<double> ke, c;
  for_each_element(domain, space, quad, [&](const ElementData& ed) {
    ke.assign(ed.nb * ed.nb, 0.0);
    c.resize(ed.nq);
    const double nu = materials.patch[ed.patch].nu;
    for (int q = 0; q < ed.nq; ++q) c[q] = nu * ed.wdet[q];
    kernels::stiffness(ed.gx.data(), ed.gy.data(), c.data(), ed.nq, ed.nb, ke.data());
    s.matrix(ed, ke);
  });
  return s.finish();
}

SpMat assemble_mass(const MultiPatchDomain& domain, const DiscreteSpace& space, const QuadratureRule& quad) {
  Scatter s{space, {}};
  std::vector<double> me;
  for_each_element(domain, space, quad, [&](const ElementData& ed) {
    me.assign(ed.nb * ed.nb, 0.0);
    kernels::mass(ed.n.data(), ed.wdet.data(), ed.nq, ed.nb, me.data());
    s.matrix(ed, me);
  });
  return s.finish();
}

Eigen::VectorXd assemble_current(const MultiPatchDomain& domain, const DiscreteSpace& space,
                                 const MaterialMap& materials, const QuadratureRule& quad) {
  materials.validate(domain.num_patches());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_dofs());
  std::vector<double> fe, c;
  for_each_element(domain, space, quad, [&](const ElementData& ed) {
    const double js = materials.patch[ed.patch].j_src;
    if (js == 0.0) return;
    fe.assign(ed.nb, 0.0);
    c.resize(ed.nq);
    for (int q = 0; q < ed.nq; ++q) c[q] = js * ed.wdet[q];
    kernels::load(ed.n.data(), c.data(), ed.nq, ed.nb, fe.data());
    scatter_vector(space, ed, fe, out);
  });
  return out;
}

Eigen::VectorXd assemble_pm(const MultiPatchDomain& domain, const DiscreteSpace& space, const MaterialMap& materials,
                            const QuadratureRule& quad) {
  materials.validate(domain.num_patches());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_dofs());
  std::vector<double> fe;
  for_each_element(domain, space, quad, [&](const ElementData& ed) {
    const Vec2 h = materials.patch[ed.patch].h_pm;
    if (h.isZero(0.0)) return;
    fe.assign(ed.nb, 0.0);
    for (int q = 0; q < ed.nq; ++q) {
      for (int a = 0; a < ed.nb; ++a) {
        fe[a] += (h.x() * ed.gy[q * ed.nb + a] - h.y() * ed.gx[q * ed.nb + a]) * ed.wdet[q];
      }
    }
    scatter_vector(space, ed, fe, out);
  });
  return out;
}

Eigen::VectorXd assemble_load(const MultiPatchDomain& domain, const DiscreteSpace& space,
                              const std::function<double(const Vec2&)>& f, const QuadratureRule& quad) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_dofs());
  std::vector<double> fe, c;
  for_each_element(domain, space, quad, [&](const ElementData& ed) {
    fe.assign(ed.nb, 0.0);
    c.resize(ed.nq);
    for (int q = 0; q < ed.nq; ++q) c[q] = f(ed.x[q]) * ed.wdet[q];
    kernels::load(ed.n.data(), c.data(), ed.nq, ed.nb, fe.data());
    scatter_vector(space, ed, fe, out);
  });
  return out;
}

Eigen::VectorXd solve_reduced(const SpMat& k, const Eigen::VectorXd& j) { return SpdSolver(k).solve(j); }

Eigen::VectorXd expand_local(const DiscreteSpace& space, const Eigen::VectorXd& u) {
  if (u.size() != space.num_dofs()) throw MismatchError("coefficient vector does not match the space");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_local());
  for (int i = 0; i < space.num_local(); ++i) {
    const DofMap& m = space.map_flat(i);
    if (m.global >= 0) out[i] = m.sign * u[m.global];
  }
  return out;
}

}  // namespace iga
