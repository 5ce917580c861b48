// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "rbocp/control.hpp"

#include <cmath>

namespace rbocp {

double ClipPoly::bary_area() const {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const BaryPoint& a = pts[static_cast<std::size_t>(i)];
    const BaryPoint& b = pts[static_cast<std::size_t>((i + 1) % n)];
    sum += a.l1 * b.l2 - a.l2 * b.l1;
  }
  return 0.5 * std::abs(sum);
}

ClipPoly full_triangle_poly() {
  ClipPoly poly;
  poly.push({1.0, 0.0});
  poly.push({0.0, 1.0});
  poly.push({0.0, 0.0});
  return poly;
}

ClipPoly clip_halfplane(const ClipPoly& poly, const TriAffine& d, int sign) {
  ClipPoly out;
  const double s = sign >= 0 ? 1.0 : -1.0;
  for (int i = 0; i < poly.n; ++i) {
    const BaryPoint& a = poly.pts[static_cast<std::size_t>(i)];
    const BaryPoint& b = poly.pts[static_cast<std::size_t>((i + 1) % poly.n)];
    const double da = s * d.at(a.l1, a.l2);
    const double db = s * d.at(b.l1, b.l2);
    if (da >= 0.0) out.push(a);
    if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
      const double t = da / (da - db);
      out.push({a.l1 + t * (b.l1 - a.l1), a.l2 + t * (b.l2 - a.l2)});
    }
  }
  return out;
}

double ControlFunction::active_measure() const {
  double measure = 0.0;
  for (int t = 0; t < mesh->n_triangles(); ++t) {
    const ControlTriangle& ct = tris[static_cast<std::size_t>(t)];
    if (ct.state == TriState::Active) {
      measure += mesh->area(t);
    } else if (ct.state == TriState::Split) {
      measure += 2.0 * mesh->area(t) * ct.active_poly.bary_area();
    }
  }
  return measure;
}

ControlFunction control_from_adjoint(const ParametricOCP& ocp, const Mu& mu,
                                     const Eigen::VectorXd& p_full) {
  if (p_full.size() != ocp.n_full())
    throw std::invalid_argument("control_from_adjoint: adjoint must live on the full vertex set");
  ControlFunction u;
  u.mesh = &ocp.mesh;
  u.tris.resize(static_cast<std::size_t>(ocp.mesh.n_triangles()));

  for (int t = 0; t < ocp.mesh.n_triangles(); ++t) {
    const Triangle& tri = ocp.mesh.tris[static_cast<std::size_t>(t)];
    ControlTriangle& ct = u.tris[static_cast<std::size_t>(t)];
    const double ratio = ocp.b_weight(mu, tri.tag) / ocp.u_weight(mu, tri.tag);
    const double scale = -ratio / ocp.alpha;
    TriAffine diff;
    for (int i = 0; i < 3; ++i) {
      ct.candidate.v[static_cast<std::size_t>(i)] = scale * p_full[tri.v[static_cast<std::size_t>(i)]];
      ct.bound.v[static_cast<std::size_t>(i)] =
          ocp.bound.lower_at(ocp.mesh.vertices[tri.v[static_cast<std::size_t>(i)]]);
      diff.v[static_cast<std::size_t>(i)] =
          ct.candidate.v[static_cast<std::size_t>(i)] - ct.bound.v[static_cast<std::size_t>(i)];
    }
    bool has_pos = false, has_neg = false;
    for (double d : diff.v) {
      has_pos = has_pos || d > 0.0;
      has_neg = has_neg || d < 0.0;
    }
    if (has_pos && has_neg) {
      ct.state = TriState::Split;
      const ClipPoly full = full_triangle_poly();
      ct.inactive_poly = clip_halfplane(full, diff, +1);
      ct.active_poly = clip_halfplane(full, diff, -1);
    } else if (has_pos) {
      ct.state = TriState::Inactive;
    } else {
      // All <= 0; a vanishing difference ties to the bound (values coincide).
      ct.state = TriState::Active;
    }
  }
  return u;
}

namespace {

// integral over T of (sum_i g_i lambda_i) * lambda_j, exact.
inline void affine_times_basis(double area, const TriAffine& g, double* out) {
  const double s = g.v[0] + g.v[1] + g.v[2];
  for (int j = 0; j < 3; ++j) out[j] = area / 12.0 * (s + g.v[static_cast<std::size_t>(j)]);
}

// integral over T of (sum_i g_i lambda_i)^2, exact.
inline double affine_square(double area, const TriAffine& g) {
  const double s = g.v[0] + g.v[1] + g.v[2];
  const double q = g.v[0] * g.v[0] + g.v[1] * g.v[1] + g.v[2] * g.v[2];
  return area / 12.0 * (s * s + q);
}

}  // namespace

Eigen::VectorXd integrate_control(const ParametricOCP& ocp, const Mu& mu,
                                  const ControlFunction& u) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(ocp.n_free());
  for (int t = 0; t < ocp.mesh.n_triangles(); ++t) {
    const Triangle& tri = ocp.mesh.tris[static_cast<std::size_t>(t)];
    const ControlTriangle& ct = u.tris[static_cast<std::size_t>(t)];
    const double w = ocp.b_weight(mu, tri.tag);
    const double area = ocp.mesh.area(t);
    double local[3] = {0.0, 0.0, 0.0};
    if (ct.state == TriState::Active) {
      affine_times_basis(area, ct.bound, local);
    } else if (ct.state == TriState::Inactive) {
      affine_times_basis(area, ct.candidate, local);
    } else {
      for (int j = 0; j < 3; ++j) {
        local[j] += integrate_poly(area, ct.inactive_poly, [&](double l1, double l2) {
          const double lam = j == 0 ? l1 : (j == 1 ? l2 : 1.0 - l1 - l2);
          return ct.candidate.at(l1, l2) * lam;
        });
        local[j] += integrate_poly(area, ct.active_poly, [&](double l1, double l2) {
          const double lam = j == 0 ? l1 : (j == 1 ? l2 : 1.0 - l1 - l2);
          return ct.bound.at(l1, l2) * lam;
        });
      }
    }
    for (int j = 0; j < 3; ++j) {
      const int fj = ocp.dofs.full_to_free[static_cast<std::size_t>(tri.v[static_cast<std::size_t>(j)])];
      if (fj >= 0) load[fj] += w * local[j];
    }
  }
  return load;
}

double control_norm(const ParametricOCP& ocp, const Mu& mu, const ControlFunction& u) {
  double sq = 0.0;
  for (int t = 0; t < ocp.mesh.n_triangles(); ++t) {
    const Triangle& tri = ocp.mesh.tris[static_cast<std::size_t>(t)];
    const ControlTriangle& ct = u.tris[static_cast<std::size_t>(t)];
    const double w = ocp.u_weight(mu, tri.tag);
    const double area = ocp.mesh.area(t);
    if (ct.state == TriState::Active) {
      sq += w * affine_square(area, ct.bound);
    } else if (ct.state == TriState::Inactive) {
      sq += w * affine_square(area, ct.candidate);
    } else {
      sq += w * integrate_poly(area, ct.inactive_poly, [&](double l1, double l2) {
        const double v = ct.candidate.at(l1, l2);
        return v * v;
      });
      sq += w * integrate_poly(area, ct.active_poly, [&](double l1, double l2) {
        const double v = ct.bound.at(l1, l2);
        return v * v;
      });
    }
  }
  return std::sqrt(std::max(0.0, sq));
}

double control_error(const ParametricOCP& ocp, const Mu& mu, const ControlFunction& u1,
                     const ControlFunction& u2) {
  if (u1.mesh != u2.mesh)
    throw std::invalid_argument("control_error: controls must share one mesh");
  double sq = 0.0;
  for (int t = 0; t < ocp.mesh.n_triangles(); ++t) {
    const Triangle& tri = ocp.mesh.tris[static_cast<std::size_t>(t)];
    const ControlTriangle& a = u1.tris[static_cast<std::size_t>(t)];
    const ControlTriangle& b = u2.tris[static_cast<std::size_t>(t)];
    const double w = ocp.u_weight(mu, tri.tag);
    const double area = ocp.mesh.area(t);

    // Subdivide by every kink so the integrand is quadratic on each cell.
    ClipPoly cells[4];
    int n_cells = 0;
    if (a.state == TriState::Split) {
      TriAffine da;
      for (int i = 0; i < 3; ++i)
        da.v[static_cast<std::size_t>(i)] =
            a.candidate.v[static_cast<std::size_t>(i)] - a.bound.v[static_cast<std::size_t>(i)];
      cells[n_cells++] = clip_halfplane(full_triangle_poly(), da, +1);
      cells[n_cells++] = clip_halfplane(full_triangle_poly(), da, -1);
    } else {
      cells[n_cells++] = full_triangle_poly();
    }
    if (b.state == TriState::Split) {
      TriAffine db;
      for (int i = 0; i < 3; ++i)
        db.v[static_cast<std::size_t>(i)] =
            b.candidate.v[static_cast<std::size_t>(i)] - b.bound.v[static_cast<std::size_t>(i)];
      const int base = n_cells;
      for (int c = 0; c < base; ++c) {
        const ClipPoly original = cells[c];
        cells[c] = clip_halfplane(original, db, +1);
        cells[n_cells++] = clip_halfplane(original, db, -1);
      }
    }
    for (int c = 0; c < n_cells; ++c) {
      sq += w * integrate_poly(area, cells[c], [&](double l1, double l2) {
        const double diff = a.value(l1, l2) - b.value(l1, l2);
        return diff * diff;
      });
    }
  }
  return std::sqrt(std::max(0.0, sq));
}

PdasTerms assemble_pdas_terms(const ParametricOCP& ocp, const Mu& mu, const ControlFunction& u) {
  const int n = ocp.n_free();
  PdasTerms out;
  out.g_active = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(9 * ocp.mesh.n_triangles()));

  for (int t = 0; t < ocp.mesh.n_triangles(); ++t) {
    const Triangle& tri = ocp.mesh.tris[static_cast<std::size_t>(t)];
    const ControlTriangle& ct = u.tris[static_cast<std::size_t>(t)];
    const double wb = ocp.b_weight(mu, tri.tag);
    const double wii = wb * wb / ocp.u_weight(mu, tri.tag);
    const double area = ocp.mesh.area(t);

    double mass_local[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double g_local[3] = {0.0, 0.0, 0.0};
    if (ct.state == TriState::Inactive) {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) mass_local[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
    } else if (ct.state == TriState::Active) {
      affine_times_basis(area, ct.bound, g_local);
    } else {
      for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
          const double v = integrate_poly(area, ct.inactive_poly, [&](double l1, double l2) {
            const double li = i == 0 ? l1 : (i == 1 ? l2 : 1.0 - l1 - l2);
            const double lj = j == 0 ? l1 : (j == 1 ? l2 : 1.0 - l1 - l2);
            return li * lj;
          });
          mass_local[i][j] = v;
          mass_local[j][i] = v;
        }
        g_local[i] = integrate_poly(area, ct.active_poly, [&](double l1, double l2) {
          const double li = i == 0 ? l1 : (i == 1 ? l2 : 1.0 - l1 - l2);
          return ct.bound.at(l1, l2) * li;
        });
      }
    }
    // Structural zeros on fully active triangles keep the pattern fixed
    // across iterations.
    for (int i = 0; i < 3; ++i) {
      const int fi = ocp.dofs.full_to_free[static_cast<std::size_t>(tri.v[static_cast<std::size_t>(i)])];
      if (fi < 0) continue;
      out.g_active[fi] += wb * g_local[i];
      for (int j = 0; j < 3; ++j) {
        const int fj =
            ocp.dofs.full_to_free[static_cast<std::size_t>(tri.v[static_cast<std::size_t>(j)])];
        if (fj >= 0) trips.emplace_back(fi, fj, wii * mass_local[i][j]);
      }
    }
  }
  out.b_inactive.resize(n, n);
  out.b_inactive.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace rbocp
