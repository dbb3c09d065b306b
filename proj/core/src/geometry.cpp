#include "legnorm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "legnorm/errors.hpp"

namespace legnorm {

void Tolerances::validate() const {
  if (!(residual_zero > 0 && rank_threshold > 0 && omega_floor > 0 &&
        fd_step > 0))
    throw std::invalid_argument("tolerances must be positive");
}

namespace {

Vec scaled(const Vec& x, double s) {
  Vec r = x;
  for (double& v : r) v *= s;
  return r;
}

// Sandwich P D P^T, i.e. sum_{r,s} D(r,s) P(i,r) P(j,s).
Mat project(const Mat& P, const Mat& D) { return P * D * P.transposed(); }

Mat projector(const Vec& L_up, const Vec& L_down, double omega) {
  return Mat::identity(L_up.size()) - (1.0 / omega) * outer(L_up, L_down);
}

}  // namespace

FiberFrame evaluate_frame(const MapDefinition& map, const ChartPoint& point,
                          const Tolerances& tol) {
  const std::size_t n = map.n;
  if (point.x.size() != n || point.v.size() != n)
    throw std::invalid_argument("chart point dimension mismatch");
  for (double c : point.x)
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite point");
  for (double c : point.v)
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite point");

  FiberFrame f;
  f.point = point;
  f.L_down.resize(n);
  f.g = Mat(n);
  f.hess.assign(n, Mat(n));
  for (std::size_t a = 0; a < n; ++a) {
    const Jet2 j = map.components[a].eval_jet(point);
    f.L_down[a] = j.value();
    for (std::size_t k = 0; k < n; ++k) {
      f.g(a, k) = j.grad(k);
      for (std::size_t q = 0; q < n; ++q) f.hess[a](q, k) = j.hess(q, k);
    }
  }
  if (!f.g.all_finite() ||
      std::any_of(f.L_down.begin(), f.L_down.end(),
                  [](double x) { return !std::isfinite(x); }))
    throw DomainError("non-finite map value or derivative");
  for (const Mat& h : f.hess)
    if (!h.all_finite()) throw DomainError("non-finite second derivative");

  try {
    f.g_inv = invert(f.g, tol.rank_threshold).inverse;
  } catch (const SingularMatrix&) {
    throw SingularMetric("fiber Jacobian g is singular; map is not a local "
                         "diffeomorphism here");
  }

  f.L_up = left_multiply(f.L_down, f.g_inv);
  f.L_check_up = f.g_inv * f.L_down;
  f.L_check_down = left_multiply(f.L_check_up, f.g);
  f.omega = dot(f.L_down, f.L_up);
  if (!(std::abs(f.omega) >= tol.omega_floor))
    throw NullOmega("|L|^2 below omega_floor");

  f.P = projector(f.L_up, f.L_down, f.omega);
  f.A = compute_A_hessian(f);
  f.u_up = f.g_inv - (1.0 / f.omega) * outer(f.L_check_up, f.L_up);
  f.u_down = f.g - (1.0 / f.omega) * outer(f.L_down, f.L_check_down);
  return f;
}

Mat compute_A_hessian(const FiberFrame& f) {
  const std::size_t n = f.dim();
  Mat contracted(n);  // sum_a L^a d_q d_k L_a
  for (std::size_t a = 0; a < n; ++a)
    contracted = contracted + f.L_up[a] * f.hess[a];
  return f.g_inv - f.g_inv.transposed() * contracted * f.g_inv;
}

Mat compute_A_dual_derivative(const FiberFrame& f) {
  const std::size_t n = f.dim();
  // dLup(q,s) = d_q L^s = sum_i g_iq g^{is} + sum_i L_i d_q g^{is}
  Mat dLup(n);
  for (std::size_t q = 0; q < n; ++q) {
    Mat dg(n);  // d_q g_ak
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t k = 0; k < n; ++k) dg(a, k) = f.hess[a](q, k);
    const Mat dg_inv = -1.0 * (f.g_inv * dg * f.g_inv);
    for (std::size_t s = 0; s < n; ++s) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        acc += f.g(i, q) * f.g_inv(i, s) + f.L_down[i] * dg_inv(i, s);
      dLup(q, s) = acc;
    }
  }
  Mat A(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = 0; s < n; ++s) {
      double acc = 0.0;
      for (std::size_t q = 0; q < n; ++q) acc += f.g_inv(q, r) * dLup(q, s);
      A(r, s) = acc;
    }
  return A;
}

Mat residual_full(const FiberFrame& f) {
  return project(f.P, f.A - f.A.transposed());
}

Mat residual_reduced(const FiberFrame& f) {
  return f.u_up - f.u_up.transposed();
}

DualA recover_A(const FiberFrame& f) {
  return {scaled(f.L_check_up, 1.0 / f.omega),
          scaled(f.L_check_down, 1.0 / f.omega)};
}

Mat u_from_A(const FiberFrame& f, const Vec& A_down) {
  const std::size_t n = f.dim();
  Mat u(n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t r = s; r < n; ++r) {
      const double v = 0.5 * (f.g(s, r) + f.g(r, s)) -
                       0.5 * (f.L_down[s] * A_down[r] + f.L_down[r] * A_down[s]);
      u(s, r) = v;
      u(r, s) = v;
    }
  return u;
}

Mat alternation_residual(const FiberFrame& f, const Vec& A_down) {
  const std::size_t n = f.dim();
  Mat t(n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t r = 0; r < n; ++r)
      t(s, r) = (f.g(s, r) - f.g(r, s)) -
                (f.L_down[s] * A_down[r] - f.L_down[r] * A_down[s]);
  return t;
}

Gauge gauge_transform(const Mat& u, const Vec& A_down, const Vec& L_down,
                      double lambda) {
  Gauge out{u + lambda * outer(L_down, L_down), A_down};
  for (std::size_t r = 0; r < out.A.size(); ++r)
    out.A[r] -= lambda * L_down[r];
  return out;
}

double norm_u(const Mat& u, const Vec& L_down, double tol) {
  const Mat w = invert(u, tol).inverse;
  return dot(L_down, w * L_down);
}

std::string branch_name(Branch b) {
  switch (b) {
    case Branch::DegenerateU:
      return "DegenerateU";
    case Branch::GaugeFixable:
      return "GaugeFixable";
    case Branch::Obstructed:
      return "Obstructed";
  }
  return "?";
}

Classification classify_decomposition(const Mat& u, const Vec& L_down,
                                      const Tolerances& tol) {
  const std::size_t n = u.size();
  Classification c{Branch::DegenerateU};
  c.rank_u = rank_and_kernel(u, tol.rank_threshold).rank;
  if (c.rank_u < n) return c;
  double norm = 0.0;
  Mat w;
  try {
    w = invert(u, tol.rank_threshold).inverse;
    norm = dot(L_down, w * L_down);
  } catch (const SingularMatrix&) {
    return c;
  }
  c.norm = norm;
  const double scale = std::max(1.0, w.max_abs() * dot(L_down, L_down));
  if (std::abs(norm) < tol.residual_zero * scale) {
    c.branch = Branch::Obstructed;
    return c;
  }
  c.branch = Branch::GaugeFixable;
  c.lambda = -1.0 / norm;
  const Gauge fixed = gauge_transform(u, Vec(n, 0.0), L_down, c.lambda);
  c.det_vanishes = rank_and_kernel(fixed.u, tol.rank_threshold).rank < n;
  return c;
}

Classification classify_gauge(const FiberFrame& f, const Vec& A_down,
                              const Tolerances& tol) {
  return classify_decomposition(u_from_A(f, A_down), f.L_down, tol);
}

Assembled assemble_from_decomposition(const Decomposition& d, const Vec& L,
                                      const Tolerances& tol) {
  const std::size_t n = d.u.size();
  if (d.A_vec.size() != n || L.size() != n)
    throw std::invalid_argument("decomposition dimension mismatch");
  if (max_abs(L) == 0.0) throw std::invalid_argument("L must be nonzero");
  const double asym = (d.u - d.u.transposed()).max_abs();
  if (asym > 1e-12 * std::max(1.0, d.u.max_abs()))
    throw NotSymmetric("u is not symmetric (max asymmetry " +
                       std::to_string(asym) + ")");
  if (rank_and_kernel(d.u, tol.rank_threshold).rank == n)
    throw NotDegenerate("u has full rank");

  Assembled out;
  Mat g_inv;
  try {
    if (d.variant == Variant::Upper) {
      out.matrix = d.u + outer(d.A_vec, L);
      g_inv = out.matrix;
      out.g = invert(g_inv, tol.rank_threshold).inverse;
      out.L_down = left_multiply(L, out.g);
    } else {
      out.matrix = d.u + outer(L, d.A_vec);
      out.g = out.matrix;
      g_inv = invert(out.g, tol.rank_threshold).inverse;
      out.L_down = L;
    }
  } catch (const SingularMatrix&) {
    throw SingularResult("assembled matrix is singular");
  }

  const Vec L_up = left_multiply(out.L_down, g_inv);
  const Vec L_check = g_inv * out.L_down;
  const double omega = dot(out.L_down, L_up);
  if (!(std::abs(omega) >= tol.omega_floor))
    throw NullOmega("|L|^2 below omega_floor in assembled frame");
  const Mat u_up = g_inv - (1.0 / omega) * outer(L_check, L_up);
  out.residual_reduced = (u_up - u_up.transposed()).max_abs();
  out.residual_full =
      project(projector(L_up, out.L_down, omega), g_inv - g_inv.transposed())
          .max_abs();
  return out;
}

MapDefinition make_trivial_map(const Expression& phi,
                               const Expression& potential, std::size_t n) {
  bind(phi, n);
  bind(potential, n);
  std::optional<Expression> factor;
  if (!phi.is_number(0.0)) {
    Expression minus_phi = phi.kind() == Expression::Kind::Neg
                               ? phi.lhs()
                               : Expression::negate(phi);
    factor = Expression::call(Func::Exp, std::move(minus_phi));
  }
  std::vector<Expression> comps;
  for (std::size_t i = 1; i <= n; ++i) {
    Expression d = differentiate(potential, i);
    if (!factor || d.is_number(0.0)) {
      comps.push_back(std::move(d));
    } else if (d.is_number(1.0)) {
      comps.push_back(*factor);
    } else {
      comps.push_back(
          Expression::binary(Expression::Kind::Mul, *factor, std::move(d)));
    }
  }
  return make_explicit_map(n, std::move(comps));
}

MapDefinition builtin_exp_scaled_map() {
  const Expression phi = parse_expression("-v1");
  const Expression potential = parse_expression("v1 + 0.5*(v2^2 + v3^2)");
  MapDefinition m = make_trivial_map(phi, potential, 3);
  m.body = PotentialPair{phi, potential};
  m.source = m.to_text();
  return m;
}

}  // namespace legnorm
