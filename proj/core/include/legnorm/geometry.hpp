#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "legnorm/expr.hpp"
#include "legnorm/linalg.hpp"

namespace legnorm {

struct Tolerances {
  double residual_zero = 1e-9;
  double rank_threshold = 1e-8;
  double omega_floor = 1e-8;
  double fd_step = 1e-5;

  /// Throws std::invalid_argument unless every field is positive.
  void validate() const;
};

/// Every tensor of the normality machinery evaluated at one point.
///
/// Index conventions: `g(q,k) = dL_q/dv^k` is the non-symmetric extended
/// metric, `g_inv` its inverse. The right dual `L_up^i = sum_s L_s g^{si}`
/// and the left dual `L_check_up^i = sum_s g^{is} L_s` differ because g is
/// not symmetric; nothing here symmetrizes g.
struct FiberFrame {
  ChartPoint point;
  Vec L_down;
  Mat g;
  Mat g_inv;
  std::vector<Mat> hess;  // hess[a](q,k) = d2 L_a / dv^q dv^k
  Vec L_up;
  Vec L_check_up;
  Vec L_check_down;  // sum_i L_check_up^i g_ir
  double omega = 0.0;
  Mat P;       // P(i,j) = delta - L^i L_j / omega
  Mat A;       // A^{rs}, second-derivative route
  Mat u_up;    // g^{ij} - L_check^i L^j / omega
  Mat u_down;  // g_sr - L_s L_check_r / omega

  std::size_t dim() const noexcept { return L_down.size(); }
};

/// Throws SingularMetric, NullOmega or DomainError.
FiberFrame evaluate_frame(const MapDefinition& map, const ChartPoint& point,
                          const Tolerances& tol = {});

/// A^{rs} = sum_q g^{qr} d_q L^s, with d_q L^s expanded through the
/// derivative of g^{-1} (d g^{-1} = -g^{-1} (dg) g^{-1}).
Mat compute_A_dual_derivative(const FiberFrame& f);
/// A^{rs} = g^{rs} - sum g^{qr} g^{ks} L^a d_q d_k L_a.
Mat compute_A_hessian(const FiberFrame& f);

/// R^{ij} = sum (A^{rs} - A^{sr}) P^i_r P^j_s.
Mat residual_full(const FiberFrame& f);
/// u_up - u_up^T.
Mat residual_reduced(const FiberFrame& f);

struct DualA {
  Vec up;    // L_check^i / omega
  Vec down;  // L_check_r / omega
};
DualA recover_A(const FiberFrame& f);

/// Symmetric part of g minus the symmetrized L (x) A.
Mat u_from_A(const FiberFrame& f, const Vec& A_down);
/// T_sr = (g_sr - g_rs) - (L_s A_r - L_r A_s).
Mat alternation_residual(const FiberFrame& f, const Vec& A_down);

struct Gauge {
  Mat u;
  Vec A;
};
/// A' = A - lambda L, u' = u + lambda L (x) L.
Gauge gauge_transform(const Mat& u, const Vec& A_down, const Vec& L_down,
                      double lambda);

/// sum w^{rs} L_r L_s with w = u^{-1}. Throws SingularMatrix.
double norm_u(const Mat& u, const Vec& L_down, double tol);

enum class Branch { DegenerateU, GaugeFixable, Obstructed };
std::string branch_name(Branch b);

struct Classification {
  Branch branch;
  std::size_t rank_u = 0;
  double norm = 0.0;      // ||L||_u, when u is invertible
  double lambda = 0.0;    // gauge factor, GaugeFixable only
  bool det_vanishes = false;  // det(u') = 0 confirmed, GaugeFixable only
};

/// Decision on a given symmetric u and covector L.
Classification classify_decomposition(const Mat& u, const Vec& L_down,
                                      const Tolerances& tol);
/// Same, with u taken from u_from_A(f, A_down).
Classification classify_gauge(const FiberFrame& f, const Vec& A_down,
                              const Tolerances& tol);

enum class Variant { Upper, Lower };

struct Decomposition {
  Mat u;
  Vec A_vec;
  Variant variant;
};

struct Assembled {
  Mat matrix;           // g^{ij} (Upper) or g_sr (Lower)
  Mat g;                // metric of the assembled frame
  Vec L_down;           // covector of the assembled frame
  double residual_reduced;  // max |S|
  double residual_full;     // max |R| in the g-form
};

/// Builds g^{ij} = u^{ij} + A^i L^j (Upper, `L` is the right dual L^j)
/// or g_sr = u_sr + L_s A_r (Lower, `L` is the covector L_s) and measures
/// the normality residual of the result.
/// Throws NotSymmetric, NotDegenerate, SingularResult.
Assembled assemble_from_decomposition(const Decomposition& d, const Vec& L,
                                      const Tolerances& tol);

/// L_i = exp(-phi) dL/dv^i, derivative taken on the tree.
MapDefinition make_trivial_map(const Expression& phi,
                               const Expression& potential, std::size_t n);

/// The built-in three-dimensional example: phi = -v1,
/// L = v1 + (v2^2 + v3^2)/2, hence L = e^{v1} (1, v2, v3).
MapDefinition builtin_exp_scaled_map();

}  // namespace legnorm
