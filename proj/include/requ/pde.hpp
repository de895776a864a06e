#pragma once

// Parametric diffusion on the unit square with a chessboard coefficient,
//
//   -div((mu + sum_i y_i chi_i) grad u) = f,  u = 0 on the boundary,
//
// discretised with P1 elements, reduced by a G-orthonormal snapshot basis and
// mapped to ReQU networks y -> u^rb_y and y -> V u^rb_y.

#include <Eigen/SparseCholesky>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "requ/network.hpp"

namespace requ {

using FemMatrix = Eigen::SparseMatrix<double>;
using LoadFn = std::function<double(double, double)>;

/// f(x1, x2) = 20 + 10 x1 - 5 x2.
double default_load(double x1, double x2);

struct AffineSystem {
  std::size_t grid_n = 0;  // interior nodes per side
  std::size_t s = 0;       // chessboard side
  std::size_t D = 0;       // grid_n^2
  std::size_t p = 0;       // s^2
  double mu = 0.0;
  /// B[0] = mu K, B[i] = stiffness restricted to subdomain i (1-based).
  std::vector<FemMatrix> B;
  Vector f;
  FemMatrix G;  // unit-coefficient stiffness, the H^1_0 inner product
};

/// Uniform mesh with h = 1/(grid_n + 1); every square cell is cut along its
/// lower-left to upper-right diagonal. Subdomain i = cx + s cy (0-based
/// cx, cy) holds the elements whose centroid lies in its cell. Nodes are
/// numbered (ix - 1) + (iy - 1) grid_n. The load uses the vertex rule
/// |T|/12 (2 f_a + f_b + f_c), exact for linear f.
AffineSystem assemble_affine_system(std::size_t grid_n, std::size_t s, double mu,
                                    const LoadFn& load = default_load);

/// B_y = B_0 + sum_i y_i B_i.
FemMatrix operator_at(const AffineSystem& sys, const Vector& y);

/// Sparse Cholesky solve of B_y u = f. Throws SingularSystem.
Vector solve_high_fidelity(const AffineSystem& sys, const Vector& y);

/// i.i.d. uniform points of [0,1]^p from a seeded generator.
std::vector<Vector> sample_parameters(std::size_t p, std::size_t count, std::uint64_t seed);

struct ReducedBasis {
  Matrix V;                   // D x d, G-orthonormal columns
  std::size_t d = 0;
  std::vector<Matrix> theta;  // theta_0 .. theta_p, theta_i = V^T B_i V
  Vector f_rb;                // V^T f
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double delta = 0.0;

  std::size_t p() const { return theta.empty() ? 0 : theta.size() - 1; }
};

/// Snapshot basis by modified Gram-Schmidt in the G inner product (two
/// sweeps per vector). A vector is dropped when its G-norm after projection
/// is below drop_tol times the largest snapshot G-norm.
ReducedBasis build_reduced_basis(const AffineSystem& sys, const std::vector<Vector>& params,
                                 double drop_tol);

/// Same, from precomputed snapshots.
ReducedBasis reduced_basis_from_snapshots(const AffineSystem& sys,
                                          const std::vector<Vector>& snapshots,
                                          double drop_tol);

/// theta_0 + sum_i y_i theta_i.
Matrix reduced_operator(const ReducedBasis& rb, const Vector& y);

/// Dense solve of the d x d reduced system. Throws SingularSystem.
Vector reduced_solve(const ReducedBasis& rb, const Vector& y);

/// |v|_G through the sparse Cholesky factor of G.
class GramNorm {
 public:
  explicit GramNorm(const FemMatrix& g);
  double operator()(const Vector& v) const;

 private:
  Eigen::SimplicialLLT<FemMatrix> llt_;
};

/// |u - V V^T G u|_G, the G-orthogonal projection error onto range(V).
double projection_error(const ReducedBasis& rb, const FemMatrix& g, const GramNorm& norm,
                        const Vector& u);

/// y -> vec(lambda (theta_0 + sum_i y_i theta_i)), exact, depth 2.
Network b_network(const ReducedBasis& rb);

/// y -> f_rb, depth 1.
Network f_network(const ReducedBasis& rb);

/// y -> vec(I - lambda B^rb_y): the last layer of b_network negated and
/// shifted by vec(I).
Network b_identity_network(const ReducedBasis& rb);

/// y -> approximately vec((B^rb_y)^-1) to spectral accuracy epsilon.
Network inv_b_network(const ReducedBasis& rb, double epsilon);

/// Inversion accuracy requested from inversion_network inside inv_b_network.
double inv_b_inner_epsilon(const ReducedBasis& rb, double epsilon);

struct SolutionNetworks {
  Network rb;  // y -> u^rb_y
  Network h;   // y -> V u^rb_y
  double epsilon_inv = 0.0;  // budget handed to inv_b_network
};

SolutionNetworks solution_network(const ReducedBasis& rb, double epsilon, double c_f);

/// 1.01 * |f_rb|; f does not depend on y here.
double load_bound(const ReducedBasis& rb);

enum class ErrorMode { EuclideanRb, GNormH, RelativeG };

struct ErrorReport {
  std::vector<double> errors;
  double worst_case = 0.0;
  double target_eps = 0.0;
  double rb_truncation = 0.0;
};

/// Compares net(y) with reduced_solve (EuclideanRb) or with V reduced_solve
/// (GNormH, RelativeG).
ErrorReport evaluate_error(const ReducedBasis& rb, const Network& net,
                           const std::vector<Vector>& test_params, const FemMatrix& g,
                           ErrorMode mode);

/// Header y_1..y_p,err_euclid_rb,err_g_h,err_rel_g, one row per parameter,
/// then a MAX row.
void write_error_csv(std::ostream& os, const std::vector<Vector>& params,
                     const ErrorReport& euclid, const ErrorReport& g_norm,
                     const ErrorReport& relative);

}  // namespace requ
