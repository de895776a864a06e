#include "requ/pde.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "requ/calculus.hpp"
#include "requ/errors.hpp"
#include "requ/matrix_nets.hpp"
#include "requ/network_io.hpp"

namespace requ {

namespace {

constexpr std::array<double, 4> kOmega{1.0, -1.0, 1.0, -1.0};
constexpr std::array<double, 4> kGamma{1.0, -1.0, -1.0, 1.0};
constexpr std::array<double, 4> kBeta{0.25, 0.25, -0.25, -0.25};

struct Vertex {
  std::size_t ix, iy;
};

// Subdomain column of a centroid coordinate num / (3 (n + 1)), in integers
// so that centroids on a cell boundary are classified consistently.
std::size_t cell_of(std::size_t num, std::size_t n, std::size_t s) {
  return std::min(s - 1, num * s / (3 * (n + 1)));
}

void check_params(const ReducedBasis& rb, const Vector& y) {
  if (static_cast<std::size_t>(y.size()) != rb.p()) {
    throw DimensionMismatch("parameter has length " + std::to_string(y.size()) +
                            ", expected " + std::to_string(rb.p()));
  }
}

}  // namespace

double default_load(double x1, double x2) { return 20.0 + 10.0 * x1 - 5.0 * x2; }

AffineSystem assemble_affine_system(std::size_t grid_n, std::size_t s, double mu,
                                    const LoadFn& load) {
  if (grid_n < 3) throw InvalidArgument("grid_n must be at least 3");
  if (s < 1) throw InvalidArgument("chessboard side must be at least 1");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be positive");
  const std::size_t n = grid_n;
  const double h = 1.0 / static_cast<double>(n + 1);

  AffineSystem sys;
  sys.grid_n = n;
  sys.s = s;
  sys.D = n * n;
  sys.p = s * s;
  sys.mu = mu;
  sys.f = Vector::Zero(static_cast<Eigen::Index>(sys.D));

  std::vector<std::vector<Eigen::Triplet<double>>> parts(sys.p);
  std::vector<Eigen::Triplet<double>> unit;
  auto index = [n](const Vertex& v) -> long {
    if (v.ix == 0 || v.iy == 0 || v.ix > n || v.iy > n) return -1;
    return static_cast<long>((v.ix - 1) + (v.iy - 1) * n);
  };

  auto add_element = [&](const std::array<Vertex, 3>& t, std::size_t cx_num, std::size_t cy_num) {
    const std::size_t part = cell_of(cx_num, n, s) + s * cell_of(cy_num, n, s);
    std::array<double, 3> x{}, y{};
    for (int a = 0; a < 3; ++a) {
      x[a] = static_cast<double>(t[a].ix) * h;
      y[a] = static_cast<double>(t[a].iy) * h;
    }
    const double det = (x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]);
    const double area = 0.5 * std::abs(det);
    // Gradients of the barycentric coordinates.
    std::array<double, 3> gx{}, gy{};
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      gx[a] = (y[b] - y[c]) / det;
      gy[a] = (x[c] - x[b]) / det;
    }
    std::array<double, 3> fv{};
    for (int a = 0; a < 3; ++a) fv[a] = load(x[a], y[a]);
    for (int a = 0; a < 3; ++a) {
      const long ra = index(t[a]);
      if (ra < 0) continue;
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      sys.f[ra] += area / 12.0 * (2.0 * fv[a] + fv[b] + fv[c]);
      for (int bb = 0; bb < 3; ++bb) {
        const long rb = index(t[bb]);
        if (rb < 0) continue;
        const double k = area * (gx[a] * gx[bb] + gy[a] * gy[bb]);
        parts[part].emplace_back(static_cast<int>(ra), static_cast<int>(rb), k);
        unit.emplace_back(static_cast<int>(ra), static_cast<int>(rb), k);
      }
    }
  };

  for (std::size_t a = 0; a <= n; ++a) {
    for (std::size_t b = 0; b <= n; ++b) {
      const Vertex v00{a, b}, v10{a + 1, b}, v11{a + 1, b + 1}, v01{a, b + 1};
      add_element({v00, v10, v11}, 3 * a + 2, 3 * b + 1);
      add_element({v00, v11, v01}, 3 * a + 1, 3 * b + 2);
    }
  }

  const auto dim = static_cast<Eigen::Index>(sys.D);
  sys.G.resize(dim, dim);
  sys.G.setFromTriplets(unit.begin(), unit.end());
  sys.B.reserve(sys.p + 1);
  sys.B.push_back(mu * sys.G);
  for (auto& triplets : parts) {
    FemMatrix bi(dim, dim);
    bi.setFromTriplets(triplets.begin(), triplets.end());
    sys.B.push_back(std::move(bi));
  }
  return sys;
}

FemMatrix operator_at(const AffineSystem& sys, const Vector& y) {
  if (static_cast<std::size_t>(y.size()) != sys.p) {
    throw DimensionMismatch("parameter has length " + std::to_string(y.size()) +
                            ", expected " + std::to_string(sys.p));
  }
  FemMatrix by = sys.B[0];
  for (std::size_t i = 0; i < sys.p; ++i) by += y[static_cast<Eigen::Index>(i)] * sys.B[i + 1];
  return by;
}

Vector solve_high_fidelity(const AffineSystem& sys, const Vector& y) {
  Eigen::SimplicialLLT<FemMatrix> llt(operator_at(sys, y));
  if (llt.info() != Eigen::Success) throw SingularSystem("B_y is not positive definite");
  Vector u = llt.solve(sys.f);
  if (llt.info() != Eigen::Success || !u.allFinite()) throw SingularSystem("high-fidelity solve failed");
  return u;
}

std::vector<Vector> sample_parameters(std::size_t p, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vector y(static_cast<Eigen::Index>(p));
    for (auto& v : y) v = unit(rng);
    out.push_back(std::move(y));
  }
  return out;
}

ReducedBasis reduced_basis_from_snapshots(const AffineSystem& sys,
                                          const std::vector<Vector>& snapshots,
                                          double drop_tol) {
  if (snapshots.empty()) throw EmptySnapshotSet();
  if (!(drop_tol >= 0.0)) throw InvalidArgument("drop_tol must be non-negative");
  auto g_norm = [&](const Vector& v) { return std::sqrt(std::max(0.0, v.dot(sys.G * v))); };

  double largest = 0.0;
  for (const Vector& u : snapshots) largest = std::max(largest, g_norm(u));
  const double threshold = drop_tol * largest;

  std::vector<Vector> q, gq;
  for (const Vector& u : snapshots) {
    Vector v = u;
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (std::size_t k = 0; k < q.size(); ++k) v -= gq[k].dot(v) * q[k];
    }
    const double norm = g_norm(v);
    if (!(norm > threshold) || norm == 0.0) continue;
    v /= norm;
    gq.push_back(sys.G * v);
    q.push_back(std::move(v));
  }
  if (q.empty()) throw EmptySnapshotSet();

  ReducedBasis rb;
  rb.d = q.size();
  rb.V.resize(static_cast<Eigen::Index>(sys.D), static_cast<Eigen::Index>(rb.d));
  for (std::size_t k = 0; k < rb.d; ++k) rb.V.col(static_cast<Eigen::Index>(k)) = q[k];
  for (const FemMatrix& bi : sys.B) {
    const Matrix bv = bi * rb.V;
    rb.theta.push_back(rb.V.transpose() * bv);
  }
  rb.f_rb = rb.V.transpose() * sys.f;
  // The coefficient ranges over [mu, mu + 1].
  rb.alpha = sys.mu + 1.0;
  rb.beta = sys.mu;
  rb.lambda = 1.0 / (rb.alpha + rb.beta);
  rb.delta = rb.lambda * rb.beta;
  return rb;
}

ReducedBasis build_reduced_basis(const AffineSystem& sys, const std::vector<Vector>& params,
                                 double drop_tol) {
  if (params.empty()) throw EmptySnapshotSet();
  std::vector<Vector> snapshots;
  snapshots.reserve(params.size());
  for (const Vector& y : params) snapshots.push_back(solve_high_fidelity(sys, y));
  return reduced_basis_from_snapshots(sys, snapshots, drop_tol);
}

Matrix reduced_operator(const ReducedBasis& rb, const Vector& y) {
  check_params(rb, y);
  Matrix b = rb.theta[0];
  for (std::size_t i = 0; i < rb.p(); ++i) b += y[static_cast<Eigen::Index>(i)] * rb.theta[i + 1];
  return b;
}

Vector reduced_solve(const ReducedBasis& rb, const Vector& y) {
  Eigen::LLT<Matrix> llt(reduced_operator(rb, y));
  if (llt.info() != Eigen::Success) throw SingularSystem("reduced operator is not positive definite");
  return llt.solve(rb.f_rb);
}

GramNorm::GramNorm(const FemMatrix& g) : llt_(g) {
  if (llt_.info() != Eigen::Success) throw SingularSystem("G is not positive definite");
}

double GramNorm::operator()(const Vector& v) const {
  const Vector pv = llt_.permutationP() * v;
  return (llt_.matrixU() * pv).norm();
}

double projection_error(const ReducedBasis& rb, const FemMatrix& g, const GramNorm& norm,
                        const Vector& u) {
  const Vector gu = g * u;
  const Vector coeffs = rb.V.transpose() * gu;
  return norm(u - rb.V * coeffs);
}

Network b_network(const ReducedBasis& rb) {
  const std::size_t p = rb.p();
  const auto d2 = static_cast<Eigen::Index>(rb.d * rb.d);
  const auto hidden = static_cast<Eigen::Index>(4 * p);

  // Layer 1 lifts every y_i through the identity gadget.
  std::vector<Triplet> first;
  Vector gamma(hidden);
  for (std::size_t i = 0; i < p; ++i) {
    for (int a = 0; a < 4; ++a) {
      first.emplace_back(static_cast<int>(4 * i + a), static_cast<int>(i), kOmega[a]);
      gamma[static_cast<Eigen::Index>(4 * i + a)] = kGamma[a];
    }
  }
  SparseMatrix w1(hidden, static_cast<Eigen::Index>(p));
  w1.setFromTriplets(first.begin(), first.end());

  // Layer 2 closes the gadget and applies y -> vec(lambda theta_i) y_i.
  std::vector<Triplet> second;
  second.reserve(static_cast<std::size_t>(d2) * 4 * p);
  for (std::size_t i = 0; i < p; ++i) {
    const Vector t = vec(rb.theta[i + 1]);
    for (Eigen::Index e = 0; e < d2; ++e) {
      const double w = rb.lambda * t[e];
      if (w == 0.0) continue;
      for (int a = 0; a < 4; ++a) {
        second.emplace_back(static_cast<int>(e), static_cast<int>(4 * i + a), w * kBeta[a]);
      }
    }
  }
  SparseMatrix w2(d2, hidden);
  w2.setFromTriplets(second.begin(), second.end());
  Vector b2 = rb.lambda * vec(rb.theta[0]);

  std::vector<Layer> layers;
  layers.emplace_back(std::move(w1), std::move(gamma));
  layers.emplace_back(std::move(w2), std::move(b2));
  return Network(std::move(layers));
}

Network f_network(const ReducedBasis& rb) {
  SparseMatrix zero(static_cast<Eigen::Index>(rb.d), static_cast<Eigen::Index>(rb.p()));
  return affine_network(std::move(zero), rb.f_rb);
}

Network b_identity_network(const ReducedBasis& rb) {
  const Network phi_b = b_network(rb);
  const Layer& last = phi_b.layer(phi_b.depth() - 1);
  const auto d = static_cast<Eigen::Index>(rb.d);
  SparseMatrix negated = -last.weights();
  Vector shifted = -last.bias() + vec(Matrix::Identity(d, d));
  std::vector<LayerPtr> layers;
  for (std::size_t k = 0; k + 1 < phi_b.depth(); ++k) layers.push_back(phi_b.shared_layer(k));
  layers.push_back(std::make_shared<const Layer>(std::move(negated), std::move(shifted)));
  return Network(std::move(layers));
}

double inv_b_inner_epsilon(const ReducedBasis& rb, double epsilon) {
  return std::min(epsilon / (2.0 * rb.lambda), 0.5);
}

Network inv_b_network(const ReducedBasis& rb, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  const Network inner = inversion_network(rb.d, inv_b_inner_epsilon(rb, epsilon), rb.delta / 2.0);
  const auto d2 = static_cast<Eigen::Index>(rb.d * rb.d);
  SparseMatrix scale(d2, d2);
  scale.setIdentity();
  scale *= rb.lambda;
  return concat(affine_network(std::move(scale), Vector::Zero(d2)),
                sparse_concat(inner, b_identity_network(rb)));
}

double load_bound(const ReducedBasis& rb) { return 1.01 * rb.f_rb.norm(); }

SolutionNetworks solution_network(const ReducedBasis& rb, double epsilon, double c_f) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  if (!(c_f >= rb.f_rb.norm())) throw InvalidArgument("C_f is below |f_rb|");
  const double eps_inv = epsilon / (epsilon * rb.beta + 2.0 * c_f);
  const Network pair = parallelize({inv_b_network(rb, eps_inv), f_network(rb)});
  Network u_rb = concat(sparse_concat(mult_network(rb.d, rb.d, 1), pair), fan_out(rb.p(), 2));
  SparseMatrix lift = rb.V.sparseView(0.0, 0.0);
  Network u_h = sparse_concat(affine_network(std::move(lift), Vector::Zero(rb.V.rows())), u_rb);
  return {std::move(u_rb), std::move(u_h), eps_inv};
}

ErrorReport evaluate_error(const ReducedBasis& rb, const Network& net,
                           const std::vector<Vector>& test_params, const FemMatrix& g,
                           ErrorMode mode) {
  if (net.input_dim() != rb.p()) {
    throw DimensionMismatch("network input " + std::to_string(net.input_dim()) +
                            " does not match p = " + std::to_string(rb.p()));
  }
  const std::size_t want_out =
      mode == ErrorMode::EuclideanRb ? rb.d : static_cast<std::size_t>(rb.V.rows());
  if (net.output_dim() != want_out) {
    throw DimensionMismatch("network output " + std::to_string(net.output_dim()) +
                            ", expected " + std::to_string(want_out));
  }
  std::optional<GramNorm> norm;
  if (mode != ErrorMode::EuclideanRb) norm.emplace(g);

  ErrorReport report;
  report.errors.reserve(test_params.size());
  for (const Vector& y : test_params) {
    const Vector u = reduced_solve(rb, y);
    const Vector got = realize(net, y);
    double err = 0.0;
    if (mode == ErrorMode::EuclideanRb) {
      err = (got - u).norm();
    } else {
      const Vector uh = rb.V * u;
      err = (*norm)(got - uh);
      if (mode == ErrorMode::RelativeG) err /= (*norm)(uh);
    }
    report.errors.push_back(err);
    report.worst_case = std::max(report.worst_case, err);
  }
  return report;
}

void write_error_csv(std::ostream& os, const std::vector<Vector>& params,
                     const ErrorReport& euclid, const ErrorReport& g_norm,
                     const ErrorReport& relative) {
  if (euclid.errors.size() != params.size() || g_norm.errors.size() != params.size() ||
      relative.errors.size() != params.size()) {
    throw DimensionMismatch("error reports do not cover every parameter");
  }
  const std::size_t p = params.empty() ? 0 : static_cast<std::size_t>(params.front().size());
  for (std::size_t i = 1; i <= p; ++i) os << "y_" << i << ',';
  os << "err_euclid_rb,err_g_h,err_rel_g\n";
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (const double v : params[k]) os << format_double(v) << ',';
    os << format_double(euclid.errors[k]) << ',' << format_double(g_norm.errors[k]) << ','
       << format_double(relative.errors[k]) << '\n';
  }
  os << "MAX";
  for (std::size_t i = 1; i < p; ++i) os << ',';
  os << ',' << format_double(euclid.worst_case) << ',' << format_double(g_norm.worst_case) << ','
     << format_double(relative.worst_case) << '\n';
}

}  // namespace requ
