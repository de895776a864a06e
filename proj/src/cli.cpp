#include "requ/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "requ/calculus.hpp"
#include "requ/errors.hpp"
#include "requ/matrix_nets.hpp"
#include "requ/network_io.hpp"
#include "requ/pde.hpp"
#include "requ/random.hpp"

namespace requ::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
};

Check at_most(std::string name, double measured, double bound) {
  return {std::move(name), measured <= bound, measured, bound};
}

double rel_error(const Vector& got, const Vector& want) {
  const double diff = (got - want).norm();
  const double scale = want.norm();
  return scale > 0.0 ? diff / scale : diff;
}

double rel_error(const Matrix& got, const Matrix& want) {
  const double diff = (got - want).norm();
  const double scale = want.norm();
  return scale > 0.0 ? diff / scale : diff;
}

Vector compose(const Network& outer, const Network& inner, const Vector& x) {
  return realize(outer, realize(inner, x));
}

// ---------------------------------------------------------------- suites

std::vector<Check> calculus_suite(Rng& rng, bool quick) {
  const std::size_t trials = quick ? 20 : 200;
  std::vector<Check> checks;

  double id_err = 0.0, id_nnz_off = 0.0;
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::size_t depth = 1; depth <= 6; ++depth) {
      const Network id = identity_network(n, depth);
      const double want_nnz = depth == 1 ? double(n) : double(20 * n * depth - 28 * n);
      id_nnz_off = std::max(id_nnz_off, std::abs(double(complexity(id).total_nnz) - want_nnz));
      for (std::size_t t = 0; t < (quick ? 3u : 10u); ++t) {
        const Vector x = random_vector(rng, n, -100.0, 100.0);
        id_err = std::max(id_err, rel_error(realize(id, x), x));
      }
    }
  }
  checks.push_back(at_most("identity_exact", id_err, 1e-10));
  checks.push_back(at_most("identity_nnz_formula", id_nnz_off, 0.0));

  double cat_err = 0.0, cat_depth = 0.0, sc_err = 0.0, sc_depth = 0.0, sc_nnz = 0.0;
  double ext_err = 0.0, ext_depth = 0.0, par_err = 0.0, par_depth = 0.0, par_nnz = 0.0;
  double fan_err = 0.0, sel_growth = -1e300;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto w2 = random_widths(rng, random_index(rng, 1, 4), 6);
    auto w1 = random_widths(rng, random_index(rng, 1, 4), 6);
    w1.front() = w2.back();
    const Network inner = random_network(rng, w2);
    const Network outer = random_network(rng, w1);
    const Vector x = random_vector(rng, w2.front());
    const Vector want = compose(outer, inner, x);

    const Network cat = concat(outer, inner);
    cat_depth = std::max(cat_depth, std::abs(double(cat.depth()) -
                                              double(outer.depth() + inner.depth() - 1)));
    cat_err = std::max(cat_err, rel_error(realize(cat, x), want));

    const Network sc = sparse_concat(outer, inner);
    sc_depth = std::max(sc_depth, std::abs(double(sc.depth()) -
                                            double(outer.depth() + inner.depth())));
    sc_err = std::max(sc_err, rel_error(realize(sc, x), want));
    const auto co = complexity(outer), ci = complexity(inner);
    const double sc_bound = double(co.total_nnz + ci.total_nnz + 4 * co.layer_nnz.front() +
                                   4 * ci.layer_nnz.back() + 4 * inner.output_dim());
    sc_nnz = std::max(sc_nnz, double(complexity(sc).total_nnz) / sc_bound);

    const std::size_t target = inner.depth() + random_index(rng, 0, 4);
    const Network ext = extend(inner, target);
    ext_depth = std::max(ext_depth, std::abs(double(ext.depth()) - double(target)));
    ext_err = std::max(ext_err, rel_error(realize(ext, x), realize(inner, x)));

    const std::size_t lanes = random_index(rng, 1, 4);
    std::vector<Network> nets;
    std::vector<Vector> inputs;
    std::size_t max_depth = 0, in_dim = 0;
    for (std::size_t k = 0; k < lanes; ++k) {
      nets.push_back(random_network(rng, random_widths(rng, random_index(rng, 1, 4), 5)));
      inputs.push_back(random_vector(rng, nets.back().input_dim()));
      max_depth = std::max(max_depth, nets.back().depth());
      in_dim += nets.back().input_dim();
    }
    const Network par = parallelize(nets);
    par_depth = std::max(par_depth, std::abs(double(par.depth()) - double(max_depth)));
    Vector stacked(static_cast<Eigen::Index>(in_dim));
    Vector expected(static_cast<Eigen::Index>(par.output_dim()));
    Eigen::Index off_in = 0, off_out = 0;
    for (std::size_t k = 0; k < lanes; ++k) {
      stacked.segment(off_in, inputs[k].size()) = inputs[k];
      const Vector y = realize(nets[k], inputs[k]);
      expected.segment(off_out, y.size()) = y;
      off_in += inputs[k].size();
      off_out += y.size();
    }
    par_err = std::max(par_err, rel_error(realize(par, stacked), expected));
    // Same-depth lanes combine with exactly additive weight counts.
    std::vector<Network> same;
    std::size_t additive = 0;
    const std::size_t depth = random_index(rng, 1, 4);
    for (std::size_t k = 0; k < lanes; ++k) {
      same.push_back(random_network(rng, random_widths(rng, depth, 5)));
      additive += complexity(same.back()).total_nnz;
    }
    par_nnz = std::max(par_nnz, std::abs(double(complexity(parallelize(same)).total_nnz) -
                                         double(additive)));

    // Selection matrix: at most one nonzero per row.
    const std::size_t m = random_index(rng, 1, 6);
    Matrix sel = Matrix::Zero(static_cast<Eigen::Index>(inner.input_dim()),
                              static_cast<Eigen::Index>(m));
    for (Eigen::Index r = 0; r < sel.rows(); ++r) {
      if (random_index(rng, 0, 3) == 0) continue;
      sel(r, static_cast<Eigen::Index>(random_index(rng, 0, m - 1))) = random_vector(rng, 1)(0);
    }
    const auto cs = complexity(concat(inner, affine_network(sel, Vector::Zero(sel.rows()))));
    for (std::size_t k = 0; k < ci.layer_nnz.size(); ++k) {
      sel_growth = std::max(sel_growth, double(cs.layer_nnz[k]) - double(ci.layer_nnz[k]));
    }

    const std::size_t copies = random_index(rng, 1, 4);
    const Vector fx = realize(fan_out(x.size(), copies), x);
    fan_err = std::max(fan_err, rel_error(fx, x.replicate(static_cast<Eigen::Index>(copies), 1)));
  }
  checks.push_back(at_most("concat_depth", cat_depth, 0.0));
  checks.push_back(at_most("concat_realization", cat_err, 1e-10));
  checks.push_back(at_most("sparse_concat_depth", sc_depth, 0.0));
  checks.push_back(at_most("sparse_concat_realization", sc_err, 1e-10));
  checks.push_back(at_most("sparse_concat_nnz_ratio", sc_nnz, 1.0));
  checks.push_back(at_most("extend_depth", ext_depth, 0.0));
  checks.push_back(at_most("extend_realization", ext_err, 1e-10));
  checks.push_back(at_most("parallelize_depth", par_depth, 0.0));
  checks.push_back(at_most("parallelize_realization", par_err, 1e-10));
  checks.push_back(at_most("parallelize_nnz_additive", par_nnz, 0.0));
  checks.push_back(at_most("fan_out_realization", fan_err, 0.0));
  checks.push_back(at_most("selection_layer_nnz_growth", sel_growth, 0.0));
  return checks;
}

std::vector<Check> matrix_suite(Rng& rng, bool quick) {
  const std::size_t trials = quick ? 20 : 200;
  std::vector<Check> checks;

  double roundtrip = 0.0;
  for (std::size_t t = 0; t < 10; ++t) {
    const std::size_t r = random_index(rng, 1, 6), c = random_index(rng, 1, 6);
    const Matrix a = random_matrix(rng, r, c);
    roundtrip = std::max(roundtrip, (matr(vec(a), r, c) - a).cwiseAbs().maxCoeff());
  }
  checks.push_back(at_most("vec_matr_roundtrip", roundtrip, 0.0));

  const Network prod = scalar_product_network();
  double prod_err = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Vector xy = random_vector(rng, 2, -10.0, 10.0);
    const double want = xy[0] * xy[1];
    prod_err = std::max(prod_err, std::abs(realize(prod, xy)[0] - want) / std::abs(want));
  }
  checks.push_back(at_most("scalar_product_exact", prod_err, 1e-10));

  double mult_err = 0.0, mult_depth = 0.0, mult_nnz = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t d = random_index(rng, 1, 8), n = random_index(rng, 1, 8),
                      l = random_index(rng, 1, 8);
    const Network net = mult_network(d, n, l);
    const Matrix a = random_matrix(rng, d, n), b = random_matrix(rng, n, l);
    Vector in(static_cast<Eigen::Index>(n * (d + l)));
    in << vec(a), vec(b);
    mult_err = std::max(mult_err, rel_error(matr(realize(net, in), d, l), Matrix(a * b)));
    mult_depth = std::max(mult_depth, std::abs(double(net.depth()) - 2.0));
    const auto c = complexity(net);
    const double dnl = double(d * n * l);
    mult_nnz = std::max({mult_nnz, double(c.total_nnz) / (12 * dnl),
                         double(c.layer_nnz.front()) / (8 * dnl),
                         double(c.layer_nnz.back()) / (4 * dnl)});
  }
  checks.push_back(at_most("mult_exact", mult_err, 1e-10));
  checks.push_back(at_most("mult_depth", mult_depth, 0.0));
  checks.push_back(at_most("mult_nnz_ratio", mult_nnz, 1.0));

  double sq_err = 0.0, pow_err = 0.0, pow_depth = 0.0, pow_nnz = 0.0;
  for (std::size_t d = 1; d <= 6; ++d) {
    const Network sq = square_network(d);
    const Matrix a = random_matrix(rng, d, d);
    sq_err = std::max(sq_err, rel_error(matr(realize(sq, vec(a)), d, d), Matrix(a * a)));
    for (std::size_t j = 1; j <= (quick ? 3u : 5u); ++j) {
      const Network pw = power_network(d, j);
      pow_depth = std::max(pow_depth, std::abs(double(pw.depth()) - double(2 * j)));
      const auto c = complexity(pw);
      const double d3 = double(d * d * d);
      pow_nnz = std::max({pow_nnz, double(c.total_nnz) / (64 * double(j) * d3),
                          double(c.layer_nnz.front()) / (8 * d3),
                          double(c.layer_nnz.back()) / (4 * d3)});
      const Matrix m = random_matrix(rng, d, d, -0.3, 0.3);
      Matrix want = m;
      for (std::size_t i = 0; i < j; ++i) want = want * want;
      pow_err = std::max(pow_err, rel_error(matr(realize(pw, vec(m)), d, d), want));
    }
  }
  checks.push_back(at_most("square_exact", sq_err, 1e-10));
  checks.push_back(at_most("power_exact", pow_err, 1e-8));
  checks.push_back(at_most("power_depth", pow_depth, 0.0));
  checks.push_back(at_most("power_nnz_ratio", pow_nnz, 1.0));

  double sn_err = 0.0;
  for (std::size_t t = 0; t < (quick ? 3u : 10u); ++t) {
    const Matrix a = random_matrix(rng, 10, 10);
    const double want = Eigen::JacobiSVD<Matrix>(a).singularValues()[0];
    sn_err = std::max(sn_err, std::abs(spectral_norm(a) - want) / want);
  }
  checks.push_back(at_most("spectral_norm_vs_svd", sn_err, 1e-8));
  return checks;
}

double l1_nnz_bound(std::size_t d) {
  const double dd = double(d);
  return 53 * dd * dd + 5 * dd;
}

double nnz_bound(std::size_t d, std::size_t l) {
  return l == 1 ? l1_nnz_bound(d) : inversion_nnz_bound(d, l);
}

double inversion_error(const Network& net, const Matrix& a) {
  const auto d = static_cast<std::size_t>(a.rows());
  const Matrix exact = (Matrix::Identity(a.rows(), a.cols()) - a).inverse();
  return spectral_norm(exact - matr(realize(net, vec(a)), d, d));
}

std::vector<Check> inversion_suite(Rng& rng, bool quick, std::size_t d, double eps, double delta) {
  std::vector<Check> checks;
  double tail = 0.0;
  for (int i = 0; i < 20; ++i) {
    for (int k = 0; k < 20; ++k) {
      const double e = std::pow(10.0, -1.0 - 5.0 * i / 19.0);
      const double dl = 0.01 + 0.97 * k / 19.0;
      tail = std::max(tail, neumann_tail(dl, neumann_length(e, dl).l) / e);
    }
  }
  checks.push_back(at_most("neumann_tail_ratio", tail, 1.0));

  const NeumannPlan plan = neumann_length(eps, delta);
  const Network net = inversion_network(d, eps, delta);
  checks.push_back(at_most("inversion_depth", std::abs(double(net.depth()) - double(2 * plan.l + 1)), 0.0));
  checks.push_back(at_most("inversion_nnz", double(complexity(net).total_nnz), nnz_bound(d, plan.l)));

  const std::size_t samples = quick ? 5 : 20;
  double err = 0.0, partial = 0.0, factored = 0.0;
  for (std::size_t t = 0; t < samples; ++t) {
    const Matrix a = random_contraction(rng, d, delta);
    err = std::max(err, inversion_error(net, a));
    const Matrix oracle = neumann_partial_sum_oracle(a, plan.l);
    partial = std::max(partial, rel_error(matr(realize(net, vec(a)), d, d), oracle));
    factored = std::max(factored, rel_error(neumann_product_form(a, plan.l), oracle));
  }
  checks.push_back(at_most("inversion_spectral_error", err, eps));
  checks.push_back(at_most("network_vs_partial_sum", partial, 1e-8));
  checks.push_back(at_most("product_form_vs_partial_sum", factored, 1e-10));

  // Shrinking epsilon must not increase the error on a fixed matrix.
  const Matrix a = random_contraction(rng, d, delta);
  double increase = 0.0, previous = inversion_error(inversion_network_for_length(d, 1), a);
  const std::size_t max_l = std::min<std::size_t>(plan.l + 1, quick ? 4 : 6);
  for (std::size_t l = 2; l <= max_l; ++l) {
    const double e = inversion_error(inversion_network_for_length(d, l), a);
    increase = std::max(increase, e - previous);
    previous = e;
  }
  checks.push_back(at_most("error_monotone_in_l", increase, 1e-12));
  return checks;
}

// ---------------------------------------------------------------- output

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

void emit_json(const ordered_json& doc, const std::string& path, std::ostream& fallback) {
  if (path.empty()) {
    fallback << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out = open_output(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed JSON in " + path + ": " + e.what());
  }
  if (!doc.is_array() || doc.empty() || !doc.front().is_array()) {
    throw InvalidArgument("matrix file must hold a nested array of rows");
  }
  const std::size_t rows = doc.size(), cols = doc.front().size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!doc[r].is_array() || doc[r].size() != cols) throw DimensionMismatch("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = doc[r][c].get<double>();
    }
  }
  return m;
}

// ---------------------------------------------------------------- commands

struct VerifyOptions {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t dim = 8;
  double eps = 1e-3;
  double delta = 0.2;
  bool quick = false;
  std::string out;
};

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  Rng rng(o.seed);
  std::vector<Check> checks;
  auto append = [&](const std::string& prefix, std::vector<Check> more) {
    for (Check& c : more) {
      if (o.suite == "all") c.name = prefix + "." + c.name;
      checks.push_back(std::move(c));
    }
  };
  if (o.suite == "calculus" || o.suite == "all") append("calculus", calculus_suite(rng, o.quick));
  if (o.suite == "matrix" || o.suite == "all") append("matrix", matrix_suite(rng, o.quick));
  if (o.suite == "inversion" || o.suite == "all") {
    append("inversion", inversion_suite(rng, o.quick, o.dim, o.eps, o.delta));
  }

  ordered_json doc;
  doc["suite"] = o.suite;
  doc["seed"] = o.seed;
  doc["checks"] = ordered_json::array();
  bool all_pass = true;
  for (const Check& c : checks) {
    all_pass = all_pass && c.pass;
    doc["checks"].push_back(ordered_json{{"name", c.name},
                                         {"pass", c.pass},
                                         {"measured", number(c.measured)},
                                         {"bound", number(c.bound)}});
  }
  doc["pass"] = all_pass;
  emit_json(doc, o.out, out);
  return all_pass ? kOk : kFailure;
}

struct InvertOptions {
  std::size_t dim = 0;
  double eps = 0.0;
  double delta = 0.0;
  std::string matrix;
  std::string save;
  std::string out;
  std::uint64_t seed = 0;
};

int cmd_invert(const InvertOptions& o, std::ostream& out) {
  const NeumannPlan plan = neumann_length(o.eps, o.delta);
  if (o.dim == 0) throw InvalidArgument("--dim must be at least 1");
  const Network net = inversion_network_for_length(o.dim, plan.l);
  const auto c = complexity(net);
  const double bound = nnz_bound(o.dim, plan.l);

  Matrix a;
  bool guaranteed = true;
  if (o.matrix.empty()) {
    Rng rng(o.seed);
    a = random_contraction(rng, o.dim, o.delta);
  } else {
    a = read_matrix_file(o.matrix);
    if (static_cast<std::size_t>(a.rows()) != o.dim || static_cast<std::size_t>(a.cols()) != o.dim) {
      throw DimensionMismatch("matrix file does not hold a " + std::to_string(o.dim) + "x" +
                              std::to_string(o.dim) + " matrix");
    }
    guaranteed = spectral_norm(a) <= 1.0 - o.delta;
  }
  const double error = inversion_error(net, a);
  const Matrix result = matr(realize(net, vec(a)), o.dim, o.dim);
  if (!o.save.empty()) save_network(o.save, net);

  ordered_json doc;
  doc["d"] = o.dim;
  doc["eps"] = o.eps;
  doc["delta"] = o.delta;
  doc["l"] = plan.l;
  doc["depth"] = c.depth;
  doc["nnz"] = c.total_nnz;
  doc["nnz_bound"] = bound;
  doc["measured_error"] = number(error);
  doc["norm_within_margin"] = guaranteed;
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < result.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < result.cols(); ++c) row.push_back(number(result(r, c)));
    rows.push_back(std::move(row));
  }
  doc["result"] = std::move(rows);
  emit_json(doc, o.out, out);

  const bool ok = c.depth == 2 * plan.l + 1 && double(c.total_nnz) <= bound &&
                  (!guaranteed || error <= o.eps);
  return ok ? kOk : kFailure;
}

struct ComplexityOptions {
  std::vector<std::size_t> dims;
  std::vector<double> eps;
  double delta = 0.0;
  std::string out;
};

int cmd_complexity(const ComplexityOptions& o, std::ostream& out) {
  if (o.dims.empty() || o.eps.empty()) throw InvalidArgument("--dims and --eps must be non-empty");
  for (std::size_t d : o.dims) {
    if (d == 0) throw InvalidArgument("dimensions must be at least 1");
  }
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> cache;
  std::ofstream file = open_output(o.out);
  file << "d,eps,l,depth,nnz,bound\n";
  bool ok = true;
  for (std::size_t d : o.dims) {
    for (double e : o.eps) {
      const std::size_t l = neumann_length(e, o.delta).l;
      auto it = cache.find({d, l});
      if (it == cache.end()) {
        it = cache.emplace(std::make_pair(d, l),
                           complexity(inversion_network_for_length(d, l)).total_nnz).first;
      }
      const double bound = nnz_bound(d, l);
      ok = ok && double(it->second) <= bound;
      file << d << ',' << format_double(e) << ',' << l << ',' << 2 * l + 1 << ',' << it->second
           << ',' << format_double(bound) << '\n';
    }
  }
  finish(file, o.out);
  out << "wrote " << o.dims.size() * o.eps.size() << " rows to " << o.out << '\n';
  return ok ? kOk : kFailure;
}

struct PdeOptions {
  std::size_t grid = 0;
  std::size_t chessboard = 0;
  double mu = 0.0;
  std::size_t snapshots = 0;
  double drop_tol = 0.0;
  double eps = 0.0;
  std::size_t test = 100;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_pde(const PdeOptions& o, std::ostream& out) {
  if (o.snapshots == 0) throw InvalidArgument("--snapshots must be at least 1");
  if (o.test == 0) throw InvalidArgument("--test must be at least 1");
  if (!(o.eps > 0.0 && o.eps < 1.0)) throw InvalidArgument("--eps must lie in (0, 1)");
  const AffineSystem sys = assemble_affine_system(o.grid, o.chessboard, o.mu);
  const auto snapshot_params = sample_parameters(sys.p, o.snapshots, o.seed);
  const auto test_params = sample_parameters(sys.p, o.test, o.seed + 1);
  const ReducedBasis rb = build_reduced_basis(sys, snapshot_params, o.drop_tol);
  const double c_f = load_bound(rb);
  const SolutionNetworks nets = solution_network(rb, o.eps, c_f);

  ErrorReport euclid = evaluate_error(rb, nets.rb, test_params, sys.G, ErrorMode::EuclideanRb);
  ErrorReport g_norm = evaluate_error(rb, nets.h, test_params, sys.G, ErrorMode::GNormH);
  ErrorReport relative = evaluate_error(rb, nets.h, test_params, sys.G, ErrorMode::RelativeG);
  const GramNorm norm(sys.G);
  double truncation = 0.0;
  for (const Vector& y : test_params) {
    truncation = std::max(truncation, projection_error(rb, sys.G, norm, solve_high_fidelity(sys, y)));
  }
  for (ErrorReport* r : {&euclid, &g_norm, &relative}) {
    r->target_eps = o.eps;
    r->rb_truncation = truncation;
  }

  std::ofstream csv = open_output(o.out);
  write_error_csv(csv, test_params, euclid, g_norm, relative);
  finish(csv, o.out);

  const auto c_rb = complexity(nets.rb);
  const auto c_h = complexity(nets.h);
  const auto c_b = complexity(b_network(rb));
  const double p = double(sys.p), d = double(rb.d);
  ordered_json doc;
  doc["D"] = sys.D;
  doc["d"] = rb.d;
  doc["p"] = sys.p;
  doc["alpha"] = rb.alpha;
  doc["beta"] = rb.beta;
  doc["lambda"] = rb.lambda;
  doc["delta"] = rb.delta;
  doc["eps"] = o.eps;
  doc["eps_inv"] = nets.epsilon_inv;
  doc["C_f"] = c_f;
  doc["l"] = neumann_length(inv_b_inner_epsilon(rb, nets.epsilon_inv), rb.delta / 2).l;
  doc["worst_euclid"] = number(euclid.worst_case);
  doc["worst_g"] = number(g_norm.worst_case);
  doc["worst_rel_g"] = number(relative.worst_case);
  doc["rb_truncation"] = number(truncation);
  doc["depth"] = c_rb.depth;
  doc["nnz"] = c_rb.total_nnz;
  doc["depth_h"] = c_h.depth;
  doc["nnz_h"] = c_h.total_nnz;
  doc["b_network_nnz"] = c_b.total_nnz;
  doc["b_network_nnz_bound"] = 8 * p + (4 * p + 1) * d * d;
  const std::string summary_path = o.out + ".summary.json";
  emit_json(doc, summary_path, out);
  out << "d=" << rb.d << " worst_euclid=" << format_double(euclid.worst_case)
      << " worst_g=" << format_double(g_norm.worst_case) << '\n';

  const double slack = o.eps + 1e-9;
  return euclid.worst_case <= slack && g_norm.worst_case <= slack ? kOk : kFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ReQU network calculus: verification suites, inversion networks, PDE demo"};
  app.require_subcommand(1);

  VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "Run property suites and write a JSON summary");
  v->add_option("--suite", verify.suite, "calculus, matrix, inversion or all")
      ->required()
      ->check(CLI::IsMember({"calculus", "matrix", "inversion", "all"}));
  v->add_option("--seed", verify.seed)->required();
  v->add_option("--dim", verify.dim)->check(CLI::PositiveNumber);
  v->add_option("--eps", verify.eps);
  v->add_option("--delta", verify.delta);
  v->add_flag("--quick", verify.quick, "Shrink suite sizes about tenfold");
  v->add_option("--out", verify.out, "Summary path (stdout when omitted)");

  InvertOptions invert;
  auto* inv = app.add_subcommand("invert", "Build an inversion network and report its accuracy");
  inv->add_option("--dim", invert.dim)->required();
  inv->add_option("--eps", invert.eps)->required();
  inv->add_option("--delta", invert.delta)->required();
  inv->add_option("--matrix", invert.matrix, "JSON nested array; random contraction when omitted");
  inv->add_option("--save", invert.save, "Write the network file here");
  inv->add_option("--out", invert.out)->required();
  inv->add_option("--seed", invert.seed, "Seed for the random matrix");

  ComplexityOptions cx;
  auto* comp = app.add_subcommand("complexity", "Tabulate depth and weight counts of inversion networks");
  comp->add_option("--dims", cx.dims)->required()->delimiter(',');
  comp->add_option("--eps", cx.eps)->required()->delimiter(',');
  comp->add_option("--delta", cx.delta)->required();
  comp->add_option("--out", cx.out)->required();

  PdeOptions pde;
  auto* pd = app.add_subcommand("pde", "Reduced-basis solution networks for the chessboard problem");
  pd->add_option("--grid", pde.grid)->required();
  pd->add_option("--chessboard", pde.chessboard)->required();
  pd->add_option("--mu", pde.mu)->required();
  pd->add_option("--snapshots", pde.snapshots)->required();
  pd->add_option("--drop-tol", pde.drop_tol)->required();
  pd->add_option("--eps", pde.eps)->required();
  pd->add_option("--test", pde.test)->required();
  pd->add_option("--seed", pde.seed)->required();
  pd->add_option("--out", pde.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadArguments;
  }

  try {
    if (v->parsed()) return cmd_verify(verify, out);
    if (inv->parsed()) return cmd_invert(invert, out);
    if (comp->parsed()) return cmd_complexity(cx, out);
    return cmd_pde(pde, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kBadArguments;
  } catch (const DimensionMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kBadArguments;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace requ::cli
