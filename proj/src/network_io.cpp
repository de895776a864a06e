#include "requ/network_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "requ/errors.hpp"
#include "requ/pde.hpp"

namespace requ {

namespace {

using nlohmann::json;

void write_dense(std::ostream& os, const SparseMatrix& a) {
  os << '[';
  bool first = true;
  for (int r = 0; r < a.rows(); ++r) {
    int next_col = 0;
    auto emit = [&](double v) {
      if (!first) os << ',';
      first = false;
      os << format_double(v);
    };
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      for (; next_col < it.col(); ++next_col) emit(0.0);
      emit(it.value());
      next_col = it.col() + 1;
    }
    for (; next_col < a.cols(); ++next_col) emit(0.0);
  }
  os << ']';
}

template <typename Vec>
void write_vector(std::ostream& os, const Vec& v) {
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << format_double(v[i]);
  }
  os << ']';
}

void write_matrix_object(std::ostream& os, const Matrix& m) {
  os << "{\"rows\":" << m.rows() << ",\"cols\":" << m.cols() << ",\"data\":[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (r || c) os << ',';
      os << format_double(m(r, c));
    }
  }
  os << "]}";
}

void write_basis(std::ostream& os, const ReducedBasis& rb) {
  os << "{\"V\":";
  write_matrix_object(os, rb.V);
  os << ",\"theta\":[";
  for (std::size_t i = 0; i < rb.theta.size(); ++i) {
    if (i) os << ',';
    write_matrix_object(os, rb.theta[i]);
  }
  os << "],\"f_rb\":";
  write_vector(os, rb.f_rb);
  os << ",\"alpha\":" << format_double(rb.alpha)
     << ",\"beta\":" << format_double(rb.beta) << '}';
}

std::size_t as_size(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() <= 0) {
    throw InvalidArgument(std::string("network file: missing or invalid \"") + key + "\"");
  }
  return j.at(key).get<std::size_t>();
}

Matrix read_matrix_object(const json& j) {
  const auto rows = static_cast<Eigen::Index>(as_size(j, "rows"));
  const auto cols = static_cast<Eigen::Index>(as_size(j, "cols"));
  const auto& data = j.at("data");
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw DimensionMismatch("matrix data length does not match rows*cols");
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)].get<double>();
  return m;
}

Vector read_vector(const json& j) {
  if (!j.is_array()) throw InvalidArgument("expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

Network network_from(const json& doc) {
  const std::size_t input_dim = as_size(doc, "input_dim");
  if (!doc.contains("layers") || !doc.at("layers").is_array()) {
    throw InvalidArgument("network file: missing \"layers\" array");
  }
  std::vector<Layer> layers;
  for (const auto& lj : doc.at("layers")) {
    const std::size_t rows = as_size(lj, "rows");
    const std::size_t cols = as_size(lj, "cols");
    const auto& a = lj.at("A");
    if (!a.is_array() || a.size() != rows * cols) {
      throw DimensionMismatch("layer \"A\" length does not match rows*cols");
    }
    std::vector<Triplet> triplets;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double v = a[i].get<double>();
      if (v != 0.0) {
        triplets.emplace_back(static_cast<int>(i / cols), static_cast<int>(i % cols), v);
      }
    }
    SparseMatrix w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    w.setFromTriplets(triplets.begin(), triplets.end());
    layers.emplace_back(std::move(w), read_vector(lj.at("b")));
  }
  Network net(std::move(layers));
  if (net.input_dim() != input_dim) {
    throw DimensionMismatch("input_dim disagrees with the first layer");
  }
  return net;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw InvalidArgument("cannot format double");
  return std::string(buf.data(), end);
}

void write_network_json(std::ostream& os, const Network& net, const ReducedBasis* basis) {
  os << "{\"input_dim\":" << net.input_dim() << ",\"layers\":[";
  for (std::size_t k = 0; k < net.depth(); ++k) {
    const Layer& layer = net.layer(k);
    if (k) os << ',';
    os << "{\"rows\":" << layer.rows() << ",\"cols\":" << layer.cols() << ",\"A\":";
    write_dense(os, layer.weights());
    os << ",\"b\":";
    write_vector(os, layer.bias());
    os << '}';
  }
  os << ']';
  if (basis != nullptr) {
    os << ",\"reduced_basis\":";
    write_basis(os, *basis);
  }
  os << "}\n";
}

std::string network_to_json(const Network& net) {
  std::ostringstream os;
  write_network_json(os, net);
  return os.str();
}

Network network_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed network JSON: ") + e.what());
  }
  return network_from(doc);
}

void save_network(const std::filesystem::path& path, const Network& net,
                  const ReducedBasis* basis) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_network_json(out, net, basis);
  if (!out) throw IoError("write to " + path.string() + " failed");
}

Network load_network(const std::filesystem::path& path) {
  return network_from(parse_file(path));
}

std::optional<ReducedBasis> load_reduced_basis(const std::filesystem::path& path) {
  const json doc = parse_file(path);
  if (!doc.contains("reduced_basis")) return std::nullopt;
  const auto& j = doc.at("reduced_basis");
  ReducedBasis rb;
  rb.V = read_matrix_object(j.at("V"));
  rb.d = static_cast<std::size_t>(rb.V.cols());
  for (const auto& t : j.at("theta")) rb.theta.push_back(read_matrix_object(t));
  rb.f_rb = read_vector(j.at("f_rb"));
  rb.alpha = j.at("alpha").get<double>();
  rb.beta = j.at("beta").get<double>();
  rb.lambda = 1.0 / (rb.alpha + rb.beta);
  rb.delta = rb.lambda * rb.beta;
  return rb;
}

}  // namespace requ
