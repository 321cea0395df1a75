#ifndef LAGFLOW_IO_HPP
#define LAGFLOW_IO_HPP

// JSON schemas shared by the library and the command-line tool:
//   matrices        -> arrays of rows (row-major)
//   complex matrices-> {"re": rows, "im": rows}
//   Lagrangian path -> {"type":"lagrangian_path","n":..,"reference":..,"path":..}
//   operator path   -> {"type":"operator_path","d":..,"path":..}
//   model problem   -> {"type":"model_problem", ...} or {"family":"demo",...}
// Paths are either dense (t, sample) lists interpolated in a chart, or named
// parametric families. All emitted floating-point values are rounded to 12
// significant digits so reruns are byte-identical.

#include <lagflow/bvp.hpp>
#include <lagflow/maslov.hpp>
#include <lagflow/specflow.hpp>

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace lagflow {

using Json = nlohmann::json;

/// Rounds through a 12-significant-digit decimal representation; the
/// serialization of the result is reproducible across runs.
inline double round12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(round12(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw std::invalid_argument("matrix: expected an array of rows");
  Matrix m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != j[0].size())
      throw std::invalid_argument("matrix: ragged rows");
    for (std::size_t k = 0; k < j[i].size(); ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

inline Json cmatrix_to_json(const CMatrix& m) {
  return Json{{"re", matrix_to_json(m.real())}, {"im", matrix_to_json(m.imag())}};
}

inline CMatrix cmatrix_from_json(const Json& j) {
  Matrix re = matrix_from_json(j.at("re")), im = matrix_from_json(j.at("im"));
  if (re.rows() != im.rows() || re.cols() != im.cols())
    throw std::invalid_argument("complex matrix: re/im shape mismatch");
  return re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
}

// ---- Lagrangian paths -----------------------------------------------------

struct LagrangianPathSpec {
  SymplecticSpace space;
  Lagrangian reference;
  LagrangianPath path;
};

namespace io_detail {

/// Chart projection: the nearest Lagrangian through the unitary lift of an
/// approximate frame. Exact on Lagrangian frames, smooth nearby.
inline Lagrangian project_to_lagrangian(const Lagrangian& la, const Matrix& frame) {
  CMatrix m = complex_coords(la, frame);
  return lagrangian_from_unitary(la, polar_unitary(Complex(0, -1) * m));
}

inline LagrangianPath sampled_lagrangian_path(const Lagrangian& la, std::vector<double> ts,
                                              std::vector<Matrix> frames) {
  if (ts.size() < 2 || ts.front() != 0.0 || ts.back() != 1.0)
    throw std::invalid_argument("path samples must run from t=0 to t=1");
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (!(ts[i] > ts[i - 1]))
      throw std::invalid_argument("path samples must be strictly increasing in t");
  return [la, ts = std::move(ts), frames = std::move(frames)](double t) {
    std::size_t i = 1;
    while (i + 1 < ts.size() && t > ts[i]) ++i;
    double s = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    Matrix f = (1 - s) * frames[i - 1] + s * frames[i];
    return project_to_lagrangian(la, f);
  };
}

}  // namespace io_detail

inline LagrangianPathSpec parse_lagrangian_path(const Json& j) {
  if (j.value("type", "") != std::string("lagrangian_path"))
    throw std::invalid_argument("expected type \"lagrangian_path\"");
  int n = j.at("n").get<int>();
  if (n < 1) throw std::invalid_argument("n must be positive");
  SymplecticSpace s = standard_space(n);
  Lagrangian ref = lambda_std(s);
  if (j.contains("reference")) {
    Matrix f = matrix_from_json(j.at("reference"));
    ref = make_lagrangian(s, orthonormalize(f));
  }
  const Json& p = j.at("path");
  std::string kind = p.at("kind").get<std::string>();
  LagrangianPathSpec spec{s, ref, nullptr};
  Lagrangian chart = lambda_std(s);
  if (kind == "samples") {
    std::vector<double> ts;
    std::vector<Matrix> frames;
    for (const Json& sample : p.at("samples")) {
      ts.push_back(sample.at("t").get<double>());
      Matrix f = matrix_from_json(sample.at("frame"));
      if (f.rows() != 2 * n || f.cols() != n)
        throw std::invalid_argument("frame samples must be 2n x n");
      frames.push_back(orthonormalize(f));
    }
    spec.path = io_detail::sampled_lagrangian_path(chart, std::move(ts), std::move(frames));
  } else if (kind == "family") {
    std::string name = p.at("name").get<std::string>();
    if (name == "constant") {
      Lagrangian mu = make_lagrangian(s, orthonormalize(matrix_from_json(p.at("frame"))));
      spec.path = [mu](double) { return mu; };
    } else if (name == "rotating_line") {
      if (n != 1) throw std::invalid_argument("rotating_line requires n = 1");
      double a0 = p.at("theta0").get<double>(), a1 = p.at("theta1").get<double>();
      spec.path = [s, chart, a0, a1](double t) {
        double a = a0 + (a1 - a0) * t;
        Matrix f = std::cos(a) * chart.frame + std::sin(a) * (s.J * chart.frame);
        return make_lagrangian(s, f);
      };
    } else if (name == "unitary_exponential") {
      // mu(t) = rho(U0 exp(i t H))
      CMatrix u0 = cmatrix_from_json(p.at("u0"));
      CMatrix h = cmatrix_from_json(p.at("h"));
      if (!is_unitary(u0)) throw std::invalid_argument("u0 must be unitary");
      if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("h must be Hermitian");
      spec.path = [chart, u0, h](double t) {
        return lagrangian_from_unitary(chart,
                                       polar_unitary(u0 * (Complex(0, 1) * t * h).exp()));
      };
    } else {
      throw std::invalid_argument("unknown Lagrangian path family: " + name);
    }
  } else {
    throw std::invalid_argument("path kind must be \"samples\" or \"family\"");
  }
  return spec;
}

// ---- operator paths -------------------------------------------------------

inline OperatorPath parse_operator_path(const Json& j) {
  if (j.value("type", "") != std::string("operator_path"))
    throw std::invalid_argument("expected type \"operator_path\"");
  int d = j.at("d").get<int>();
  if (d < 1) throw std::invalid_argument("d must be positive");
  const Json& p = j.at("path");
  std::string kind = p.at("kind").get<std::string>();
  auto check = [d](const Matrix& m, const char* what) {
    if (m.rows() != d || m.cols() != d)
      throw std::invalid_argument(std::string(what) + ": must be d x d");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument(std::string(what) + ": must be symmetric");
    return m;
  };
  if (kind == "samples") {
    std::vector<double> ts;
    std::vector<Matrix> mats;
    for (const Json& sample : p.at("samples")) {
      ts.push_back(sample.at("t").get<double>());
      mats.push_back(check(matrix_from_json(sample.at("matrix")), "sample matrix"));
    }
    if (ts.size() < 2 || ts.front() != 0.0 || ts.back() != 1.0)
      throw std::invalid_argument("path samples must run from t=0 to t=1");
    for (std::size_t i = 1; i < ts.size(); ++i)
      if (!(ts[i] > ts[i - 1]))
        throw std::invalid_argument("path samples must be strictly increasing in t");
    return OperatorPath{d, [ts, mats](double t) {
                          std::size_t i = 1;
                          while (i + 1 < ts.size() && t > ts[i]) ++i;
                          double s = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
                          return Matrix((1 - s) * mats[i - 1] + s * mats[i]);
                        },
                        nullptr};
  }
  if (kind == "family") {
    std::string name = p.at("name").get<std::string>();
    if (name == "affine") {
      // A(t) = a0 + t a1
      Matrix a0 = check(matrix_from_json(p.at("a0")), "a0");
      Matrix a1 = check(matrix_from_json(p.at("a1")), "a1");
      return OperatorPath{d, [a0, a1](double t) { return Matrix(a0 + t * a1); },
                          [a1](double) { return a1; }};
    }
    throw std::invalid_argument("unknown operator path family: " + name);
  }
  throw std::invalid_argument("path kind must be \"samples\" or \"family\"");
}

// ---- model problems -------------------------------------------------------

inline ModelProblem parse_problem(const Json& j) {
  if (j.value("type", "") != std::string("model_problem"))
    throw std::invalid_argument("expected type \"model_problem\"");
  if (j.contains("family")) {
    std::string name = j.at("family").get<std::string>();
    if (name != "demo") throw std::invalid_argument("unknown problem family: " + name);
    double b = j.value("b", 0.3), amp = j.value("amp", 3.0);
    return make_demo_problem(b, amp);
  }
  int m = j.at("m").get<int>();
  Matrix sigma = matrix_from_json(j.at("sigma"));
  Matrix B = matrix_from_json(j.at("B"));
  double length = j.at("length").get<double>();
  double split = j.at("split").get<double>();
  bool product_form = j.value("product_form", true);
  std::vector<CoefficientPiece> pieces;
  for (const Json& pj : j.at("pieces")) {
    double lo = pj.at("tau_begin").get<double>(), hi = pj.at("tau_end").get<double>();
    // C(t) = c0 + t c1 on the piece
    Matrix c0 = pj.contains("c0") ? matrix_from_json(pj.at("c0")) : Matrix::Zero(m, m);
    Matrix c1 = pj.contains("c1") ? matrix_from_json(pj.at("c1")) : Matrix::Zero(m, m);
    pieces.push_back({lo, hi, [c0, c1](double t) { return Matrix(c0 + t * c1); }});
  }
  return make_problem(m, sigma, B, length, split, std::move(pieces), product_form);
}

// ---- result emission ------------------------------------------------------

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

/// CSV with header "t,lambda_1,...,lambda_k"; rows with fewer values than k
/// are padded with empty fields.
inline void write_trace_csv(const std::string& path,
                            const std::vector<std::pair<double, std::vector<double>>>& rows) {
  std::size_t k = 0;
  for (const auto& r : rows) k = std::max(k, r.second.size());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "t";
  for (std::size_t i = 1; i <= k; ++i) out << ",lambda_" << i;
  out << "\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.12g", round12(r.first));
    out << buf;
    for (std::size_t i = 0; i < k; ++i) {
      out << ",";
      if (i < r.second.size()) {
        std::snprintf(buf, sizeof(buf), "%.12g", round12(r.second[i]));
        out << buf;
      }
    }
    out << "\n";
  }
}

}  // namespace lagflow

#endif
