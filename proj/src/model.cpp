#include "rplace/model.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "rplace/errors.hpp"

namespace rplace {

HeatModel heat1d(int n, double diffusivity, double domain_length) {
  if (n < 1) throw ConfigError("model.n", "must be a positive integer");
  if (!(diffusivity > 0.0) || !std::isfinite(diffusivity)) {
    throw ConfigError("model.diffusivity", "must be positive");
  }
  if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
    throw ConfigError("model.domain_length", "must be positive");
  }
  HeatModel m;
  m.h = domain_length / (n + 1);
  const double c = diffusivity / (m.h * m.h);
  m.A = Matrix::Zero(n, n);
  m.grid.resize(n);
  for (int i = 0; i < n; ++i) {
    m.A(i, i) = -2.0 * c;
    if (i + 1 < n) m.A(i, i + 1) = m.A(i + 1, i) = c;
    m.grid(i) = -0.5 * domain_length + (i + 1) * m.h;
  }
  return m;
}

Matrix weight_preset(const std::string& spec, int n, const std::string& field) {
  if (spec == "identity") return Matrix::Identity(n, n);
  if (spec == "zero") return Matrix::Zero(n, n);
  if (spec.rfind("rank1:", 0) == 0) {
    const std::string idx = spec.substr(6);
    std::size_t used = 0;
    long node = -1;
    try {
      node = std::stol(idx, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != idx.size() || idx.empty() || node < 0 || node >= n) {
      throw ConfigError(field, "rank1 node must be an integer in [0, " + std::to_string(n - 1) + "]");
    }
    Matrix W = Matrix::Zero(n, n);
    W(node, node) = 1.0;
    return W;
  }
  Matrix M;
  try {
    M = read_matrix_file(spec);
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
  if (M.rows() != n || M.cols() != n) {
    throw ConfigError(field, "matrix file " + spec + " is not " + std::to_string(n) + "x" +
                                 std::to_string(n));
  }
  if (!is_psd(M)) throw ConfigError(field, "matrix must be symmetric positive semi-definite");
  return M;
}

Matrix parse_matrix(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string first;
  if (!std::getline(in, first)) throw InvalidArgument(origin + ": empty matrix file");
  std::istringstream dims(first);
  long rows = -1, cols = -1;
  dims >> rows;
  if (!(dims >> cols)) cols = rows;
  if (rows < 1 || cols < 1) throw InvalidArgument(origin + ": bad dimension line '" + first + "'");
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw InvalidArgument(origin + ": bad entry '" + tok + "'");
    vals.push_back(v);
  }
  if (static_cast<long>(vals.size()) != rows * cols) {
    throw InvalidArgument(origin + ": expected " + std::to_string(rows * cols) + " entries, found " +
                          std::to_string(vals.size()));
  }
  Matrix M(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) M(i, j) = vals[i * cols + j];
  require_finite(M, origin);
  return M;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open matrix file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_matrix(ss.str(), path);
}

std::string format_matrix(const Matrix& M) {
  std::string out;
  char buf[40];
  if (M.rows() == M.cols()) {
    out += std::to_string(M.rows()) + "\n";
  } else {
    out += std::to_string(M.rows()) + " " + std::to_string(M.cols()) + "\n";
  }
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", M(i, j));
      if (j) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_matrix_file(const std::string& path, const Matrix& M) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write matrix file " + path);
  f << format_matrix(M);
}

}  // namespace rplace
