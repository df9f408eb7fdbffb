#pragma once

#include <string>

#include "rplace/linalg.hpp"

namespace rplace {

/// Dirichlet heat equation on [-L/2, L/2] with n interior nodes.
struct HeatModel {
  Matrix A;     ///< (diffusivity / h^2) tridiag(1, -2, 1)
  Vector grid;  ///< x_i = -L/2 + i h, i = 1..n
  double h = 0.0;
};

HeatModel heat1d(int n, double diffusivity, double domain_length);

/// Builds a weight from a preset: "identity", "zero", "rank1:<node>" (e_node
/// e_node^T, nodes counted from 0) or a matrix file path. `field` names the
/// config entry in error messages.
Matrix weight_preset(const std::string& spec, int n, const std::string& field);

/// Whitespace-separated matrix file: a leading line with the dimension
/// ("n" for square or "rows cols"), then row-major entries.
Matrix read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const Matrix& M);
/// Text in the same format with 17 significant digits.
std::string format_matrix(const Matrix& M);
Matrix parse_matrix(const std::string& text, const std::string& origin);

}  // namespace rplace
