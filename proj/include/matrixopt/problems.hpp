#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matrixopt/linalg.hpp"

namespace matrixopt {

/// AX + XB = C with A m x m, B n x n, C m x n.
struct SylvesterProblem {
  SylvesterProblem(Matrix a, Matrix b, Matrix c);
  Matrix a, b, c;
  std::size_t m() const noexcept { return a.rows(); }
  std::size_t n() const noexcept { return b.rows(); }
};

/// A^T X + X A + Q = 0 with Q symmetric.
struct LyapunovProblem {
  LyapunovProblem(Matrix a, Matrix q);
  Matrix a, q;
  std::size_t n() const noexcept { return a.rows(); }
};

/// A^T X + X A - X N X + K = 0 with N, K symmetric positive semi-definite.
/// Symmetry is always validated; semi-definiteness only when check_psd is set.
struct CareProblem {
  CareProblem(Matrix a, Matrix n_mat, Matrix k_mat, bool check_psd = false);
  Matrix a, n_mat, k_mat;
  std::size_t n() const noexcept { return a.rows(); }
};

enum class EquationKind { sylvester, lyapunov, care };

std::string_view to_string(EquationKind k);
EquationKind parse_equation_kind(std::string_view s);

/// Where a problem comes from: a registered generator or MatrixMarket files.
struct ProblemSource {
  std::string generator;
  std::map<std::string, double> params;
  std::vector<std::filesystem::path> files;
  std::size_t order = 0;

  std::string describe() const;
};

/// Registered generator names: t1 ... t10, ammonia, random.
const std::vector<std::string>& generator_names();
bool is_registered_generator(std::string_view name);

SylvesterProblem make_sylvester(const ProblemSource& src);
LyapunovProblem make_lyapunov(const ProblemSource& src);
CareProblem make_care(const ProblemSource& src);

Matrix gen_tridiagonal(std::size_t n, double diag, double sub, double super);
CareProblem ammonia_reactor();

/// Well-conditioned random instances. Sylvester: A = G/sqrt(m) + 3I,
/// B = H/sqrt(n) + I, C Gaussian. With spd set, A and B are G^T G/m + I.
SylvesterProblem random_sylvester(std::size_t m, std::size_t n, std::uint64_t seed,
                                  bool spd = false);
/// A = G/sqrt(n) - 3I (stable), Q = H^T H/n + I.
LyapunovProblem random_stable_lyapunov(std::size_t n, std::uint64_t seed);
/// A = G/sqrt(n) - 2I, N = B B^T with B n x 2, K = I.
CareProblem random_stable_care(std::size_t n, std::uint64_t seed);

struct SuiteRow {
  std::string algorithm;  // label as printed in the reference table
  std::string method;     // registered solver name
  ProblemSource source;
  std::map<std::string, std::string> settings;
  std::optional<long> reference_iterations;
  std::optional<double> reference_error;
  std::optional<double> reference_time;
  bool desk_scale = true;
};

struct ReferenceSuite {
  std::string id;
  EquationKind equation = EquationKind::sylvester;
  std::string description;
  std::vector<SuiteRow> rows;
};

const std::vector<std::string>& suite_ids();
ReferenceSuite reference_suite(std::string_view table_id);

Matrix read_matrix_market(const std::filesystem::path& path);
Matrix read_matrix_market(std::istream& in);
void write_matrix_market(const std::filesystem::path& path, const Matrix& m);
void write_matrix_market(std::ostream& out, const Matrix& m);

}  // namespace matrixopt
