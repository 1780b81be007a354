#include "matrixopt/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "matrixopt/errors.hpp"

namespace matrixopt {
namespace {

void require_finite(const Matrix& m, const char* name) {
  if (m.empty()) throw DimensionError(std::string(name) + " is empty");
  if (!m.all_finite()) throw NonFiniteError(std::string(name) + " has non-finite entries");
}

void require_square(const Matrix& m, const char* name) {
  if (!m.is_square()) {
    throw DimensionError(std::string(name) + " must be square, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

Matrix gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

std::size_t param_size(const ProblemSource& src, const char* key, std::size_t fallback) {
  auto it = src.params.find(key);
  if (it == src.params.end()) return fallback;
  if (!(it->second >= 1.0)) throw PreconditionError(std::string("parameter ") + key + " must be >= 1");
  return static_cast<std::size_t>(it->second);
}

std::uint64_t param_seed(const ProblemSource& src) {
  auto it = src.params.find("seed");
  return it == src.params.end() ? 0u : static_cast<std::uint64_t>(it->second);
}

std::size_t require_order(const ProblemSource& src) {
  if (src.order == 0) throw PreconditionError("problem source '" + src.generator + "' needs an order n >= 1");
  return src.order;
}

struct CareFamily {
  double a_diag, a_sub, a_super;
  double bt_diag, bt_sub, bt_super;  // bands of B^T as displayed
};

CareProblem care_family(std::size_t n, const CareFamily& f) {
  Matrix a = gen_tridiagonal(n, f.a_diag, f.a_sub, f.a_super);
  Matrix b = gen_tridiagonal(n, f.bt_diag, f.bt_sub, f.bt_super).transpose();
  return CareProblem(std::move(a), b * b.transpose(), Matrix::identity(n));
}

constexpr CareFamily kT8Family{6, 2, 1, 5, 2, 1};
constexpr CareFamily kT10Family{3, 1, 1, 6, 2, 2};

struct SylvesterFamily {
  double a_diag, a_sub, a_super;
  double b_diag, b_sub, b_super;
};

SylvesterProblem sylvester_family(std::size_t n, const SylvesterFamily& f) {
  return SylvesterProblem(gen_tridiagonal(n, f.a_diag, f.a_sub, f.a_super),
                          gen_tridiagonal(n, f.b_diag, f.b_sub, f.b_super),
                          Matrix::identity(n));
}

const std::map<std::string, SylvesterFamily, std::less<>>& sylvester_families() {
  static const std::map<std::string, SylvesterFamily, std::less<>> f{
      {"t1", {2, -4, -4, 1, 3, 3}},  {"t2", {2, -4, -4, 1, 3, 3}},
      {"t3", {2, 0, 0, 1, 0, 0}},    {"t4", {2, -1, -1, 4, 1, 1}},
      {"t5", {3, -2, -2, 6, 2, 2}},  {"t6", {5, -1, -1, 6, 2, 2}},
  };
  return f;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

SylvesterProblem::SylvesterProblem(Matrix a_, Matrix b_, Matrix c_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)) {
  require_finite(a, "A");
  require_finite(b, "B");
  require_finite(c, "C");
  require_square(a, "A");
  require_square(b, "B");
  if (c.rows() != a.rows() || c.cols() != b.rows()) {
    throw DimensionError("C must be " + std::to_string(a.rows()) + "x" +
                         std::to_string(b.rows()) + ", got " + std::to_string(c.rows()) +
                         "x" + std::to_string(c.cols()));
  }
}

LyapunovProblem::LyapunovProblem(Matrix a_, Matrix q_) : a(std::move(a_)), q(std::move(q_)) {
  require_finite(a, "A");
  require_finite(q, "Q");
  require_square(a, "A");
  if (q.rows() != a.rows() || q.cols() != a.rows()) throw DimensionError("Q must match A");
  if (!is_symmetric(q, 1e-12)) throw PreconditionError("Q must be symmetric");
}

CareProblem::CareProblem(Matrix a_, Matrix n_, Matrix k_, bool check_psd)
    : a(std::move(a_)), n_mat(std::move(n_)), k_mat(std::move(k_)) {
  require_finite(a, "A");
  require_finite(n_mat, "N");
  require_finite(k_mat, "K");
  require_square(a, "A");
  if (n_mat.rows() != a.rows() || !n_mat.is_square()) throw DimensionError("N must match A");
  if (k_mat.rows() != a.rows() || !k_mat.is_square()) throw DimensionError("K must match A");
  if (!is_symmetric(n_mat, 1e-12)) throw PreconditionError("N must be symmetric");
  if (!is_symmetric(k_mat, 1e-12)) throw PreconditionError("K must be symmetric");
  if (check_psd) {
    for (const Matrix* m : {&n_mat, &k_mat}) {
      const auto ev = symmetric_eigenvalues(*m);
      const double scale = std::max(1.0, max_abs(*m));
      if (!ev.empty() && ev.front() < -1e-12 * scale) {
        throw PreconditionError(std::string(m == &n_mat ? "N" : "K") +
                                " is not positive semi-definite (min eigenvalue " +
                                fmt(ev.front()) + ")");
      }
    }
  }
}

std::string_view to_string(EquationKind k) {
  switch (k) {
    case EquationKind::sylvester: return "sylvester";
    case EquationKind::lyapunov: return "lyapunov";
    case EquationKind::care: return "care";
  }
  return "?";
}

EquationKind parse_equation_kind(std::string_view s) {
  if (s == "sylvester") return EquationKind::sylvester;
  if (s == "lyapunov") return EquationKind::lyapunov;
  if (s == "care") return EquationKind::care;
  throw NotFoundError("unknown equation kind '" + std::string(s) + "'");
}

std::string ProblemSource::describe() const {
  std::ostringstream os;
  if (!files.empty()) {
    os << "files:";
    for (std::size_t i = 0; i < files.size(); ++i) os << (i ? "," : "") << files[i].string();
    return os.str();
  }
  os << generator;
  if (order) os << " n=" << order;
  for (const auto& [k, v] : params) os << " " << k << "=" << v;
  return os.str();
}

const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names{"t1", "t2", "t3", "t4", "t5", "t6", "t7",
                                              "t8", "t9", "t10", "ammonia", "random"};
  return names;
}

bool is_registered_generator(std::string_view name) {
  const auto& n = generator_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

SylvesterProblem make_sylvester(const ProblemSource& src) {
  if (!src.files.empty()) {
    if (src.files.size() != 3) throw PreconditionError("sylvester needs three files A,B,C");
    return SylvesterProblem(read_matrix_market(src.files[0]), read_matrix_market(src.files[1]),
                            read_matrix_market(src.files[2]));
  }
  if (!is_registered_generator(src.generator)) {
    throw NotFoundError("unknown generator '" + src.generator + "'");
  }
  const auto& fam = sylvester_families();
  if (auto it = fam.find(src.generator); it != fam.end()) {
    return sylvester_family(require_order(src), it->second);
  }
  if (src.generator == "random") {
    const std::size_t n = require_order(src);
    const std::size_t m = param_size(src, "m", n);
    const auto spd = src.params.find("spd");
    return random_sylvester(m, n, param_seed(src), spd != src.params.end() && spd->second != 0.0);
  }
  throw PreconditionError("generator '" + src.generator + "' does not produce a Sylvester problem");
}

LyapunovProblem make_lyapunov(const ProblemSource& src) {
  if (!src.files.empty()) {
    if (src.files.size() != 2) throw PreconditionError("lyapunov needs two files A,Q");
    return LyapunovProblem(read_matrix_market(src.files[0]), read_matrix_market(src.files[1]));
  }
  if (src.generator == "random") {
    return random_stable_lyapunov(require_order(src), param_seed(src));
  }
  if (!is_registered_generator(src.generator)) {
    throw NotFoundError("unknown generator '" + src.generator + "'");
  }
  throw PreconditionError("generator '" + src.generator + "' does not produce a Lyapunov problem");
}

CareProblem make_care(const ProblemSource& src) {
  if (!src.files.empty()) {
    if (src.files.size() != 3) throw PreconditionError("care needs three files A,N,K");
    return CareProblem(read_matrix_market(src.files[0]), read_matrix_market(src.files[1]),
                       read_matrix_market(src.files[2]));
  }
  const std::string& g = src.generator;
  if (g == "t7" || g == "ammonia") return ammonia_reactor();
  if (g == "t8" || g == "t9") return care_family(require_order(src), kT8Family);
  if (g == "t10") return care_family(require_order(src), kT10Family);
  if (g == "random") return random_stable_care(require_order(src), param_seed(src));
  if (!is_registered_generator(g)) throw NotFoundError("unknown generator '" + g + "'");
  throw PreconditionError("generator '" + g + "' does not produce a CARE problem");
}

Matrix gen_tridiagonal(std::size_t n, double diag, double sub, double super) {
  if (n == 0) throw PreconditionError("gen_tridiagonal: n must be >= 1");
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = diag;
    if (i > 0) m(i, i - 1) = sub;
    if (i + 1 < n) m(i, i + 1) = super;
  }
  return m;
}

CareProblem ammonia_reactor() {
  Matrix a{
      {-4.019, 5.12, 0, 0, -2.082, 0, 0, 0, 0.87},
      {-0.346, 0.986, 0, 0, -2.34, 0, 0, 0, 0.97},
      {-7.909, 15.407, -4.096, 0, -6.45, 0, 0, 0, 2.68},
      {-21.816, 35.606, -0.339, -3.87, -17.8, 0, 0, 0, 7.39},
      {-60.196, 98.188, -7.907, 0.34, -53.008, 0, 0, 0, 20.4},
      {0, 0, 0, 0, 94.0, -147.2, 0, 53.2, 0},
      {0, 0, 0, 0, 0, 94.0, -147.2, 0, 53.2},
      {0, 0, 0, 0, 0, 12.8, 0, -31.6, 0},
      {0, 0, 0, 0, 12.8, 0, 0, 18.8, -31.6},
  };
  // Displayed as B^T (3x9).
  Matrix bt{
      {0.010, 0.003, 0.009, 0.024, 0.068, 0, 0, 0, 0},
      {-0.011, 0.021, -0.059, -0.162, -0.445, 0, 0, 0, 0},
      {-0.151, 0, 0, 0, 0, 0, 0, 0, 0},
  };
  Matrix b = bt.transpose();
  return CareProblem(std::move(a), b * bt, Matrix::identity(9));
}

SylvesterProblem random_sylvester(std::size_t m, std::size_t n, std::uint64_t seed, bool spd) {
  std::mt19937_64 rng(seed);
  Matrix a, b;
  if (spd) {
    Matrix g = gaussian(m, m, rng);
    Matrix h = gaussian(n, n, rng);
    a = symmetrize(g.transpose() * g / static_cast<double>(m) + Matrix::identity(m));
    b = symmetrize(h.transpose() * h / static_cast<double>(n) + Matrix::identity(n));
  } else {
    a = gaussian(m, m, rng) / std::sqrt(static_cast<double>(m)) + 3.0 * Matrix::identity(m);
    b = gaussian(n, n, rng) / std::sqrt(static_cast<double>(n)) + Matrix::identity(n);
  }
  Matrix c = gaussian(m, n, rng);
  return SylvesterProblem(std::move(a), std::move(b), std::move(c));
}

LyapunovProblem random_stable_lyapunov(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double s = std::sqrt(static_cast<double>(n));
  Matrix a = gaussian(n, n, rng) / s - 3.0 * Matrix::identity(n);
  Matrix h = gaussian(n, n, rng);
  Matrix q = symmetrize(h.transpose() * h / static_cast<double>(n) + Matrix::identity(n));
  return LyapunovProblem(std::move(a), std::move(q));
}

CareProblem random_stable_care(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double s = std::sqrt(static_cast<double>(n));
  Matrix a = gaussian(n, n, rng) / s - 2.0 * Matrix::identity(n);
  Matrix b = gaussian(n, 2, rng);
  return CareProblem(std::move(a), symmetrize(b * b.transpose()), Matrix::identity(n));
}

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids{"t1", "t2", "t3", "t4", "t5",
                                            "t6", "t7", "t8", "t9", "t10"};
  return ids;
}

namespace {

struct RefRow {
  const char* algorithm;
  std::size_t n;
  long iterations;
  double error;
  double time;
};

std::string method_for(std::string_view algorithm) {
  if (algorithm == "DFP") return "dfp";
  if (algorithm == "BFGS") return "bfgs";
  if (algorithm == "AR") return "ar";
  if (algorithm == "CG") return "cg";
  if (algorithm == "CCOM") return "ccom";
  if (algorithm == "ADMM") return "admm";
  if (algorithm == "Newton") return "newton";
  return "newton-admm";
}

SuiteRow make_row(const std::string& table, const RefRow& r,
                  std::map<std::string, std::string> settings = {}) {
  SuiteRow row;
  row.algorithm = r.algorithm;
  row.method = method_for(r.algorithm);
  row.source.generator = table;
  row.source.order = r.n;
  row.settings = std::move(settings);
  row.reference_iterations = r.iterations;
  row.reference_error = r.error;
  row.reference_time = r.time;
  row.desk_scale = r.n < 2048;
  return row;
}

}  // namespace

ReferenceSuite reference_suite(std::string_view table_id) {
  const std::string id(table_id);
  ReferenceSuite s;
  s.id = id;
  auto add = [&](std::initializer_list<RefRow> rows,
                 const std::map<std::string, std::string>& settings = {}) {
    for (const auto& r : rows) s.rows.push_back(make_row(id, r, settings));
  };
  if (id == "t1" || id == "t2") {
    s.equation = EquationKind::sylvester;
    s.description = "CCOM, A=tridiag(2,-4,-4), B=tridiag(1,3,3), C=I";
    if (id == "t1") {
      add({{"CCOM", 10, 1, 6.0905e-13, 0.05}, {"CCOM", 100, 1, 1.1574e-09, 22.8},
           {"CCOM", 200, 2, 1.9798e-09, 2288}});
    } else {
      add({{"CCOM", 10, 1, 6.0905e-13, 0.01}, {"CCOM", 100, 1, 1.1574e-09, 19},
           {"CCOM", 200, 2, 1.9798e-09, 1860}});
    }
  } else if (id == "t3") {
    s.equation = EquationKind::sylvester;
    s.description = "CCOM, A=2I, B=I, C=I";
    add({{"CCOM", 10, 1, 1.2560e-13, 0.002}, {"CCOM", 100, 1, 2.3124e-09, 14},
         {"CCOM", 200, 1, 4.9651e-09, 640}});
  } else if (id == "t4") {
    s.equation = EquationKind::sylvester;
    s.description = "DFP with Armijo search, A=tridiag(2,-1,-1), B=tridiag(4,1,1), C=I";
    add({{"DFP", 128, 316, 9.4577e-08, 5.6}, {"DFP", 256, 287, 4.8782e-07, 22},
         {"DFP", 512, 275, 9.6180e-07, 170}, {"DFP", 1024, 246, 4.9609e-07, 1815}},
        {{"linesearch", "armijo"}});
  } else if (id == "t5") {
    s.equation = EquationKind::sylvester;
    s.description = "DFP/BFGS/AR, A=tridiag(3,-2,-2), B=tridiag(6,2,2), C=I";
    const double t[6][3] = {{0.04, 0.04, 0.09}, {0.21, 0.22, 0.18}, {0.98, 1.02, 1.03},
                            {4.87, 4.87, 8.59}, {31, 33, 73},       {191, 196, 268}};
    std::size_t n = 128;
    for (int i = 0; i < 6; ++i, n *= 2) {
      add({{"DFP", n, 3, 9.3259e-15, t[i][0]}, {"BFGS", n, 3, 1.5774e-16, t[i][1]},
           {"AR", n, 3, 1.1102e-16, t[i][2]}});
    }
  } else if (id == "t6") {
    s.equation = EquationKind::sylvester;
    s.description = "DFP/BFGS/CG/AR, A=tridiag(5,-1,-1), B=tridiag(6,2,2), C=I";
    add({{"DFP", 128, 3, 2.3697e-14, 0.05}, {"BFGS", 128, 3, 1.2619e-16, 0.05},
         {"CG", 128, 15, 6.2321e-15, 0.18}, {"AR", 128, 3, 4.1425e-15, 0.14},
         {"DFP", 256, 3, 2.7295e-14, 0.21}, {"BFGS", 256, 3, 1.2619e-16, 0.23},
         {"CG", 256, 15, 6.1485e-15, 0.65}, {"AR", 256, 3, 5.3648e-15, 0.33},
         {"DFP", 512, 3, 2.7295e-14, 1.03}, {"BFGS", 512, 3, 1.2619e-16, 1.15},
         {"CG", 512, 15, 6.0531e-15, 3.32}, {"AR", 512, 3, 7.3523e-15, 2.03},
         {"DFP", 1024, 3, 2.7327e-14, 6.05}, {"BFGS", 1024, 3, 1.2619e-16, 6.37},
         {"CG", 1024, 15, 5.9917e-15, 33}, {"AR", 1024, 3, 1.1720e-14, 20},
         {"DFP", 2048, 3, 2.7295e-14, 34}, {"BFGS", 2048, 3, 1.3900e-16, 36},
         {"CG", 2048, 15, 5.9576e-15, 289}, {"AR", 2048, 3, 1.9263e-14, 170},
         {"DFP", 4096, 3, 2.7295e-14, 178}, {"BFGS", 4096, 3, 1.2619e-16, 224},
         {"CG", 4096, 15, 5.9397e-15, 764}, {"AR", 4096, 3, 1.1815e-14, 1268}});
  } else if (id == "t7") {
    s.equation = EquationKind::care;
    s.description = "ADMM on the 9th-order ammonia reactor, three penalty triples";
    struct P { const char *a, *b, *g; long it; double err, time; };
    const P ps[] = {{"0.0465", "63.51", "0.0428", 6715, 9.9961e-09, 0.2292},
                    {"0.2", "100", "0.01", 17869, 8.5193e-09, 1.0675},
                    {"0.2", "100", "0.1", 12329, 9.9939e-09, 0.6784}};
    for (const auto& p : ps) {
      SuiteRow row = make_row(id, {"ADMM", 9, p.it, p.err, p.time},
                              {{"alpha", p.a}, {"beta", p.b}, {"gamma", p.g}});
      row.source.generator = "ammonia";
      row.algorithm = std::string("ADMM(") + p.a + "," + p.b + "," + p.g + ")";
      s.rows.push_back(row);
    }
  } else if (id == "t8") {
    s.equation = EquationKind::care;
    s.description = "ADMM vs Newton, A=tridiag(6,2,1), B^T=tridiag(5,2,1), N=BB^T, K=I";
    const std::map<std::string, std::string> admm{
        {"alpha", "0.91"}, {"beta", "2.8"}, {"gamma", "0.0014"}};
    const RefRow ad[] = {{"ADMM", 16, 563, 9.9673e-09, 0.05},   {"ADMM", 32, 602, 9.9315e-09, 0.15},
                         {"ADMM", 64, 627, 9.4188e-09, 0.38},   {"ADMM", 128, 641, 9.8931e-09, 1.60},
                         {"ADMM", 256, 661, 9.8646e-09, 6.67},  {"ADMM", 512, 674, 9.9501e-09, 38},
                         {"ADMM", 1024, 687, 9.9190e-09, 227},  {"ADMM", 2048, 700, 9.8274e-09, 2129},
                         {"ADMM", 4096, 713, 9.7108e-09, 25223}};
    const RefRow nw[] = {{"Newton", 16, 83, 6.0989e-08, 0.09},  {"Newton", 32, 76, 6.2125e-08, 0.11},
                         {"Newton", 64, 76, 6.5353e-08, 0.52},  {"Newton", 128, 76, 6.2467e-08, 1.38},
                         {"Newton", 256, 76, 7.0731e-08, 4.97}, {"Newton", 512, 76, 7.5188e-08, 23},
                         {"Newton", 1024, 76, 7.8919e-08, 104}, {"Newton", 2048, 76, 8.3520e-08, 983},
                         {"Newton", 4096, 76, 8.8869e-07, 7129}};
    for (int i = 0; i < 9; ++i) {
      s.rows.push_back(make_row(id, ad[i], admm));
      s.rows.push_back(make_row(id, nw[i]));
    }
  } else if (id == "t9" || id == "t10") {
    s.equation = EquationKind::care;
    const bool t9 = id == "t9";
    s.description = t9 ? "Newton-ADMM vs Newton, A=tridiag(6,2,1), B^T=tridiag(5,2,1), N=BB^T, K=I"
                       : "Newton-ADMM vs Newton, A=tridiag(3,1,1), B^T=tridiag(6,2,2), N=BB^T, K=I";
    const std::map<std::string, std::string> nadmm{{"alpha", "0.8"}, {"beta", t9 ? "53.5" : "45"}, {"inner_tol", "1e-10"}};
    const RefRow r9[] = {
        {"Newton-ADMM", 16, 448, 2.5323e-10, 0.03}, {"Newton", 16, 83, 6.0989e-08, 0.09},
        {"Newton-ADMM", 32, 453, 3.7771e-10, 0.08}, {"Newton", 32, 83, 6.9049e-08, 0.18},
        {"Newton-ADMM", 64, 455, 4.0151e-10, 0.18}, {"Newton", 64, 83, 6.8379e-08, 0.89},
        {"Newton-ADMM", 128, 467, 4.1344e-10, 1.09}, {"Newton", 128, 83, 7.0817e-08, 2.27},
        {"Newton-ADMM", 256, 472, 4.1654e-10, 4.32}, {"Newton", 256, 83, 7.7239e-08, 6.51},
        {"Newton-ADMM", 512, 474, 4.1731e-10, 20},  {"Newton", 512, 83, 8.3165e-08, 28},
        {"Newton-ADMM", 1024, 488, 4.1751e-10, 103}, {"Newton", 1024, 83, 9.6813e-08, 148},
        {"Newton-ADMM", 2048, 491, 4.1757e-10, 887}, {"Newton", 2048, 83, 9.7205e-08, 1037},
        {"Newton-ADMM", 4096, 493, 4.1758e-10, 9657}, {"Newton", 4096, 83, 1.1359e-07, 11048}};
    const RefRow r10[] = {
        {"Newton-ADMM", 16, 373, 4.0583e-11, 0.02}, {"Newton", 16, 76, 6.0918e-08, 0.05},
        {"Newton-ADMM", 32, 353, 5.0978e-11, 0.06}, {"Newton", 32, 76, 6.2125e-08, 0.11},
        {"Newton-ADMM", 64, 361, 6.1431e-11, 0.17}, {"Newton", 64, 76, 6.5353e-08, 0.52},
        {"Newton-ADMM", 128, 362, 6.4471e-11, 0.87}, {"Newton", 128, 76, 6.2467e-08, 1.38},
        {"Newton-ADMM", 256, 367, 6.5266e-11, 3.88}, {"Newton", 256, 76, 7.0731e-08, 4.97},
        {"Newton-ADMM", 512, 374, 6.5468e-11, 18},  {"Newton", 512, 76, 7.5188e-08, 23},
        {"Newton-ADMM", 1024, 378, 6.5520e-11, 88}, {"Newton", 1024, 76, 7.8919e-08, 104},
        {"Newton-ADMM", 2048, 383, 6.5531e-11, 834}, {"Newton", 2048, 76, 8.3520e-08, 983},
        {"Newton-ADMM", 4096, 390, 6.5537e-11, 6534}, {"Newton", 4096, 76, 8.8869e-07, 7129}};
    for (const auto& r : t9 ? std::span<const RefRow>(r9) : std::span<const RefRow>(r10)) {
      s.rows.push_back(make_row(id, r, r.algorithm == std::string("Newton") ? decltype(nadmm){} : nadmm));
    }
  } else {
    throw NotFoundError("unknown suite '" + id + "' (expected t1..t10)");
  }
  return s;
}

// MatrixMarket ------------------------------------------------------------

namespace {

constexpr std::size_t kMaxMarketEntries = std::size_t{1} << 28;

bool next_data_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

double parse_value(std::istringstream& is, std::size_t lineno) {
  std::string tok;
  if (!(is >> tok)) throw ParseError("missing value", lineno);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("bad number '" + tok + "'", lineno);
  }
  if (used != tok.size()) throw ParseError("bad number '" + tok + "'", lineno);
  if (!std::isfinite(v)) throw ParseError("non-finite value", lineno);
  return v;
}

std::size_t parse_index(std::istringstream& is, std::size_t lineno) {
  long long v = 0;
  if (!(is >> v) || v < 1) throw ParseError("bad index", lineno);
  return static_cast<std::size_t>(v);
}

}  // namespace

Matrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", lineno);
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw ParseError("unsupported object '" + object + "'", lineno);
  if (format != "array" && format != "coordinate") {
    throw ParseError("unsupported format '" + format + "'", lineno);
  }
  if (field != "real") throw ParseError("unsupported field '" + field + "' (only real)", lineno);
  if (symmetry != "general" && symmetry != "symmetric") {
    throw ParseError("unsupported symmetry '" + symmetry + "'", lineno);
  }
  const bool sym = symmetry == "symmetric";

  if (!next_data_line(in, line, lineno)) throw ParseError("missing size line", lineno + 1);
  std::istringstream size_line(line);
  const std::size_t rows = parse_index(size_line, lineno);
  const std::size_t cols = parse_index(size_line, lineno);
  if (rows > kMaxMarketEntries / cols) throw ParseError("dimension overflow", lineno);
  if (sym && rows != cols) throw ParseError("symmetric matrix must be square", lineno);
  Matrix m(rows, cols);

  if (format == "array") {
    // Column-major; symmetric files list the lower triangle only.
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t i = sym ? j : 0; i < rows; ++i) {
        if (!next_data_line(in, line, lineno)) throw ParseError("too few entries", lineno + 1);
        std::istringstream is(line);
        const double v = parse_value(is, lineno);
        m(i, j) = v;
        if (sym) m(j, i) = v;
      }
    }
  } else {
    long long nnz_raw = -1;
    if (!(size_line >> nnz_raw) || nnz_raw < 0) throw ParseError("missing entry count", lineno);
    const auto nnz = static_cast<std::size_t>(nnz_raw);
    if (nnz > rows * cols) throw ParseError("entry count exceeds matrix size", lineno);
    for (std::size_t k = 0; k < nnz; ++k) {
      if (!next_data_line(in, line, lineno)) throw ParseError("too few entries", lineno + 1);
      std::istringstream is(line);
      const std::size_t i = parse_index(is, lineno);
      const std::size_t j = parse_index(is, lineno);
      if (i > rows || j > cols) throw ParseError("index out of range", lineno);
      const double v = parse_value(is, lineno);
      m(i - 1, j - 1) += v;
      if (sym && i != j) m(j - 1, i - 1) += v;
    }
  }
  if (next_data_line(in, line, lineno)) throw ParseError("trailing data", lineno);
  return m;
}

Matrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open '" + path.string() + "'");
  try {
    return read_matrix_market(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

void write_matrix_market(std::ostream& out, const Matrix& m) {
  out << "%%MatrixMarket matrix array real general\n" << m.rows() << " " << m.cols() << "\n";
  char buf[40];
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", m(i, j));
      out << buf;
    }
}

void write_matrix_market(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_matrix_market(out, m);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace matrixopt
