#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "matrixopt/errors.hpp"
#include "matrixopt/problems.hpp"

using namespace matrixopt;

TEST(Tridiagonal, Examples) {
  EXPECT_EQ(gen_tridiagonal(3, 2, -4, -4), (Matrix{{2, -4, 0}, {-4, 2, -4}, {0, -4, 2}}));
  EXPECT_EQ(gen_tridiagonal(1, 5, 9, 9), Matrix{{5}});
  EXPECT_EQ(gen_tridiagonal(2, 6, 2, 1), (Matrix{{6, 1}, {2, 6}}));
  EXPECT_THROW(gen_tridiagonal(0, 1, 1, 1), PreconditionError);
}

TEST(Problems, ShapeValidation) {
  EXPECT_THROW(SylvesterProblem(Matrix::identity(2), Matrix::identity(3), Matrix::zeros(3, 2)),
               DimensionError);
  EXPECT_NO_THROW(SylvesterProblem(Matrix::identity(2), Matrix::identity(3), Matrix::zeros(2, 3)));
  EXPECT_THROW(LyapunovProblem(Matrix::identity(2), Matrix{{1, 2}, {0, 1}}), PreconditionError);
  EXPECT_THROW(CareProblem(Matrix::identity(2), Matrix{{1, 1}, {0, 1}}, Matrix::identity(2)),
               PreconditionError);
  // Symmetric but indefinite N passes unless the check is requested.
  const Matrix indef{{1, 2}, {2, 1}};
  EXPECT_NO_THROW(CareProblem(Matrix::identity(2), indef, Matrix::identity(2)));
  EXPECT_THROW(CareProblem(Matrix::identity(2), indef, Matrix::identity(2), true), PreconditionError);
}

TEST(Ammonia, Fixture) {
  const CareProblem p = ammonia_reactor();
  EXPECT_EQ(p.n(), 9u);
  EXPECT_DOUBLE_EQ(p.a(0, 0), -4.019);
  EXPECT_DOUBLE_EQ(p.a(4, 4), -53.008);
  EXPECT_DOUBLE_EQ(p.a(8, 7), 18.8);
  EXPECT_TRUE(is_symmetric(p.n_mat, 0.0));
  EXPECT_EQ(p.k_mat, Matrix::identity(9));
  // N = B B^T with B's first column (0.010, 0.003, 0.009, 0.024, 0.068, 0...).
  EXPECT_NEAR(p.n_mat(0, 0), 0.010 * 0.010 + 0.011 * 0.011 + 0.151 * 0.151, 1e-15);
  EXPECT_NEAR(p.n_mat(0, 4), 0.010 * 0.068 + 0.011 * 0.445, 1e-15);
  EXPECT_DOUBLE_EQ(p.n_mat(5, 5), 0.0);
  const CareProblem q = ammonia_reactor();
  EXPECT_EQ(p.a, q.a);
  EXPECT_EQ(p.n_mat, q.n_mat);
}

TEST(Generators, Families) {
  ProblemSource s;
  s.generator = "t3";
  s.order = 10;
  const SylvesterProblem t3 = make_sylvester(s);
  EXPECT_EQ(t3.a, 2.0 * Matrix::identity(10));
  EXPECT_EQ(t3.b, Matrix::identity(10));
  EXPECT_EQ(t3.c, Matrix::identity(10));

  s.generator = "t5";
  s.order = 4;
  const SylvesterProblem t5 = make_sylvester(s);
  EXPECT_EQ(t5.a, gen_tridiagonal(4, 3, -2, -2));
  EXPECT_EQ(t5.b, gen_tridiagonal(4, 6, 2, 2));

  s.generator = "t8";
  s.order = 5;
  const CareProblem t8 = make_care(s);
  const Matrix bt = gen_tridiagonal(5, 5, 2, 1);
  EXPECT_EQ(t8.a, gen_tridiagonal(5, 6, 2, 1));
  EXPECT_EQ(t8.n_mat, bt.transpose() * bt);
  EXPECT_EQ(t8.k_mat, Matrix::identity(5));
  s.generator = "t9";
  EXPECT_EQ(make_care(s).a, t8.a);

  s.generator = "t7";
  EXPECT_THROW(make_sylvester(s), PreconditionError);
  s.generator = "nosuch";
  EXPECT_THROW(make_sylvester(s), NotFoundError);
  s.generator = "t5";
  s.order = 0;
  EXPECT_THROW(make_sylvester(s), PreconditionError);
}

TEST(Generators, RandomAreSeededAndValid) {
  const auto a = random_sylvester(4, 3, 7), b = random_sylvester(4, 3, 7), c = random_sylvester(4, 3, 8);
  EXPECT_EQ(a.a, b.a);
  EXPECT_EQ(a.c, b.c);
  EXPECT_NE(a.a, c.a);
  EXPECT_EQ(a.c.rows(), 4u);
  EXPECT_EQ(a.c.cols(), 3u);
  const auto spd = random_sylvester(4, 4, 1, true);
  EXPECT_TRUE(is_symmetric(spd.a, 0.0));
  EXPECT_GT(symmetric_eigenvalues(spd.a).front(), 0.0);
  EXPECT_LT(max_real_eigenvalue(random_stable_lyapunov(6, 3).a), 0.0);
  EXPECT_LT(max_real_eigenvalue(random_stable_care(6, 3).a), 0.0);
}

TEST(ReferenceSuite, Metadata) {
  const ReferenceSuite t8 = reference_suite("t8");
  EXPECT_EQ(t8.equation, EquationKind::care);
  ASSERT_FALSE(t8.rows.empty());
  EXPECT_EQ(t8.rows[0].method, "admm");
  EXPECT_EQ(t8.rows[0].source.order, 16u);
  EXPECT_EQ(*t8.rows[0].reference_iterations, 563);
  EXPECT_EQ(t8.rows[0].settings.at("gamma"), "0.0014");

  const ReferenceSuite t3 = reference_suite("t3");
  EXPECT_EQ(t3.rows.size(), 3u);
  EXPECT_EQ(t3.rows[0].method, "ccom");
  EXPECT_EQ(*t3.rows[0].reference_iterations, 1);

  const ReferenceSuite t9 = reference_suite("t9");
  EXPECT_EQ(t9.rows[0].method, "newton-admm");
  EXPECT_EQ(*t9.rows[0].reference_iterations, 448);
  EXPECT_EQ(t9.rows[0].settings.at("beta"), "53.5");
  EXPECT_EQ(*reference_suite("t10").rows[0].reference_iterations, 373);

  const ReferenceSuite t7 = reference_suite("t7");
  EXPECT_EQ(t7.rows.size(), 3u);
  EXPECT_EQ(*t7.rows[0].reference_iterations, 6715);

  std::size_t big = 0;
  for (const auto& r : reference_suite("t6").rows) {
    if (!r.desk_scale) {
      ++big;
      EXPECT_GE(r.source.order, 2048u);
    }
  }
  EXPECT_EQ(big, 8u);
  EXPECT_THROW(reference_suite("t11"), NotFoundError);
  EXPECT_EQ(suite_ids().size(), 10u);
}

TEST(MatrixMarket, RoundTripIsExact) {
  Matrix m{{1.0 / 3.0, -2e-300}, {1e300, 0.1}, {5, 6}};
  std::stringstream ss;
  write_matrix_market(ss, m);
  EXPECT_EQ(read_matrix_market(ss), m);
  std::stringstream si;
  write_matrix_market(si, Matrix::identity(3));
  EXPECT_EQ(read_matrix_market(si), Matrix::identity(3));
}

TEST(MatrixMarket, SymmetricCoordinateExpands) {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 2\n2 1 5.0\n3 3 1.5\n");
  const Matrix m = read_matrix_market(in);
  EXPECT_DOUBLE_EQ(m(1, 0), 5.0);
  EXPECT_DOUBLE_EQ(m(0, 1), 5.0);
  EXPECT_DOUBLE_EQ(m(2, 2), 1.5);
  EXPECT_DOUBLE_EQ(m(0, 0), 0.0);
}

TEST(MatrixMarket, ArrayIsColumnMajor) {
  std::istringstream in("%%MatrixMarket matrix array real general\n2 2\n1\n3\n2\n4\n");
  EXPECT_EQ(read_matrix_market(in), (Matrix{{1, 2}, {3, 4}}));
}

TEST(MatrixMarket, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_matrix_market(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("%%MatrixMarket matrix coordinate complex general\n2 2 1\n1 1 1 0\n"), 1u);
  EXPECT_EQ(line_of("garbage\n"), 1u);
  EXPECT_EQ(line_of("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"), 3u);
  EXPECT_EQ(line_of("%%MatrixMarket matrix array real general\n% c\n2 x\n"), 3u);
  EXPECT_EQ(line_of("%%MatrixMarket matrix array real general\n100000 100000\n"), 2u);
  EXPECT_EQ(line_of("%%MatrixMarket matrix array real general\n1 1\nnan\n"), 3u);
}

TEST(MatrixMarket, FileErrorsNamePath) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto bad = dir / "matrixopt_bad.mtx";
  {
    std::ofstream f(bad);
    f << "%%MatrixMarket matrix array complex general\n1 1\n1 0\n";
  }
  try {
    read_matrix_market(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("matrixopt_bad.mtx"), std::string::npos);
    EXPECT_EQ(e.line(), 1u);
  }
  EXPECT_THROW(read_matrix_market(dir / "matrixopt_missing.mtx"), NotFoundError);
  std::filesystem::remove(bad);
}
