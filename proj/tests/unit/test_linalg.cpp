#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "suprec/linalg.hpp"

using namespace suprec;

TEST(MinEig, Examples) {
  EXPECT_NEAR(min_eig_symmetric(Eigen::Matrix2d::Identity()), 1.0, 1e-14);
  EXPECT_NEAR(min_eig_symmetric(Eigen::Vector2d(1, 4).asDiagonal().toDenseMatrix()), 1.0, 1e-14);
  Eigen::Matrix2d a;
  a << 2, 1, 1, 2;
  EXPECT_NEAR(min_eig_symmetric(a), 1.0, 1e-14);
  const auto ev = symmetric_eigenvalues(a);
  EXPECT_NEAR(ev[0], 3.0, 1e-14);
  EXPECT_NEAR(ev[1], 1.0, 1e-14);
}

TEST(Jacobi, AgreesWithEigenSolver) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int size : {1, 2, 3, 5, 8, 16, 33}) {
    for (int t = 0; t < 20; ++t) {
      Eigen::MatrixXd g(size, size);
      for (Eigen::Index e = 0; e < g.size(); ++e) g.data()[e] = normal(rng);
      const Eigen::MatrixXd s = g + g.transpose();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(s, Eigen::EigenvaluesOnly);
      const Eigen::VectorXd expected = oracle.eigenvalues().reverse();
      const auto got = symmetric_eigenvalues(s);
      ASSERT_EQ(got.size(), expected.size());
      EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-10 * (1.0 + s.norm())) << "size " << size;
    }
  }
}

TEST(Jacobi, SortedDescendingAndTracePreserved) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(10, 4);
  for (Eigen::Index e = 0; e < g.size(); ++e) g.data()[e] = normal(rng);
  const Eigen::MatrixXd s = g * g.transpose();  // rank 4, PSD
  const auto ev = symmetric_eigenvalues(s);
  for (Eigen::Index i = 1; i < ev.size(); ++i) EXPECT_GE(ev[i - 1], ev[i]);
  EXPECT_NEAR(ev.sum(), s.trace(), 1e-10 * s.trace());
  EXPECT_NEAR(ev[9], 0.0, 1e-10 * s.trace());
}

TEST(Symmetry, Detects) {
  Eigen::Matrix2d a;
  a << 1, 2, 2, 1;
  EXPECT_TRUE(is_symmetric(a));
  a(0, 1) = 2.1;
  EXPECT_FALSE(is_symmetric(a));
}
