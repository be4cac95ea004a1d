#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "feqo/tridiagonal.hpp"

using namespace feqo;
using cplx = std::complex<double>;

namespace {

struct System {
    std::vector<cplx> sub, diag, super, rhs;
};

System random_system(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto c = [&] { return cplx{u(rng), u(rng)}; };
    System s;
    for (std::size_t i = 0; i < n; ++i) {
        s.sub.push_back(c());
        s.super.push_back(c());
        s.diag.push_back(c() + cplx{4.0, 1.0});  // diagonally dominant
        s.rhs.push_back(c());
    }
    return s;
}

Eigen::MatrixXcd dense(const System& s, bool periodic) {
    const auto n = static_cast<Eigen::Index>(s.diag.size());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = s.diag[i];
        if (i > 0) a(i, i - 1) = s.sub[i];
        if (i + 1 < n) a(i, i + 1) = s.super[i];
    }
    if (periodic) {
        a(0, n - 1) = s.sub[0];
        a(n - 1, 0) = s.super[n - 1];
    }
    return a;
}

double solve_error(std::size_t n, bool periodic, unsigned seed) {
    const System s = random_system(n, seed);
    CyclicTridiagonalSolver solver(s.sub, s.diag, s.super, periodic);
    std::vector<cplx> x = s.rhs;
    solver.solve(x);
    const Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(s.rhs.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXcd ref = dense(s, periodic).partialPivLu().solve(b);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(x[i] - ref(static_cast<Eigen::Index>(i))));
    return err;
}

}  // namespace

TEST(Tridiagonal, OpenChainMatchesDenseSolve) {
    for (std::size_t n : {1u, 2u, 3u, 7u, 64u, 257u}) EXPECT_LT(solve_error(n, false, 11 + n), 1e-13) << n;
}

TEST(Tridiagonal, CyclicMatchesDenseSolve) {
    for (std::size_t n : {3u, 4u, 5u, 64u, 255u}) EXPECT_LT(solve_error(n, true, 23 + n), 1e-13) << n;
}

TEST(Tridiagonal, CyclicWithZeroLeadingDiagonal) {
    System s = random_system(16, 5);
    s.diag[0] = cplx{};
    s.diag[1] = cplx{6.0, 0.0};
    CyclicTridiagonalSolver solver(s.sub, s.diag, s.super, true);
    std::vector<cplx> x = s.rhs;
    solver.solve(x);
    const Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(s.rhs.data(), 16);
    const Eigen::VectorXcd ref = dense(s, true).fullPivLu().solve(b);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_LT(std::abs(x[i] - ref(static_cast<Eigen::Index>(i))), 1e-11);
}

TEST(Tridiagonal, ReusableFactorisation) {
    const System s = random_system(32, 9);
    CyclicTridiagonalSolver solver(s.sub, s.diag, s.super, true);
    std::vector<cplx> a = s.rhs, b = s.rhs;
    solver.solve(a);
    solver.solve(b);
    EXPECT_EQ(a, b);
}

TEST(Tridiagonal, RejectsBadInput) {
    const System s = random_system(8, 1);
    std::vector<cplx> short_sub(s.sub.begin(), s.sub.begin() + 4);
    EXPECT_THROW(CyclicTridiagonalSolver(short_sub, s.diag, s.super, false), DomainError);
    const System two = random_system(2, 1);
    EXPECT_THROW(CyclicTridiagonalSolver(two.sub, two.diag, two.super, true), DomainError);
    std::vector<cplx> zero(8, cplx{});
    EXPECT_THROW(CyclicTridiagonalSolver(zero, zero, zero, false), SolverAbort);
}
