#pragma once

// O(N) solver for tridiagonal systems, optionally with the two corner
// entries of a periodic (cyclic) matrix.  The factorisation is computed once
// and reused for every right-hand side.

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "feqo/errors.hpp"

namespace feqo {

namespace detail {

// Plain complex product; std::complex operator* carries an Annex G NaN
// recovery path that blocks vectorisation in the inner loops.
inline std::complex<double> cmul(std::complex<double> a, std::complex<double> b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace detail

class CyclicTridiagonalSolver {
public:
    using cplx = std::complex<double>;

    CyclicTridiagonalSolver() = default;

    /// sub[i] = A[i][i-1], diag[i] = A[i][i], super[i] = A[i][i+1].  When
    /// periodic, sub[0] = A[0][N-1] and super[N-1] = A[N-1][0]; otherwise both
    /// are ignored.
    CyclicTridiagonalSolver(std::span<const cplx> sub, std::span<const cplx> diag, std::span<const cplx> super,
                            bool periodic)
        : n_(diag.size()), periodic_(periodic) {
        if (sub.size() != n_ || super.size() != n_) throw DomainError("tridiagonal bands differ in length");
        if (n_ < (periodic ? 3u : 1u)) throw DomainError("tridiagonal system too small");
        sub_.assign(sub.begin(), sub.end());
        std::vector<cplx> b(diag.begin(), diag.end());
        if (periodic_) {
            alpha_ = super[n_ - 1];
            beta_ = sub[0];
            gamma_ = -b[0];
            if (gamma_ == cplx{}) gamma_ = cplx{1.0, 0.0};
            b[0] -= gamma_;
            b[n_ - 1] -= alpha_ * beta_ / gamma_;
        }
        sub_[0] = cplx{};
        factorize(b, super);
        if (periodic_) {
            z_.assign(n_, cplx{});
            z_[0] = gamma_;
            z_[n_ - 1] = alpha_;
            solve_banded(z_);
            denom_ = cplx{1.0, 0.0} + z_[0] + beta_ * z_[n_ - 1] / gamma_;
            if (std::abs(denom_) < 1e-300) throw SolverAbort("cyclic tridiagonal system is singular");
        }
    }

    std::size_t size() const noexcept { return n_; }

    /// Overwrites rhs with the solution x of A x = rhs.
    void solve(std::span<cplx> rhs) const {
        solve_banded(rhs);
        if (periodic_) {
            const cplx f = (rhs[0] + beta_ * rhs[n_ - 1] / gamma_) / denom_;
            cplx* r = rhs.data();
            const cplx* z = z_.data();
            for (std::size_t i = 0; i < n_; ++i) r[i] -= detail::cmul(f, z[i]);
        }
    }

private:
    void factorize(const std::vector<cplx>& b, std::span<const cplx> super) {
        inv_.resize(n_);
        cprime_.resize(n_);
        lprime_.resize(n_);
        double scale = 0.0;
        for (const auto& v : b) scale = std::max(scale, std::abs(v));
        const double tiny = 1e-14 * (scale > 0.0 ? scale : 1.0);
        cplx prev{};
        for (std::size_t i = 0; i < n_; ++i) {
            const cplx denom = b[i] - (i > 0 ? sub_[i] * prev : cplx{});
            if (std::abs(denom) <= tiny) throw SolverAbort("tridiagonal system is singular at row " + std::to_string(i));
            inv_[i] = cplx{1.0, 0.0} / denom;
            prev = cprime_[i] = (i + 1 < n_ ? super[i] : cplx{}) * inv_[i];
            lprime_[i] = sub_[i] * inv_[i];
        }
        fwd_pair_.assign(n_, cplx{});
        fwd_two_.assign(n_, cplx{});
        bwd_two_.assign(n_, cplx{});
        for (std::size_t i = 1; i < n_; ++i) fwd_pair_[i] = lprime_[i] * inv_[i - 1];
        for (std::size_t i = 2; i < n_; ++i) fwd_two_[i] = lprime_[i] * lprime_[i - 1];
        for (std::size_t i = 0; i + 2 < n_; ++i) bwd_two_[i] = cprime_[i] * cprime_[i + 1];
    }

    // Both sweeps are unrolled by two: r_i = y'_i + (l'_i l'_{i-1}) r_{i-2}, so the
    // even and odd recurrences run as independent chains and overlap in the pipeline.
    void solve_banded(std::span<cplx> rs) const {
        using detail::cmul;
        cplx* r = rs.data();
        const std::size_t n = n_;
        const cplx* inv = inv_.data();
        const cplx* fq = fwd_pair_.data();
        const cplx* f2 = fwd_two_.data();
        const cplx* cp = cprime_.data();
        const cplx* b2 = bwd_two_.data();
        for (std::size_t i = n - 1; i > 0; --i) r[i] = cmul(r[i], inv[i]) - cmul(fq[i], r[i - 1]);
        r[0] = cmul(r[0], inv[0]);
        for (std::size_t i = 2; i < n; ++i) r[i] += cmul(f2[i], r[i - 2]);
        for (std::size_t i = 0; i + 1 < n; ++i) r[i] -= cmul(cp[i], r[i + 1]);
        for (std::size_t i = n < 2 ? 0 : n - 2; i-- > 0;) r[i] += cmul(b2[i], r[i + 2]);
    }

    std::size_t n_ = 0;
    bool periodic_ = false;
    std::vector<cplx> sub_, inv_, cprime_, lprime_, fwd_pair_, fwd_two_, bwd_two_, z_;
    cplx alpha_{}, beta_{}, gamma_{}, denom_{};
};

}  // namespace feqo
