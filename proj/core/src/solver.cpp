#include "netpot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <Eigen/CholmodSupport>
#include <Eigen/Sparse>

#include "netpot/errors.hpp"

namespace netpot {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct DirichletSystem::Impl {
    SparseMatrix laplacian;
    Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower> llt;
    mutable std::mutex mutex;
};

DirichletSystem::DirichletSystem(std::shared_ptr<const Ball> ball, std::vector<std::size_t> killed,
                                 SphereBoundary boundary, Tolerances tol)
    : ball_(std::move(ball)), boundary_(boundary), tol_(tol), impl_(std::make_unique<Impl>()) {
    if (!ball_)
        throw Error(Errc::InvalidArgument, "null ball");
    const std::size_t n = ball_->size();
    std::vector<char> is_killed(n, 0);
    for (std::size_t k : killed) {
        if (k >= n)
            throw Error(Errc::InvalidArgument, "killed vertex index out of range");
        is_killed[k] = 1;
    }
    if (!is_killed[Ball::root_index()])
        throw Error(Errc::InvalidArgument, "killed set must contain the root");
    if (boundary_ == SphereBoundary::Absorbing)
        for (std::size_t i = ball_->interior_size(); i < n; ++i)
            is_killed[i] = 1;

    position_.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i)
        if (!is_killed[i]) {
            position_[i] = static_cast<long>(free_.size());
            free_.push_back(i);
        }

    const auto m = static_cast<Eigen::Index>(free_.size());
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t k = 0; k < free_.size(); ++k) {
        const std::size_t x = free_[k];
        triplets.emplace_back(k, k, ball_->conductance_sum(x));
        for (const auto& a : ball_->arcs(x))
            if (position_[a.target] >= 0)
                triplets.emplace_back(k, position_[a.target], -a.conductance);
    }
    impl_->laplacian.resize(m, m);
    impl_->laplacian.setFromTriplets(triplets.begin(), triplets.end());
    impl_->laplacian.makeCompressed();
    if (m > 0) {
        auto& common = impl_->llt.cholmod();
        common.nmethods = 1;
        common.method[0].ordering = CHOLMOD_AMD;
        common.postorder = 1;
        impl_->llt.compute(impl_->laplacian);
        if (impl_->llt.info() != Eigen::Success)
            throw Error(Errc::SingularSystem, "Cholesky factorization of the reduced Laplacian failed");
    }
}

DirichletSystem DirichletSystem::factor(std::shared_ptr<const Ball> ball,
                                        const std::vector<VertexId>& killed,
                                        SphereBoundary boundary, Tolerances tol) {
    std::vector<std::size_t> idx;
    idx.reserve(killed.size());
    for (const auto& v : killed)
        idx.push_back(ball->index_of(v));
    return DirichletSystem(std::move(ball), std::move(idx), boundary, tol);
}

DirichletSystem::DirichletSystem(DirichletSystem&&) noexcept = default;
DirichletSystem& DirichletSystem::operator=(DirichletSystem&&) noexcept = default;
DirichletSystem::~DirichletSystem() = default;

Eigen::MatrixXd DirichletSystem::solve_free(const Eigen::MatrixXd& rhs, double* max_residual) const {
    if (rhs.rows() != static_cast<Eigen::Index>(free_.size()))
        throw Error(Errc::InvalidArgument, "right-hand side has wrong dimension");
    if (free_.empty() || rhs.cols() == 0) {
        if (max_residual)
            *max_residual = 0.0;
        return Eigen::MatrixXd::Zero(rhs.rows(), rhs.cols());
    }

    Eigen::MatrixXd u;
    {
        std::lock_guard lock(impl_->mutex);
        u = impl_->llt.solve(rhs);
    }
    double worst = 0.0;
    Eigen::MatrixXd r = rhs - impl_->laplacian * u;
    for (Eigen::Index j = 0; j < rhs.cols(); ++j) {
        const double scale = rhs.col(j).lpNorm<Eigen::Infinity>();
        if (scale == 0.0) {
            u.col(j).setZero();
            continue;
        }
        double rel = r.col(j).lpNorm<Eigen::Infinity>() / scale;
        if (rel > tol_.solve) {
            // one step of iterative refinement
            Eigen::VectorXd du;
            {
                std::lock_guard lock(impl_->mutex);
                du = impl_->llt.solve(Eigen::VectorXd(r.col(j)));
            }
            u.col(j) += du;
            rel = (rhs.col(j) - impl_->laplacian * u.col(j)).lpNorm<Eigen::Infinity>() / scale;
            if (!(rel <= tol_.solve))
                throw Error(Errc::ResidualTooLarge, "relative residual " + std::to_string(rel) +
                                                        " exceeds " + std::to_string(tol_.solve));
        }
        worst = std::max(worst, rel);
    }
    if (max_residual)
        *max_residual = worst;
    return u;
}

Solution DirichletSystem::solve(std::span<const double> source,
                                std::span<const double> boundary) const {
    const std::size_t n = ball_->size();
    if (source.size() != n || boundary.size() != n)
        throw Error(Errc::InvalidArgument, "source/boundary size does not match ball");

    Eigen::MatrixXd rhs(static_cast<Eigen::Index>(free_.size()), 1);
    for (std::size_t k = 0; k < free_.size(); ++k) {
        const std::size_t x = free_[k];
        double value = source[x];
        for (const auto& a : ball_->arcs(x))
            if (position_[a.target] < 0)
                value += a.conductance * boundary[a.target];
        rhs(static_cast<Eigen::Index>(k), 0) = value;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (position_[i] < 0 && source[i] != 0.0)
            throw Error(Errc::InvalidArgument, "source must vanish on the killed set");

    Solution out;
    const Eigen::MatrixXd u = solve_free(rhs, &out.residual);
    out.values.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        out.values[i] = position_[i] < 0 ? boundary[i] : u(position_[i], 0);
    return out;
}

HarmonicMeasure harmonic_measure(const DirichletSystem& system, std::span<const std::size_t> rows) {
    const Ball& ball = system.ball();
    if (system.boundary() != SphereBoundary::Absorbing)
        throw Error(Errc::InvalidArgument, "harmonic measure needs an absorbing sphere");
    if (ball.exhausted())
        throw Error(Errc::ExhaustedBall, "ball has an empty sphere");

    HarmonicMeasure hm;
    hm.columns = ball.sphere();
    if (rows.empty()) {
        hm.rows.resize(ball.size());
        for (std::size_t i = 0; i < ball.size(); ++i)
            hm.rows[i] = i;
    } else {
        hm.rows.assign(rows.begin(), rows.end());
    }
    hm.values.setZero(static_cast<Eigen::Index>(hm.rows.size()),
                      static_cast<Eigen::Index>(hm.columns.size()));

    std::vector<long> free_pos(ball.size(), -1);
    const auto free = system.free_vertices();
    for (std::size_t k = 0; k < free.size(); ++k)
        free_pos[free[k]] = static_cast<long>(k);

    constexpr std::size_t block = 64;
    for (std::size_t start = 0; start < hm.columns.size(); start += block) {
        const std::size_t width = std::min(block, hm.columns.size() - start);
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(free.size()),
                                                    static_cast<Eigen::Index>(width));
        for (std::size_t j = 0; j < width; ++j)
            for (const auto& a : ball.arcs(hm.columns[start + j]))
                if (free_pos[a.target] >= 0)
                    rhs(free_pos[a.target], static_cast<Eigen::Index>(j)) += a.conductance;
        double residual = 0.0;
        const Eigen::MatrixXd u = system.solve_free(rhs, &residual);
        hm.max_residual = std::max(hm.max_residual, residual);
        for (std::size_t r = 0; r < hm.rows.size(); ++r) {
            const std::size_t v = hm.rows[r];
            for (std::size_t j = 0; j < width; ++j) {
                double value;
                if (free_pos[v] >= 0)
                    value = u(free_pos[v], static_cast<Eigen::Index>(j));
                else
                    value = v == hm.columns[start + j] ? 1.0 : 0.0;
                hm.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(start + j)) = value;
            }
        }
    }
    return hm;
}

double effective_resistance(std::shared_ptr<const Ball> ball, Tolerances tol) {
    if (ball->exhausted())
        throw Error(Errc::ExhaustedBall, "network is exhausted before radius " +
                                             std::to_string(ball->radius()));
    const std::size_t n = ball->size();
    DirichletSystem system(ball, {Ball::root_index()}, SphereBoundary::Absorbing, tol);
    std::vector<double> source(n, 0.0), boundary(n, 0.0);
    boundary[Ball::root_index()] = 1.0;
    const auto sol = system.solve(source, boundary);
    double current = 0.0;
    for (const auto& a : ball->arcs(Ball::root_index()))
        current += a.conductance * (1.0 - sol.values[a.target]);
    return 1.0 / current;
}

double effective_resistance(const NetworkSource& source, int radius, Tolerances tol) {
    return effective_resistance(make_ball(source, radius), tol);
}

} // namespace netpot
