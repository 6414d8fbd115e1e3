#include "netpot/ball.hpp"

#include <algorithm>

#include "netpot/errors.hpp"
#include "netpot/hash.hpp"

namespace netpot {

std::optional<std::size_t> Ball::find(const VertexId& v) const {
    auto it = index_.find(v);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::size_t Ball::index_of(const VertexId& v) const {
    auto i = find(v);
    if (!i)
        throw Error(Errc::VertexOutsideBall,
                    "'" + v.label() + "' is not in B(o," + std::to_string(radius_) + ")");
    return *i;
}

double Ball::conductance(std::size_t i, std::size_t j) const {
    for (const Arc& a : arcs(i))
        if (a.target == j)
            return a.conductance;
    return 0.0;
}

std::vector<std::size_t> Ball::layer(int d) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i)
        if (depth_[i] == d)
            out.push_back(i);
    return out;
}

std::vector<std::size_t> Ball::sphere() const {
    std::vector<std::size_t> out(sphere_size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = interior_size_ + k;
    return out;
}

std::string Ball::hash() const { return network_hash_ + ":R" + std::to_string(radius_); }

Ball extract_ball(const NetworkSource& source, int radius) {
    if (radius < 1)
        throw Error(Errc::InvalidArgument, "ball radius must be >= 1");

    Ball ball;
    ball.radius_ = radius;
    ball.network_hash_ = source.content_hash();

    auto add = [&ball](const VertexId& v, int d) {
        const std::size_t i = ball.labels_.size();
        ball.index_.emplace(v, i);
        ball.labels_.push_back(v);
        ball.depth_.push_back(d);
        return i;
    };
    add(source.root(), 0);

    // Breadth-first: vertices are appended in nondecreasing depth, so the
    // interior (depth < R) is a prefix. Full neighbor lists are recorded for
    // every interior vertex as it is dequeued.
    std::vector<std::vector<Ball::Arc>> adj;
    for (std::size_t head = 0; head < ball.labels_.size(); ++head) {
        if (ball.depth_[head] >= radius)
            break;
        const int d = ball.depth_[head];
        std::vector<Ball::Arc> arcs;
        for (const auto& nb : source.neighbors(ball.labels_[head])) {
            auto it = ball.index_.find(nb.vertex);
            const std::size_t j = it != ball.index_.end() ? it->second : add(nb.vertex, d + 1);
            arcs.push_back({j, nb.conductance});
        }
        adj.push_back(std::move(arcs));
        ball.interior_size_ = head + 1;
    }

    const std::size_t n = ball.labels_.size();
    adj.resize(n);
    for (std::size_t i = 0; i < ball.interior_size_; ++i)
        for (const auto& a : adj[i])
            if (a.target >= ball.interior_size_)
                adj[a.target].push_back({i, a.conductance});

    ball.offsets_.assign(n + 1, 0);
    ball.csum_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        ball.offsets_[i + 1] = ball.offsets_[i] + adj[i].size();
        for (const auto& a : adj[i])
            ball.csum_[i] += a.conductance;
    }
    ball.arcs_.reserve(ball.offsets_[n]);
    for (auto& list : adj)
        ball.arcs_.insert(ball.arcs_.end(), list.begin(), list.end());
    return ball;
}

double laplacian_apply(const Ball& ball, std::span<const double> f, std::size_t v) {
    if (!ball.is_interior(v))
        throw Error(Errc::VertexNotInterior,
                    "'" + (v < ball.size() ? ball.label(v).label() : std::to_string(v)) +
                        "' is not an interior vertex");
    if (f.size() != ball.size())
        throw Error(Errc::InvalidArgument, "function size does not match ball");
    double sum = 0.0;
    for (const auto& a : ball.arcs(v))
        sum += a.conductance * (f[a.target] - f[v]);
    return sum;
}

double laplacian_apply(const Ball& ball, std::span<const double> f, const VertexId& v) {
    auto i = ball.find(v);
    if (!i)
        throw Error(Errc::VertexNotInterior, "'" + v.label() + "' is not in the ball");
    return laplacian_apply(ball, f, *i);
}

double transition_probability(const Ball& ball, std::size_t x, std::size_t y) {
    return ball.conductance(x, y) / ball.conductance_sum(x);
}

} // namespace netpot

namespace netpot {

std::optional<int> eccentricity(const NetworkSource& source, int limit) {
    if (source.kind() == SourceKind::Generator)
        return std::nullopt;  // every generator family is infinite
    const Ball ball = extract_ball(source, limit + 1);
    if (!ball.exhausted())
        return std::nullopt;
    return ball.depth(ball.size() - 1);
}

} // namespace netpot
