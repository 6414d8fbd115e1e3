#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "netpot/network.hpp"

namespace netpot {

/// Finite exhaustion piece B(o,R): interior {d < R} plus sphere {d = R}.
///
/// Vertices get dense indices in breadth-first order from the root, visiting
/// neighbors in label order, so index 0 is the root, the interior is the
/// prefix [0, interior_size()) and the sphere is the suffix. Interior vertices
/// carry their full-network neighbor lists; sphere vertices only carry edges
/// back into the interior (edges between two sphere vertices are not part of
/// the ball).
class Ball {
public:
    struct Arc {
        std::size_t target;
        double conductance;
    };

    int radius() const noexcept { return radius_; }
    bool exhausted() const noexcept { return sphere_size() == 0; }

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t interior_size() const noexcept { return interior_size_; }
    std::size_t sphere_size() const noexcept { return labels_.size() - interior_size_; }
    static constexpr std::size_t root_index() noexcept { return 0; }

    bool is_interior(std::size_t i) const noexcept { return i < interior_size_; }
    bool is_sphere(std::size_t i) const noexcept { return i >= interior_size_ && i < size(); }

    const VertexId& label(std::size_t i) const { return labels_.at(i); }
    std::optional<std::size_t> find(const VertexId& v) const;
    /// Throws VertexOutsideBall.
    std::size_t index_of(const VertexId& v) const;

    int depth(std::size_t i) const { return depth_.at(i); }

    std::span<const Arc> arcs(std::size_t i) const {
        return {arcs_.data() + offsets_[i], arcs_.data() + offsets_[i + 1]};
    }

    /// c_x. Equals the full-network value on the interior; on the sphere it is
    /// the total conductance of the ball edges at x.
    double conductance_sum(std::size_t i) const { return csum_.at(i); }

    /// Conductance of edge {i, j} inside the ball, 0 if absent.
    double conductance(std::size_t i, std::size_t j) const;

    /// Indices at exact distance d (d <= radius).
    std::vector<std::size_t> layer(int d) const;

    /// Indices of the sphere, in index order.
    std::vector<std::size_t> sphere() const;

    const std::string& network_hash() const noexcept { return network_hash_; }
    const VertexId& root() const { return labels_.front(); }

    /// Stable identifier of (network, radius).
    std::string hash() const;

    friend Ball extract_ball(const NetworkSource& source, int radius);

private:
    int radius_ = 0;
    std::size_t interior_size_ = 0;
    std::vector<VertexId> labels_;
    std::vector<int> depth_;
    std::vector<std::size_t> offsets_;
    std::vector<Arc> arcs_;
    std::vector<double> csum_;
    std::unordered_map<VertexId, std::size_t> index_;
    std::string network_hash_;
};

/// Extract B(o,R). R >= 1. For finite networks of eccentricity < R the sphere
/// is empty and the ball is the whole network.
Ball extract_ball(const NetworkSource& source, int radius);

inline std::shared_ptr<const Ball> make_ball(const NetworkSource& source, int radius) {
    return std::make_shared<const Ball>(extract_ball(source, radius));
}

/// Largest distance from the root if the network is finite and within
/// `limit`, empty otherwise.
std::optional<int> eccentricity(const NetworkSource& source, int limit);

/// Δf(v) = Σ_{x~v} c_{vx}(f(x) - f(v)). `f` is indexed by ball index.
/// Throws VertexNotInterior unless v is interior.
double laplacian_apply(const Ball& ball, std::span<const double> f, std::size_t v);
double laplacian_apply(const Ball& ball, std::span<const double> f, const VertexId& v);

/// Probability p(x,y) of the network walk, using ball conductances.
double transition_probability(const Ball& ball, std::size_t x, std::size_t y);

} // namespace netpot
