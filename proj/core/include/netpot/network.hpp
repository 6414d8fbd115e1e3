#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace netpot {

/// Opaque vertex label. Explicit networks use their own labels; generated
/// networks use canonical coordinate strings such as "3", "(-2,5)", "L4.N7".
/// Ordering is lexicographic on the label.
class VertexId {
public:
    VertexId() = default;
    explicit VertexId(std::string label) : label_(std::move(label)) {}

    const std::string& label() const noexcept { return label_; }

    auto operator<=>(const VertexId&) const = default;
    bool operator==(const VertexId&) const = default;

private:
    std::string label_;
};

struct Neighbor {
    VertexId vertex;
    double conductance;
};

struct Edge {
    VertexId u;
    VertexId v;
    double conductance;
};

/// Neighbor oracle. Implementations are pure functions of the label and
/// return neighbor lists sorted by label.
class NeighborOracle {
public:
    virtual ~NeighborOracle() = default;
    virtual bool contains(const VertexId& v) const = 0;
    virtual std::vector<Neighbor> neighbors(const VertexId& v) const = 0;
};

enum class SourceKind { ExplicitFinite, Generator };

enum class GeneratorKind { Line, Grid2d, Tree, Ladder, RandomConductanceGrid };

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::Line;
    // line: constant conductance, or a periodic pattern indexed by the left
    // endpoint of edge (n, n+1) when `period` is nonempty.
    double conductance = 1.0;
    std::vector<double> period;
    // tree: branching b and level factor; edges into level n carry lambda^n.
    int branching = 2;
    double lambda = 1.0;
    // random-conductance-grid: conductances uniform in [cmin, cmax].
    std::uint64_t seed = 0;
    double cmin = 0.5;
    double cmax = 2.0;
};

/// A rooted network, either an explicit finite edge list or a lazily
/// generated infinite family. Immutable and safe to share across threads.
class NetworkSource {
public:
    NetworkSource(SourceKind kind, VertexId root, std::shared_ptr<const NeighborOracle> oracle,
                  nlohmann::json descriptor, std::string name, std::string recurrence_note);

    SourceKind kind() const noexcept { return kind_; }
    const VertexId& root() const noexcept { return root_; }
    const std::string& name() const noexcept { return name_; }
    const std::string& recurrence_note() const noexcept { return recurrence_note_; }

    bool contains(const VertexId& v) const { return oracle_->contains(v); }
    std::vector<Neighbor> neighbors(const VertexId& v) const;

    /// The `netpot-v1` document this network was built from.
    const nlohmann::json& descriptor() const noexcept { return descriptor_; }

    /// SHA-256 (hex) of the canonical serialization of the descriptor.
    const std::string& content_hash() const noexcept { return hash_; }

private:
    SourceKind kind_;
    VertexId root_;
    std::shared_ptr<const NeighborOracle> oracle_;
    nlohmann::json descriptor_;
    std::string name_;
    std::string recurrence_note_;
    std::string hash_;
};

/// Explicit finite network. Parallel edges are merged by adding conductances.
/// Throws NonPositiveConductance, SelfLoop, RootAbsent, Disconnected.
NetworkSource build_network(const std::vector<Edge>& edges, const VertexId& root);

/// Procedural network rooted at the family's default root; throws
/// InvalidSpec on bad parameters.
NetworkSource generate(const GeneratorSpec& spec);
NetworkSource generate(const GeneratorSpec& spec, const VertexId& root);

/// Random connected finite network on at most `max_vertices` vertices
/// (at least 4): a random tree biased towards recent vertices plus extra
/// edges, conductances log-uniform in [0.1, 10]. Deterministic in
/// (seed, index); the root is "v0".
NetworkSource random_network(std::uint64_t seed, int index, int max_vertices = 60);

/// Default root of a generator family.
VertexId generator_root(GeneratorKind kind);

std::string generator_kind_name(GeneratorKind kind);
GeneratorKind parse_generator_kind(const std::string& name);

/// `netpot-v1` JSON round trip.
NetworkSource network_from_json(const nlohmann::json& doc);
nlohmann::json network_to_json(const NetworkSource& net);
NetworkSource load_network(const std::string& path);

} // namespace netpot

template <>
struct std::hash<netpot::VertexId> {
    std::size_t operator()(const netpot::VertexId& v) const noexcept {
        return std::hash<std::string>{}(v.label());
    }
};
