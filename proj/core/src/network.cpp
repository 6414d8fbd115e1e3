#include "netpot/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "netpot/errors.hpp"
#include "netpot/hash.hpp"

namespace netpot {

NetworkSource::NetworkSource(SourceKind kind, VertexId root,
                             std::shared_ptr<const NeighborOracle> oracle,
                             nlohmann::json descriptor, std::string name,
                             std::string recurrence_note)
    : kind_(kind),
      root_(std::move(root)),
      oracle_(std::move(oracle)),
      descriptor_(std::move(descriptor)),
      name_(std::move(name)),
      recurrence_note_(std::move(recurrence_note)),
      hash_(sha256_hex(descriptor_.dump())) {
    if (!oracle_->contains(root_))
        throw Error(Errc::RootAbsent, "root '" + root_.label() + "' is not a vertex");
    if (oracle_->neighbors(root_).empty())
        throw Error(Errc::RootAbsent, "root '" + root_.label() + "' has no neighbors");
}

std::vector<Neighbor> NetworkSource::neighbors(const VertexId& v) const {
    return oracle_->neighbors(v);
}

namespace {

class ExplicitOracle final : public NeighborOracle {
public:
    explicit ExplicitOracle(std::unordered_map<VertexId, std::vector<Neighbor>> adj)
        : adj_(std::move(adj)) {}

    bool contains(const VertexId& v) const override { return adj_.count(v) != 0; }

    std::vector<Neighbor> neighbors(const VertexId& v) const override {
        auto it = adj_.find(v);
        if (it == adj_.end())
            throw Error(Errc::UnknownVertex, "vertex '" + v.label() + "' not in network");
        return it->second;
    }

private:
    std::unordered_map<VertexId, std::vector<Neighbor>> adj_;
};

std::string format_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace

NetworkSource build_network(const std::vector<Edge>& edges, const VertexId& root) {
    if (edges.empty())
        throw Error(Errc::InvalidArgument, "edge list is empty");

    std::map<std::pair<VertexId, VertexId>, double> merged;
    for (const auto& e : edges) {
        if (!(e.conductance > 0.0) || !std::isfinite(e.conductance))
            throw Error(Errc::NonPositiveConductance,
                        "edge (" + e.u.label() + "," + e.v.label() + ") has conductance " +
                            format_double(e.conductance));
        if (e.u == e.v)
            throw Error(Errc::SelfLoop, "self-loop at '" + e.u.label() + "'");
        auto key = e.u < e.v ? std::make_pair(e.u, e.v) : std::make_pair(e.v, e.u);
        merged[key] += e.conductance;
    }

    std::unordered_map<VertexId, std::vector<Neighbor>> adj;
    for (const auto& [key, c] : merged) {
        adj[key.first].push_back({key.second, c});
        adj[key.second].push_back({key.first, c});
    }
    if (adj.count(root) == 0)
        throw Error(Errc::RootAbsent, "root '" + root.label() + "' appears in no edge");
    for (auto& [v, list] : adj)
        std::sort(list.begin(), list.end(),
                  [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });

    std::unordered_set<VertexId> seen{root};
    std::deque<VertexId> queue{root};
    while (!queue.empty()) {
        VertexId v = std::move(queue.front());
        queue.pop_front();
        for (const auto& nb : adj[v])
            if (seen.insert(nb.vertex).second)
                queue.push_back(nb.vertex);
    }
    if (seen.size() != adj.size())
        throw Error(Errc::Disconnected, std::to_string(adj.size() - seen.size()) +
                                            " vertices unreachable from root '" + root.label() +
                                            "'");

    nlohmann::json edge_list = nlohmann::json::array();
    for (const auto& [key, c] : merged)
        edge_list.push_back({key.first.label(), key.second.label(), c});
    nlohmann::json descriptor = {
        {"format", "netpot-v1"}, {"root", root.label()}, {"edges", std::move(edge_list)}};

    return NetworkSource(SourceKind::ExplicitFinite, root,
                         std::make_shared<const ExplicitOracle>(std::move(adj)),
                         std::move(descriptor), "explicit",
                         "finite network (recurrent; admits no potential)");
}

namespace {

VertexId json_label(const nlohmann::json& j) {
    if (j.is_string())
        return VertexId(j.get<std::string>());
    if (j.is_number_integer())
        return VertexId(std::to_string(j.get<long long>()));
    throw Error(Errc::InvalidFormat, "vertex labels must be strings");
}

GeneratorSpec spec_from_json(const nlohmann::json& gen) {
    if (!gen.is_object() || !gen.contains("kind") || !gen["kind"].is_string())
        throw Error(Errc::InvalidFormat, "generator needs a string 'kind'");
    GeneratorSpec spec;
    spec.kind = parse_generator_kind(gen["kind"].get<std::string>());
    const nlohmann::json params = gen.value("params", nlohmann::json::object());
    if (!params.is_object())
        throw Error(Errc::InvalidFormat, "generator 'params' must be an object");
    try {
        spec.conductance = params.value("conductance", spec.conductance);
        if (params.contains("period"))
            spec.period = params["period"].get<std::vector<double>>();
        spec.branching = params.value("branching", spec.branching);
        spec.lambda = params.value("lambda", spec.lambda);
        spec.cmin = params.value("cmin", spec.cmin);
        spec.cmax = params.value("cmax", spec.cmax);
        if (gen.contains("seed"))
            spec.seed = gen["seed"].get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidFormat, std::string("generator params: ") + e.what());
    }
    return spec;
}

} // namespace

NetworkSource network_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || doc.value("format", std::string()) != "netpot-v1")
        throw Error(Errc::InvalidFormat, "expected an object with format \"netpot-v1\"");
    if (!doc.contains("root"))
        throw Error(Errc::InvalidFormat, "missing 'root'");
    const VertexId root = json_label(doc["root"]);
    const bool has_edges = doc.contains("edges");
    const bool has_gen = doc.contains("generator");
    if (has_edges == has_gen)
        throw Error(Errc::InvalidFormat, "exactly one of 'edges' or 'generator' is required");

    if (has_gen)
        return generate(spec_from_json(doc["generator"]), root);

    const auto& list = doc["edges"];
    if (!list.is_array())
        throw Error(Errc::InvalidFormat, "'edges' must be an array");
    std::vector<Edge> edges;
    edges.reserve(list.size());
    for (const auto& e : list) {
        if (!e.is_array() || e.size() != 3 || !e[2].is_number())
            throw Error(Errc::InvalidFormat, "each edge must be [u, v, conductance]");
        edges.push_back({json_label(e[0]), json_label(e[1]), e[2].get<double>()});
    }
    return build_network(edges, root);
}

nlohmann::json network_to_json(const NetworkSource& net) { return net.descriptor(); }

NetworkSource load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::Io, "cannot open network file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidFormat, "'" + path + "': " + e.what());
    }
    return network_from_json(doc);
}

} // namespace netpot
