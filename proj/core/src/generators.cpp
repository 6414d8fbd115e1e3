#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "netpot/errors.hpp"
#include "netpot/hash.hpp"
#include "netpot/network.hpp"

namespace netpot {

namespace {

std::optional<long long> parse_int(std::string_view s) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        return std::nullopt;
    if (std::to_string(value) != s)  // rejects "+1", "01", "-0"
        return std::nullopt;
    return value;
}

std::optional<std::pair<long long, long long>> parse_pair(const std::string& label) {
    if (label.size() < 5 || label.front() != '(' || label.back() != ')')
        return std::nullopt;
    const auto comma = label.find(',');
    if (comma == std::string::npos)
        return std::nullopt;
    auto x = parse_int(std::string_view(label).substr(1, comma - 1));
    auto y = parse_int(std::string_view(label).substr(comma + 1, label.size() - comma - 2));
    if (!x || !y)
        return std::nullopt;
    return std::make_pair(*x, *y);
}

std::string pair_label(long long x, long long y) {
    return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
}

void sort_by_label(std::vector<Neighbor>& list) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
}

[[noreturn]] void unknown(const VertexId& v) {
    throw Error(Errc::UnknownVertex, "'" + v.label() + "' is not a vertex of this network");
}

class LineOracle final : public NeighborOracle {
public:
    LineOracle(double conductance, std::vector<double> period)
        : conductance_(conductance), period_(std::move(period)) {}

    bool contains(const VertexId& v) const override { return parse_int(v.label()).has_value(); }

    std::vector<Neighbor> neighbors(const VertexId& v) const override {
        auto n = parse_int(v.label());
        if (!n)
            unknown(v);
        std::vector<Neighbor> out{{VertexId(std::to_string(*n - 1)), edge(*n - 1)},
                                  {VertexId(std::to_string(*n + 1)), edge(*n)}};
        sort_by_label(out);
        return out;
    }

private:
    // conductance of edge (n, n+1)
    double edge(long long n) const {
        if (period_.empty())
            return conductance_;
        const auto len = static_cast<long long>(period_.size());
        return period_[static_cast<std::size_t>(((n % len) + len) % len)];
    }

    double conductance_;
    std::vector<double> period_;
};

class GridOracle : public NeighborOracle {
public:
    bool contains(const VertexId& v) const override { return parse_pair(v.label()).has_value(); }

    std::vector<Neighbor> neighbors(const VertexId& v) const override {
        auto p = parse_pair(v.label());
        if (!p)
            unknown(v);
        const auto [x, y] = *p;
        std::vector<Neighbor> out;
        out.reserve(4);
        for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            VertexId w(pair_label(x + dx, y + dy));
            const double c = edge_conductance(v, w);
            out.push_back({std::move(w), c});
        }
        sort_by_label(out);
        return out;
    }

protected:
    virtual double edge_conductance(const VertexId&, const VertexId&) const { return 1.0; }
};

class RandomGridOracle final : public GridOracle {
public:
    RandomGridOracle(std::uint64_t seed, double cmin, double cmax)
        : seed_(seed), cmin_(cmin), cmax_(cmax) {}

protected:
    double edge_conductance(const VertexId& a, const VertexId& b) const override {
        const std::string key = a < b ? a.label() + "|" + b.label() : b.label() + "|" + a.label();
        const std::uint64_t bits = splitmix64(seed_ ^ fnv1a64(key));
        const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
        return cmin_ + (cmax_ - cmin_) * u;
    }

private:
    std::uint64_t seed_;
    double cmin_;
    double cmax_;
};

class LadderOracle final : public NeighborOracle {
public:
    bool contains(const VertexId& v) const override {
        auto p = parse_pair(v.label());
        return p && (p->second == 0 || p->second == 1);
    }

    std::vector<Neighbor> neighbors(const VertexId& v) const override {
        if (!contains(v))
            unknown(v);
        const auto [x, y] = *parse_pair(v.label());
        std::vector<Neighbor> out{{VertexId(pair_label(x - 1, y)), 1.0},
                                  {VertexId(pair_label(x + 1, y)), 1.0},
                                  {VertexId(pair_label(x, 1 - y)), 1.0}};
        sort_by_label(out);
        return out;
    }
};

// Vertices "L<n>.N<k>", 0 <= k < b^n; the children of L<n>.N<k> are
// L<n+1>.N<bk+j>, and the edge into level n+1 carries lambda^(n+1).
class TreeOracle final : public NeighborOracle {
public:
    TreeOracle(int branching, double lambda) : b_(branching), lambda_(lambda) {}

    bool contains(const VertexId& v) const override { return parse(v).has_value(); }

    std::vector<Neighbor> neighbors(const VertexId& v) const override {
        auto node = parse(v);
        if (!node)
            unknown(v);
        const auto [level, k] = *node;
        std::vector<Neighbor> out;
        if (level > 0)
            out.push_back({label(level - 1, k / b_), std::pow(lambda_, level)});
        if (level < max_level_) {
            for (int j = 0; j < b_; ++j)
                out.push_back({label(level + 1, k * b_ + j), std::pow(lambda_, level + 1)});
        }
        sort_by_label(out);
        return out;
    }

private:
    static VertexId label(long long level, unsigned long long k) {
        return VertexId("L" + std::to_string(level) + ".N" + std::to_string(k));
    }

    std::optional<std::pair<long long, unsigned long long>> parse(const VertexId& v) const {
        const std::string& s = v.label();
        const auto dot = s.find(".N");
        if (s.size() < 5 || s[0] != 'L' || dot == std::string::npos)
            return std::nullopt;
        auto level = parse_int(std::string_view(s).substr(1, dot - 1));
        auto k = parse_int(std::string_view(s).substr(dot + 2));
        if (!level || !k || *level < 0 || *k < 0 || *level > max_level_)
            return std::nullopt;
        unsigned long long width = 1;
        for (long long i = 0; b_ > 1 && i < *level; ++i)
            width *= static_cast<unsigned long long>(b_);
        if (static_cast<unsigned long long>(*k) >= width)
            return std::nullopt;
        return std::make_pair(*level, static_cast<unsigned long long>(*k));
    }

    int b_;
    double lambda_;
    // deepest level whose index range fits in 63 bits
    long long max_level_ = [this] {
        if (b_ == 1)
            return std::numeric_limits<long long>::max() - 1;
        long long depth = 0;
        unsigned long long width = 1;
        while (width <= (std::numeric_limits<unsigned long long>::max() >> 1) /
                            static_cast<unsigned long long>(b_)) {
            width *= static_cast<unsigned long long>(b_);
            ++depth;
        }
        return depth - 1;
    }();
};

void require(bool ok, const std::string& what) {
    if (!ok)
        throw Error(Errc::InvalidSpec, what);
}

} // namespace

std::string generator_kind_name(GeneratorKind kind) {
    switch (kind) {
    case GeneratorKind::Line: return "line";
    case GeneratorKind::Grid2d: return "grid2d";
    case GeneratorKind::Tree: return "tree";
    case GeneratorKind::Ladder: return "ladder";
    case GeneratorKind::RandomConductanceGrid: return "random-conductance-grid";
    }
    return "unknown";
}

GeneratorKind parse_generator_kind(const std::string& name) {
    for (auto k : {GeneratorKind::Line, GeneratorKind::Grid2d, GeneratorKind::Tree,
                   GeneratorKind::Ladder, GeneratorKind::RandomConductanceGrid})
        if (generator_kind_name(k) == name)
            return k;
    throw Error(Errc::InvalidSpec, "unknown generator kind '" + name + "'");
}

VertexId generator_root(GeneratorKind kind) {
    switch (kind) {
    case GeneratorKind::Line: return VertexId("0");
    case GeneratorKind::Tree: return VertexId("L0.N0");
    default: return VertexId("(0,0)");
    }
}

NetworkSource generate(const GeneratorSpec& spec) { return generate(spec, generator_root(spec.kind)); }

NetworkSource generate(const GeneratorSpec& spec, const VertexId& root) {
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json gen = {{"kind", generator_kind_name(spec.kind)}};
    std::shared_ptr<const NeighborOracle> oracle;
    std::string note;

    switch (spec.kind) {
    case GeneratorKind::Line:
        require(spec.conductance > 0.0 && std::isfinite(spec.conductance),
                "line conductance must be positive");
        for (double c : spec.period)
            require(c > 0.0 && std::isfinite(c), "line period conductances must be positive");
        if (spec.period.empty())
            params["conductance"] = spec.conductance;
        else
            params["period"] = spec.period;
        oracle = std::make_shared<LineOracle>(spec.conductance, spec.period);
        note = "recurrent: bounded conductances on Z";
        break;
    case GeneratorKind::Grid2d:
        oracle = std::make_shared<GridOracle>();
        note = "recurrent: simple random walk on Z^2";
        break;
    case GeneratorKind::Ladder:
        oracle = std::make_shared<LadderOracle>();
        note = "recurrent: Z x {0,1}";
        break;
    case GeneratorKind::Tree: {
        require(spec.branching >= 1, "tree branching must be >= 1");
        require(spec.lambda > 0.0 && std::isfinite(spec.lambda), "tree lambda must be > 0");
        params["branching"] = spec.branching;
        params["lambda"] = spec.lambda;
        oracle = std::make_shared<TreeOracle>(spec.branching, spec.lambda);
        const double level_factor = spec.branching * spec.lambda;
        note = level_factor <= 1.0 ? "recurrent: level resistances (b*lambda)^-n do not sum"
                                   : "transient: level resistances (b*lambda)^-n are summable";
        break;
    }
    case GeneratorKind::RandomConductanceGrid:
        require(spec.cmin > 0.0 && std::isfinite(spec.cmax) && spec.cmax >= spec.cmin,
                "random conductance range must satisfy 0 < cmin <= cmax");
        params["cmin"] = spec.cmin;
        params["cmax"] = spec.cmax;
        gen["seed"] = spec.seed;
        oracle = std::make_shared<RandomGridOracle>(spec.seed, spec.cmin, spec.cmax);
        note = "recurrent: Z^2 with conductances bounded away from 0 and infinity";
        break;
    }
    gen["params"] = std::move(params);

    if (!oracle->contains(root))
        throw Error(Errc::RootAbsent, "'" + root.label() + "' is not a vertex of " +
                                          generator_kind_name(spec.kind));
    nlohmann::json descriptor = {
        {"format", "netpot-v1"}, {"root", root.label()}, {"generator", std::move(gen)}};
    return NetworkSource(SourceKind::Generator, root, std::move(oracle), std::move(descriptor),
                         generator_kind_name(spec.kind), std::move(note));
}

NetworkSource random_network(std::uint64_t seed, int index, int max_vertices) {
    if (max_vertices < 4)
        throw Error(Errc::InvalidSpec, "random networks need at least 4 vertices");
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index))));
    const int n = std::uniform_int_distribution<int>(std::max(4, max_vertices / 3), max_vertices)(rng);
    std::uniform_real_distribution<double> log_c(std::log(0.1), std::log(10.0));
    auto name = [](int k) { return VertexId("v" + std::to_string(k)); };
    std::vector<Edge> edges;
    for (int k = 1; k < n; ++k) {
        const int parent = std::uniform_int_distribution<int>(std::max(0, k - 3), k - 1)(rng);
        edges.push_back({name(parent), name(k), std::exp(log_c(rng))});
    }
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int e = 0; e < n / 4; ++e) {
        const int a = pick(rng), b = pick(rng);
        if (a != b)
            edges.push_back({name(a), name(b), std::exp(log_c(rng))});
    }
    return build_network(edges, name(0));
}

} // namespace netpot
