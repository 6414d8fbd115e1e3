#include "commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <thread>

#include "cache.hpp"
#include "netpot/doob.hpp"
#include "netpot/errors.hpp"
#include "netpot/escape.hpp"
#include "netpot/green.hpp"
#include "netpot/hash.hpp"
#include "netpot/minimax.hpp"
#include "netpot/network.hpp"
#include "netpot/reference.hpp"
#include "netpot/serialize.hpp"
#include "netpot/solver.hpp"
#include "netpot/verify.hpp"

namespace netpot::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Global {
    double tol_solve = 1e-10;
    double tol_identity = 1e-9;
    double tol_gap = 1e-8;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string cache_dir;
    bool no_cache = false;

    Tolerances tol() const { return {tol_solve, tol_identity, tol_gap}; }
};

std::string num(double x) { return format_number(x); }

std::string timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

// Runs one command through the cache and writes its outputs.
class Runner {
public:
    Runner(const Global& g, std::string command) : g_(g), command_(std::move(command)) {}

    json params;
    std::string network_hash;
    bool cacheable = true;

    /// Embedded in every JSON output; identical across reruns.
    json meta() const {
        return {{"tool", "netpot"},       {"version", kVersion},
                {"command", command_},    {"params", params},
                {"tolerances", to_json(g_.tol())}, {"network_hash", network_hash}};
    }

    Outputs run(const std::function<Outputs()>& compute) {
        if (!cacheable || g_.no_cache)
            return compute();
        ResultCache cache(g_.cache_dir.empty() ? ResultCache::default_dir() : fs::path(g_.cache_dir));
        json key_params = params;
        key_params["tolerances"] = to_json(g_.tol());
        const std::string key = ResultCache::key(network_hash, command_, key_params);
        if (auto hit = cache.load(key)) {
            hit_ = true;
            std::cerr << "cache hit " << key << '\n';
            return *hit;
        }
        Outputs out = compute();
        cache.store(key, out);
        return out;
    }

    /// role -> path; "out" with an empty path goes to standard output.
    void emit(const Outputs& outputs, const std::map<std::string, std::string>& paths) const {
        for (const auto& [role, path] : paths) {
            auto it = outputs.find(role);
            if (it == outputs.end())
                continue;
            if (path.empty()) {
                if (role == "out")
                    std::cout << it->second;
                continue;
            }
            write_file_atomic(path, it->second);
            json side = meta();
            side["created"] = timestamp();
            side["cache"] = hit_ ? "hit" : "miss";
            side["threads"] = g_.threads;
            side["role"] = role;
            if (auto note = outputs.find(role + ".note"); note != outputs.end())
                side["note"] = json::parse(note->second);
            write_file_atomic(path + ".meta.json", side.dump(2) + "\n");
        }
    }

private:
    const Global& g_;
    std::string command_;
    bool hit_ = false;
};

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

VertexId vertex(const std::string& label) { return VertexId(label); }

struct PotentialArgs {
    std::string potential;
    std::string reference;
    int radius = 0;

    void add(CLI::App* app) {
        app->add_option("--potential", potential, "Potential JSON (netpot-potential-v1)");
        app->add_option("--reference", reference, "Built-in potential: x+ (line) or grid-kernel (grid2d)")
            ->check(CLI::IsMember({"x+", "grid-kernel"}));
        app->add_option("--h-radius", radius, "Ball radius for --reference");
    }

    json describe() const {
        if (!potential.empty())
            return {{"potential", sha256_hex(read_file(potential))}};
        return {{"reference", reference}, {"h_radius", radius}};
    }

    PotentialOnBall load(const NetworkSource& net, Tolerances tol) const {
        if (potential.empty() == reference.empty())
            throw UsageError("exactly one of --potential and --reference is required");
        if (!potential.empty())
            return potential_on_network(potential_from_json(json::parse(read_file(potential))), net, tol);
        if (radius < 1)
            throw UsageError("--reference needs --h-radius >= 1");
        auto ball = make_ball(net, radius);
        return reference == "x+" ? line_positive_part(ball, tol) : grid_reference_potential(ball, tol);
    }
};

std::vector<int> doubling_radii(int rmin, int rmax) {
    if (rmin < 1 || rmax < rmin)
        throw UsageError("need 1 <= rmin <= rmax");
    std::vector<int> radii;
    for (long r = rmin; r <= rmax; r *= 2)
        radii.push_back(static_cast<int>(r));
    if (radii.back() != rmax)
        radii.push_back(rmax);
    return radii;
}

Measure parse_targets(const Ball& ball, const std::vector<std::string>& tokens) {
    if (tokens.empty())
        throw UsageError("no targets given");
    Measure eta;
    bool weighted = false;
    for (const auto& t : tokens) {
        const auto colon = t.rfind(':');
        double w = 1.0;
        std::string label = t;
        if (colon != std::string::npos) {
            label = t.substr(0, colon);
            w = std::stod(t.substr(colon + 1));
            weighted = true;
        }
        eta.emplace_back(ball.index_of(vertex(label)), w);
    }
    if (!weighted)
        for (auto& e : eta)
            e.second = 1.0 / static_cast<double>(eta.size());
    return eta;
}

// Measure from a JSON file with {"values": {label: weight}} or a flat map.
Measure load_measure(const Ball& ball, const std::string& path) {
    const auto doc = json::parse(read_file(path));
    const json& values = doc.contains("values") ? doc.at("values") : doc;
    Measure eta;
    for (const auto& [label, w] : values.items())
        if (w.get<double>() != 0.0)
            eta.emplace_back(ball.index_of(vertex(label)), w.get<double>());
    return eta;
}

// ---------------------------------------------------------------------------

void add_gen(CLI::App& app, const Global& g) {
    auto* cmd = app.add_subcommand("gen", "Write a network JSON document");
    struct Args {
        std::string kind, out, root;
        GeneratorSpec spec;
        int index = 0, max_vertices = 60;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--kind", a->kind, "line|grid2d|tree|ladder|random-conductance-grid|random-finite")
        ->required();
    cmd->add_option("--conductance", a->spec.conductance);
    cmd->add_option("--period", a->spec.period)->delimiter(',');
    cmd->add_option("--branching", a->spec.branching);
    cmd->add_option("--lambda", a->spec.lambda);
    cmd->add_option("--seed", a->spec.seed);
    cmd->add_option("--cmin", a->spec.cmin);
    cmd->add_option("--cmax", a->spec.cmax);
    cmd->add_option("--root", a->root);
    cmd->add_option("--index", a->index, "random-finite: network index");
    cmd->add_option("--max-vertices", a->max_vertices, "random-finite: vertex bound");
    cmd->add_option("--out", a->out);
    cmd->callback([a, &g] {
        Runner run(g, "gen");
        run.cacheable = false;
        std::optional<NetworkSource> net;
        if (a->kind == "random-finite") {
            net.emplace(random_network(a->spec.seed, a->index, a->max_vertices));
        } else {
            GeneratorSpec spec = a->spec;
            try {
                spec.kind = parse_generator_kind(a->kind);
            } catch (const Error&) {
                throw UsageError("unknown generator kind '" + a->kind + "'");
            }
            net.emplace(a->root.empty() ? generate(spec) : generate(spec, vertex(a->root)));
        }
        run.network_hash = net->content_hash();
        run.emit({{"out", dump(network_to_json(*net))}}, {{"out", a->out}});
    });
}

void add_green(CLI::App& app, const Global& g) {
    auto* cmd = app.add_subcommand("green", "Green density along an exhaustion");
    struct Args {
        std::string net, x, y, out;
        std::vector<int> radii;
        double tol = 1e-9;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--net", a->net)->required();
    cmd->add_option("--x", a->x)->required();
    cmd->add_option("--y", a->y)->required();
    cmd->add_option("--radii", a->radii)->delimiter(',')->required();
    cmd->add_option("--tol", a->tol, "Convergence threshold on the last increment");
    cmd->add_option("--out", a->out);
    cmd->callback([a, &g] {
        const auto net = load_network(a->net);
        Runner run(g, "green");
        run.network_hash = net.content_hash();
        run.params = {{"x", a->x}, {"y", a->y}, {"radii", a->radii}, {"tol", a->tol}};
        const auto out = run.run([&] {
            const auto rep = exhaustion_limit(net, vertex(a->x), vertex(a->y), a->radii, a->tol, g.tol());
            CsvWriter csv({"R", "g_value", "delta"});
            for (const auto& s : rep.steps)
                csv.row({std::to_string(s.radius), num(s.value), num(s.delta)});
            const json note = {{"estimate", rep.estimate}, {"last_delta", rep.last_delta},
                               {"converged", rep.converged}};
            return Outputs{{"out", csv.str()}, {"out.note", note.dump()}};
        });
        run.emit(out, {{"out", a->out}});
    });
}

void add_dipole(CLI::App& app, const Global& g) {
    auto* cmd = app.add_subcommand("dipole", "Dipole mixture g(., eta) on a ball");
    struct Args {
        std::string net, out;
        int radius = 0;
        std::vector<std::string> targets;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--net", a->net)->required();
    cmd->add_option("--R", a->radius)->required();
    cmd->add_option("--targets", a->targets, "label[:weight],... (uniform without weights)")
        ->delimiter(',')
        ->required();
    cmd->add_option("--out", a->out);
    cmd->callback([a, &g] {
        const auto net = load_network(a->net);
        Runner run(g, "dipole");
        run.network_hash = net.content_hash();
        run.params = {{"R", a->radius}, {"targets", a->targets}};
        const auto out = run.run([&] {
            GreenOperator op(make_ball(net, a->radius), SphereBoundary::Reflecting, g.tol());
            const Ball& ball = op.ball();
            const Measure eta = parse_targets(ball, a->targets);
            const auto f = dipole_mixture(op, eta);
            json values = json::object();
            for (std::size_t i = 0; i < ball.size(); ++i)
                values[ball.label(i).label()] = f[i];
            const json doc = {{"format", "netpot-dipole-v1"},
                              {"ball", {{"root", ball.root().label()}, {"R", ball.radius()},
                                        {"network_hash", ball.network_hash()}}},
                              {"eta", labelled(ball, eta)},
                              {"values", values},
                              {"meta", run.meta()}};
            return Outputs{{"out", dump(doc)}};
        });
        run.emit(out, {{"out", a->out}});
    });
}

void add_minimax(CLI::App& app, const Global& g) {
    auto* cmd = app.add_subcommand("minimax", "Solve M_R(r) with a certified dual");
    struct Args {
        std::string net, out, psi, eta;
        int r = 0, R = 0;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--net", a->net)->required();
    cmd->add_option("--r", a->r)->required();
    cmd->add_option("--R", a->R)->required();
    cmd->add_option("--emit-psi", a->psi);
    cmd->add_option("--emit-eta", a->eta);
    cmd->add_option("--out", a->out);
    cmd->callback([a, &g] {
        if (a->r < 1 || a->R <= a->r)
            throw UsageError("need 1 <= r < R");
        const auto net = load_network(a->net);
        Runner run(g, "minimax");
        run.network_hash = net.content_hash();
        run.params = {{"r", a->r}, {"R", a->R}};
        const auto out = run.run([&] {
            GreenOperator op(make_ball(net, a->R), SphereBoundary::Absorbing, g.tol());
            const auto res = solve_minimax(op, a->r);
            json m = run.meta();
            m["solver"] = "dense simplex (Dantzig, Bland fallback)";
            m["ball_hash"] = op.ball().hash();
            const json summary = {{"r", a->r},
                                  {"R", a->R},
                                  {"value", res.value},
                                  {"primal", res.primal},
                                  {"dual", res.dual},
                                  {"gap", res.gap},
                                  {"certified", res.certified},
                                  {"iterations", res.iterations},
                                  {"degenerate", res.degenerate},
                                  {"multiple_optima", res.multiple_optima},
                                  {"meta", m}};
            json eta = {{"format", "netpot-measure-v1"},
                        {"values", labelled(op.ball(), res.eta.as_measure())},
                        {"meta", m}};
            return Outputs{{"out", dump(summary)},
                           {"psi", dump(potential_to_json(*res.psi, m))},
                           {"eta", dump(eta)}};
        });
        run.emit(out, {{"out", a->out}, {"psi", a->psi}, {"eta", a->eta}});
    });
}

void add_mcurve(CLI::App& app, const Global& g) {
    auto* cmd = app.add_subcommand("mcurve", "M(r) over doubling radii");
    struct Args {
        std::string net, out;
        int rmin = 1, rmax = 16;
        double ratio = 2.0;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--net", a->net)->required();
    cmd->add_option("--rmin", a->rmin);
    cmd->add_option("--rmax", a->rmax);
    cmd->add_option("--ratio", a->ratio);
    cmd->add_option("--out", a->out);
    cmd->callback([a, &g] {
        const auto radii = doubling_radii(a->rmin, a->rmax);
        if (!(a->ratio > 1.0))
            throw UsageError("--ratio must exceed 1");
        const auto net = load_network(a->net);
        Runner run(g, "mcurve");
        run.network_hash = net.content_hash();
        run.params = {{"radii", radii}, {"ratio", a->ratio}};
        const auto out = run.run([&] {
            const auto curve = m_curve(net, radii, a->ratio, g.tol());
            CsvWriter csv({"r", "R", "M", "gap", "iters"});
            for (const auto& row : curve.rows)
                csv.row({std::to_string(row.r), std::to_string(row.R), num(row.value), num(row.gap),
                         std::to_string(row.iterations)});
            return Outputs{{"out", csv.str()}, {"out.note", json{{"monotone", curve.monotone}}.dump()}};
        });
        run.emit(out, {{"out", a->out}});
    });
}

json certificate_json(const EscapeResult& res, const json& meta) {
    json entries = json::array();
    for (const auto& e : res.certificate.entries)
        entries.push_back({{"n", e.n},
                           {"weight", e.weight},
                           {"radius", e.radius},
                           {"level", e.level},
                           {"minimax_value", e.minimax_value},
                           {"weighted_min", e.weighted_min},
                           {"sphere_pass", e.sphere_pass},
                           {"window_min", e.window_min},
                           {"window_pass", e.window_pass},
                           {"gap", e.gap}});
    return {{"format", "netpot-certificate-v1"},
            {"status", res.certificate.passed ? "passed" : "failed"},
            {"mode", res.schedule.mode == EscapeSchedule::Mode::Auto ? "auto" : "explicit"},
            {"window_radius", res.certificate.window_radius},
            {"mass", res.certificate.mass},
            {"entries", entries},
            {"meta", meta}};
}

void add_escape(CLI::App& app, const Global& g) {
    auto* cmd = app.add_subcommand("escape", "Build a potential tending to infinity on a window");
    struct Args {
        std::string net, out, cert;
        std::vector<double> levels, weights;
        std::vector<int> radii;
        int rmax = 100000;
        double ratio = 2.0;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--net", a->net)->required();
    cmd->add_option("--levels", a->levels)->delimiter(',')->required();
    cmd->add_option("--weights", a->weights, "Default 2^-n")->delimiter(',');
    cmd->add_option("--radii", a->radii, "Explicit schedule radii (skips the search)")->delimiter(',');
    cmd->add_option("--rmax", a->rmax);
    cmd->add_option("--ratio", a->ratio);
    cmd->add_option("--out", a->out);
    cmd->add_option("--cert", a->cert);
    cmd->callback([a, &g] {
        if (!a->radii.empty() && a->radii.size() != a->levels.size())
            throw UsageError("--radii and --levels differ in length");
        if (!a->weights.empty() && a->weights.size() != a->levels.size())
            throw UsageError("--weights and --levels differ in length");
        const auto net = load_network(a->net);
        Runner run(g, "escape");
        run.network_hash = net.content_hash();
        run.params = {{"levels", a->levels}, {"weights", a->weights}, {"radii", a->radii},
                      {"rmax", a->rmax},     {"ratio", a->ratio}};
        const auto out = run.run([&] {
            try {
                std::optional<EscapeResult> res;
                if (a->radii.empty()) {
                    AutoScheduleRequest req;
                    req.levels = a->levels;
                    req.weights = a->weights;
                    req.ratio = a->ratio;
                    req.r_max = a->rmax;
                    res.emplace(escape_construct(net, req, g.tol()));
                } else {
                    EscapeSchedule sched;
                    for (std::size_t n = 0; n < a->levels.size(); ++n)
                        sched.entries.push_back({a->weights.empty() ? std::ldexp(1.0, -static_cast<int>(n + 1))
                                                                    : a->weights[n],
                                                 a->radii[n], a->levels[n]});
                    res.emplace(escape_construct(net, sched, a->ratio, g.tol()));
                }
                return Outputs{{"out", dump(potential_to_json(res->h, run.meta()))},
                               {"cert", dump(certificate_json(*res, run.meta()))},
                               {"status", res->certificate.passed ? "passed" : "failed"}};
            } catch (const ScheduleInfeasibleError& e) {
                const json cert = {{"format", "netpot-certificate-v1"},
                                   {"status", "infeasible"},
                                   {"error", e.what()},
                                   {"level_index", e.n()},
                                   {"r_max", e.r_max()},
                                   {"target_M", e.target()},
                                   {"achievable_level", e.achievable_level()},
                                   {"best_computed_level", e.best_computed_level()},
                                   {"meta", run.meta()}};
                return Outputs{{"cert", dump(cert)}, {"status", "infeasible"}, {"error", e.what()}};
            }
        });
        run.emit(out, {{"out", a->out}, {"cert", a->cert}});
        const std::string status = out.at("status");
        if (status == "infeasible")
            throw Error(Errc::ScheduleInfeasible, out.at("error").substr(out.at("error").find(':') + 2));
        if (status != "passed")
            throw Error(Errc::IdentityViolation, "escape certificate failed");
    });
}

void add_sublevel(CLI::App& app, const Global& g) {
    auto* cmd = app.add_subcommand("sublevel", "Sizes of {h <= m} inside the window");
    struct Args {
        std::string potential, net, out;
        std::vector<double> levels;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--potential", a->potential)->required();
    cmd->add_option("--levels", a->levels)->delimiter(',')->required();
    cmd->add_option("--net", a->net, "Rebuild the ball from the network instead of stored distances");
    cmd->add_option("--out", a->out);
    cmd->callback([a, &g] {
        const auto file = potential_from_json(json::parse(read_file(a->potential)));
        Runner run(g, "sublevel");
        run.cacheable = false;
        run.network_hash = file.network_hash;
        run.params = {{"levels", a->levels}};
        std::vector<SublevelRow> rows;
        if (!a->net.empty()) {
            const auto net = load_network(a->net);
            rows = sublevel_report(potential_on_network(file, net, g.tol()), a->levels);
        } else {
            rows = sublevel_report(file, a->levels);
        }
        CsvWriter csv({"level", "count", "window_complete"});
        for (const auto& r : rows)
            csv.row({num(r.level), std::to_string(r.count), r.window_complete ? "true" : "false"});
        run.emit({{"out", csv.str()}}, {{"out", a->out}});
    });
}

void add_hsim(CLI::App& app, const Global& g) {
    auto* cmd = app.add_subcommand("hsim", "Escape statistic P^h(h(Y_l) > M)");
    struct Args {
        std::string net, out, mode = "exact", start;
        PotentialArgs h;
        long ell = 0;
        double level = 0.0;
        std::size_t samples = 100000;
        std::uint64_t seed = 42;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--net", a->net)->required();
    a->h.add(cmd);
    cmd->add_option("--ell", a->ell)->required();
    cmd->add_option("--M", a->level)->required();
    cmd->add_option("--mode", a->mode)->check(CLI::IsMember({"exact", "mc", "both"}));
    cmd->add_option("--samples", a->samples);
    cmd->add_option("--seed", a->seed);
    cmd->add_option("--start", a->start, "Start vertex (default: the initial law mu_h)");
    cmd->add_option("--out", a->out);
    cmd->callback([a, &g] {
        const auto net = load_network(a->net);
        Runner run(g, "hsim");
        run.network_hash = net.content_hash();
        run.params = {{"h", a->h.describe()}, {"ell", a->ell}, {"M", a->level}, {"mode", a->mode},
                      {"start", a->start}};
        if (a->mode != "exact")
            run.params["mc"] = {{"samples", a->samples}, {"seed", a->seed}};
        const auto out = run.run([&] {
            const auto h = a->h.load(net, g.tol());
            const auto chain = build_chain(h, SphereBoundary::Absorbing, g.tol());
            std::optional<std::size_t> start;
            if (!a->start.empty())
                start = chain.ball().index_of(vertex(a->start));
            std::optional<McOptions> mc;
            if (a->mode != "exact")
                mc = McOptions{a->samples, a->seed};
            const auto s = escape_statistic(chain, start, a->ell, a->level, a->mode != "mc", mc);
            json doc = {{"format", "netpot-escape-statistic-v1"},
                        {"ell", s.ell},
                        {"M", s.level},
                        {"start", start ? json(chain.ball().label(*start).label()) : json("mu_h")},
                        {"meta", run.meta()}};
            if (s.exact)
                doc["exact"] = *s.exact;
            if (s.survival) {
                doc["survival"] = *s.survival;
                doc["complement_bound"] = *s.complement_bound;
            }
            if (s.mc)
                doc["mc"] = {{"estimate", s.mc->estimate}, {"samples", s.mc->samples},
                             {"seed", s.mc->seed},         {"ci99", {s.mc->ci_low, s.mc->ci_high}},
                             {"std_error", s.mc->std_error}, {"rng", s.mc->rng}};
            return Outputs{{"out", dump(doc)}};
        });
        run.emit(out, {{"out", a->out}});
    });
}

void add_tv(CLI::App& app, const Global& g) {
    auto* cmd = app.add_subcommand("tv", "Conditioned walk vs h-process on path space");
    struct Args {
        std::string net, out;
        PotentialArgs h;
        int ell = 0, radius = 0;
        std::vector<std::string> targets;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--net", a->net)->required();
    a->h.add(cmd);
    cmd->add_option("--ell", a->ell)->required();
    cmd->add_option("--targets", a->targets, "Labels, or @eta.json for a measure")->delimiter(',')->required();
    cmd->add_option("--R", a->radius, "Conditioning ball radius (default: 2 * farthest target)");
    cmd->add_option("--out", a->out);
    cmd->callback([a, &g] {
        const auto net = load_network(a->net);
        Runner run(g, "tv");
        run.network_hash = net.content_hash();
        json tokens = json::array();
        for (const auto& t : a->targets)
            tokens.push_back(t.rfind('@', 0) == 0 ? sha256_hex(read_file(t.substr(1))) : t);
        run.params = {{"h", a->h.describe()}, {"ell", a->ell}, {"targets", tokens}, {"R", a->radius}};
        const auto out = run.run([&] {
            const auto h = a->h.load(net, g.tol());
            int radius = a->radius;
            if (radius < 1) {
                // Measures keep the ball they were solved on; vertices get twice their depth.
                radius = 2;
                for (const auto& t : a->targets) {
                    if (t.rfind('@', 0) == 0) {
                        const auto doc = json::parse(read_file(t.substr(1)));
                        radius = std::max(radius, doc.at("meta").at("params").at("R").get<int>());
                    } else {
                        radius = std::max(radius, 2 * h.ball().depth(h.ball().index_of(vertex(t))));
                    }
                }
            }
            GreenOperator op(make_ball(net, radius), SphereBoundary::Absorbing, g.tol());
            std::vector<Measure> targets;
            for (const auto& t : a->targets)
                targets.push_back(t.rfind('@', 0) == 0 ? load_measure(op.ball(), t.substr(1))
                                                       : Measure{{op.ball().index_of(vertex(t)), 1.0}});
            const auto rep = conditioned_vs_hprocess(op, h, a->ell, targets);
            CsvWriter csv({"target", "tv"});
            for (std::size_t k = 0; k < targets.size(); ++k)
                csv.row({a->targets[k], num(rep.tv[k])});
            const json note = {{"paths", rep.paths}, {"R", radius},
                               {"non_increasing", rep.non_increasing},
                               {"strictly_decreasing", rep.strictly_decreasing}};
            return Outputs{{"out", csv.str()}, {"out.note", note.dump()}};
        });
        run.emit(out, {{"out", a->out}});
    });
}

void add_resistance(CLI::App& app, const Global& g) {
    auto* cmd = app.add_subcommand("resistance", "Effective resistance from the root to sphere(R)");
    struct Args {
        std::string net, out;
        std::vector<int> radii;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--net", a->net)->required();
    cmd->add_option("--radii", a->radii)->delimiter(',')->required();
    cmd->add_option("--out", a->out);
    cmd->callback([a, &g] {
        const auto net = load_network(a->net);
        Runner run(g, "resistance");
        run.network_hash = net.content_hash();
        run.params = {{"radii", a->radii}};
        const auto out = run.run([&] {
            CsvWriter csv({"R", "reff"});
            for (int R : a->radii)
                csv.row({std::to_string(R), num(effective_resistance(net, R, g.tol()))});
            return Outputs{{"out", csv.str()}};
        });
        run.emit(out, {{"out", a->out}});
    });
}

void add_verify(CLI::App& app, const Global& g) {
    auto* cmd = app.add_subcommand("verify", "Run the conformance battery on a network");
    struct Args {
        std::string net, out;
        VerifyConfig config;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--net", a->net)->required();
    cmd->add_option("--radius", a->config.radius, "Ball radius for the identity checks");
    cmd->add_option("--minimax-radii", a->config.minimax_radii)->delimiter(',');
    cmd->add_option("--max-ball", a->config.max_ball, "Skip balls with more vertices");
    cmd->add_option("--seed", a->config.seed);
    cmd->add_option("--out", a->out, "JSON report");
    cmd->callback([a, &g] {
        const auto net = load_network(a->net);
        VerifyConfig config = a->config;
        config.tol = g.tol();
        const auto report = verify_suite(net, config);
        std::cout << report.table();
        if (!a->out.empty()) {
            Runner run(g, "verify");
            run.network_hash = net.content_hash();
            json doc = report.to_json();
            doc["meta"] = run.meta();
            write_file_atomic(a->out, dump(doc));
        }
        if (!report.passed)
            throw Error(Errc::IdentityViolation, "conformance checks failed");
    });
}

} // namespace

int dispatch(int argc, char** argv) {
    CLI::App app{"netpot: potentials on recurrent rooted networks"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--tol-solve", g.tol_solve, "Relative residual of Dirichlet solves")->check(CLI::PositiveNumber);
    app.add_option("--tol-identity", g.tol_identity, "Identity check tolerance")->check(CLI::PositiveNumber);
    app.add_option("--tol-gap", g.tol_gap, "Relative LP duality gap")->check(CLI::PositiveNumber);
    app.add_option("--threads", g.threads, "Worker thread bound")->check(CLI::PositiveNumber);
    app.add_option("--cache-dir", g.cache_dir, "Result cache (default: $NETPOT_CACHE)");
    app.add_flag("--no-cache", g.no_cache, "Bypass the result cache");

    add_gen(app, g);
    add_green(app, g);
    add_dipole(app, g);
    add_minimax(app, g);
    add_mcurve(app, g);
    add_escape(app, g);
    add_sublevel(app, g);
    add_hsim(app, g);
    add_tv(app, g);
    add_resistance(app, g);
    add_verify(app, g);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code == 0)
            return 0;
        std::cerr << "\n" << app.help();
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace netpot::cli
