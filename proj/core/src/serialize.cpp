#include "netpot/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "netpot/errors.hpp"

namespace netpot {

nlohmann::json to_json(const Tolerances& tol) {
    return {{"solve", tol.solve}, {"identity", tol.identity}, {"lp_gap", tol.lp_gap}};
}

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(Errc::Io, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error(Errc::Io, "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(Errc::Io, "cannot rename onto " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
    if (header.empty())
        throw Error(Errc::InvalidArgument, "CSV header is mandatory");
    row(header);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_)
        throw Error(Errc::InvalidArgument, "CSV row width differs from header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
    return *this;
}

std::string CsvWriter::str() const { return text_; }

nlohmann::json potential_to_json(const PotentialOnBall& h, const nlohmann::json& meta) {
    const Ball& ball = h.ball();
    nlohmann::json values = nlohmann::json::object(), distances = nlohmann::json::object();
    for (std::size_t i = 0; i < ball.size(); ++i) {
        values[ball.label(i).label()] = h.value(i);
        distances[ball.label(i).label()] = ball.depth(i);
    }
    nlohmann::json doc = {
        {"format", kPotentialFormat},
        {"ball", {{"root", ball.root().label()}, {"R", ball.radius()}, {"network_hash", ball.network_hash()}}},
        {"values", std::move(values)},
        {"mass", h.mass()},
        {"distances", std::move(distances)},
    };
    if (!meta.is_null())
        doc["meta"] = meta;
    return doc;
}

PotentialFile potential_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format").get<std::string>() != kPotentialFormat)
            throw Error(Errc::InvalidFormat, "unsupported potential format");
        PotentialFile f;
        const auto& b = doc.at("ball");
        f.root = b.at("root").get<std::string>();
        f.radius = b.at("R").get<int>();
        f.network_hash = b.at("network_hash").get<std::string>();
        f.mass = doc.value("mass", 1.0);
        for (const auto& [k, v] : doc.at("values").items())
            f.values[k] = v.get<double>();
        if (doc.contains("distances"))
            for (const auto& [k, v] : doc.at("distances").items())
                f.distances[k] = v.get<int>();
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidFormat, std::string("malformed potential: ") + e.what());
    }
}

PotentialOnBall potential_on_network(const PotentialFile& file, const NetworkSource& source,
                                     Tolerances tol) {
    if (file.network_hash != source.content_hash())
        throw Error(Errc::BallMismatch, "potential was computed on a different network");
    auto ball = make_ball(source, file.radius);
    if (ball->root().label() != file.root)
        throw Error(Errc::BallMismatch, "potential root differs from the network root");
    std::vector<double> values(ball->size());
    for (std::size_t i = 0; i < ball->size(); ++i) {
        auto it = file.values.find(ball->label(i).label());
        if (it == file.values.end())
            throw Error(Errc::InvalidFormat, "potential has no value at " + ball->label(i).label());
        values[i] = it->second;
    }
    return PotentialOnBall(std::move(ball), std::move(values), file.mass, tol);
}

std::vector<SublevelRow> sublevel_report(const PotentialFile& file, std::span<const double> levels) {
    std::vector<double> values;
    std::vector<int> depths;
    bool exhausted = true;
    for (const auto& [label, v] : file.values) {
        auto it = file.distances.find(label);
        if (it == file.distances.end())
            throw Error(Errc::InvalidFormat, "potential file lacks distances; pass the network");
        values.push_back(v);
        depths.push_back(it->second);
        exhausted = exhausted && it->second < file.radius;
    }
    return sublevel_report(values, depths, exhausted ? -1 : file.radius, levels);
}

nlohmann::json labelled(const Ball& ball, const Measure& m) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [i, w] : m)
        out[ball.label(i).label()] = w;
    return out;
}

} // namespace netpot
