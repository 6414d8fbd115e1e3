#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "netpot/config.hpp"
#include "netpot/green.hpp"
#include "netpot/potential.hpp"

namespace netpot {

inline constexpr const char* kPotentialFormat = "netpot-potential-v1";

/// Decimal with 17 significant digits.
std::string format_number(double x);

/// Writes to a temporary file in the target directory and renames it over
/// `path`. Throws Io.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// CSV with a mandatory header row; numbers use format_number.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    CsvWriter& row(const std::vector<std::string>& cells);
    std::string str() const;

private:
    std::size_t width_;
    std::string text_;
};

/// {format, ball:{root, R, network_hash}, values:{label: h}, mass,
///  distances:{label: d}} plus optional metadata.
nlohmann::json potential_to_json(const PotentialOnBall& h, const nlohmann::json& meta = nullptr);

/// Parsed potential file, independent of any network.
struct PotentialFile {
    std::string root;
    int radius = 0;
    std::string network_hash;
    double mass = 1.0;
    std::map<std::string, double> values;
    std::map<std::string, int> distances;  // empty if absent
};

PotentialFile potential_from_json(const nlohmann::json& doc);

/// Rebuilds the potential on B(o,R) of `source`. Throws BallMismatch if the
/// network hash or root differs, InvalidFormat if a ball vertex is missing.
PotentialOnBall potential_on_network(const PotentialFile& file, const NetworkSource& source,
                                     Tolerances tol = {});

/// Sublevel report from the file alone (requires distances).
std::vector<SublevelRow> sublevel_report(const PotentialFile& file, std::span<const double> levels);

/// {label: value} for ball-indexed values.
nlohmann::json labelled(const Ball& ball, const Measure& m);

} // namespace netpot
