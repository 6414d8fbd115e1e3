#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "netpot/ball.hpp"
#include "netpot/errors.hpp"
#include "netpot/hash.hpp"
#include "netpot/network.hpp"
#include "netpot/reference.hpp"
#include "netpot/serialize.hpp"

using namespace netpot;
namespace fs = std::filesystem;

TEST_CASE("sha256 test vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("numbers survive a text round trip") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0})
        CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("csv layout") {
    CsvWriter w({"r", "value"});
    w.row({"2", format_number(1.0)}).row({"4", format_number(2.0)});
    CHECK(w.str() == "r,value\n2,1\n4,2\n");
    CHECK_THROWS_AS(w.row({"1"}), Error);
}

TEST_CASE("potential json round trip") {
    auto line = generate(GeneratorSpec{});
    auto b = make_ball(line, 6);
    auto h = line_positive_part(b);
    auto doc = potential_to_json(h, {{"note", "test"}});
    CHECK(doc["format"] == kPotentialFormat);
    CHECK(doc["ball"]["R"] == 6);
    auto file = potential_from_json(nlohmann::json::parse(doc.dump()));
    CHECK(file.root == "0");
    CHECK(file.network_hash == line.content_hash());
    CHECK(file.values.at("5") == 5.0);
    CHECK(file.distances.at("-4") == 4);

    auto back = potential_on_network(file, line);
    for (std::size_t i = 0; i < b->size(); ++i)
        CHECK(back.value(i) == h.value(i));

    GeneratorSpec other;
    other.conductance = 2.0;
    try {
        potential_on_network(file, generate(other));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BallMismatch);
    }

    std::vector<double> levels{3.0};
    auto rows = sublevel_report(file, levels);
    CHECK(rows[0].count == 10);
    CHECK_FALSE(rows[0].window_complete);
}

TEST_CASE("malformed potential documents") {
    CHECK_THROWS_AS(potential_from_json(nlohmann::json{{"format", "other"}}), Error);
    CHECK_THROWS_AS(potential_from_json(nlohmann::json::array()), Error);
}

TEST_CASE("atomic writes replace the whole file") {
    auto dir = fs::temp_directory_path() / "netpot_serialize_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto path = dir / "out.txt";
    write_file_atomic(path, "first version, rather long\n");
    write_file_atomic(path, "second\n");
    CHECK(read_file(path) == "second\n");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir))
        ++files;
    CHECK(files == 1);
    CHECK_THROWS_AS(write_file_atomic(dir / "missing" / "x.txt", "x"), Error);
    CHECK_THROWS_AS(read_file(dir / "absent.txt"), Error);
    fs::remove_all(dir);
}

TEST_CASE("network files") {
    auto dir = fs::temp_directory_path() / "netpot_network_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    GeneratorSpec s;
    s.kind = GeneratorKind::Ladder;
    auto net = generate(s);
    write_file_atomic(dir / "n.json", network_to_json(net).dump());
    auto back = load_network((dir / "n.json").string());
    CHECK(back.content_hash() == net.content_hash());
    write_file_atomic(dir / "bad.json", "{\"format\": 3");
    try {
        load_network((dir / "bad.json").string());
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidFormat);
    }
    fs::remove_all(dir);
}
