#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "wellpose/cli.hpp"
#include "wellpose/config.hpp"
#include "wellpose/error.hpp"
#include "wellpose/experiment.hpp"
#include "wellpose/table.hpp"

using namespace wellpose;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = WELLPOSE_CONFIG_DIR;

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("wellpose_" + tag + "_" + std::to_string(::getpid())))
    {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> split_lines(const std::string& s)
{
    std::vector<std::string> lines;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::istringstream in(line);
    for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
    return cells;
}

const std::string kMinimal = R"({
  "name": "probe",
  "field": {"family": "constant", "T": 1, "c": 1},
  "xi_grid": {"min": 1, "max": 1000, "count": 8},
  "data": {"profile": "constant"},
  "model": {"kind": "gevrey", "p": 2, "alpha": 0.5}
})";

}  // namespace

TEST_CASE("one-row table emits a header and one data line")
{
    TempDir dir("table");
    fs::create_directories(dir.path);
    Table t;
    t.columns = {"xi", "n", "ok", "tag"};
    t.add({0.1, std::int64_t{3}, true, std::string("a")});
    emit(t, (dir.path / "t.csv").string(), TableFormat::Csv);
    const auto lines = split_lines(slurp(dir.path / "t.csv"));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "xi,n,ok,tag");
    CHECK(lines[1] == "0.10000000000000001,3,true,a");
}

TEST_CASE("csv and jsonl carry identical values")
{
    Table t;
    t.columns = {"x", "y"};
    const std::vector<double> xs{1.0 / 3.0, 1e-300, -2.5e17, std::exp(1.0)};
    for (double x : xs) t.add({x, x * x});
    const auto csv = split_lines(to_csv(t));
    const auto jl = split_lines(to_jsonl(t));
    REQUIRE(csv.size() == xs.size() + 1);
    REQUIRE(jl.size() == xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto cells = split_csv(csv[i + 1]);
        const auto j = nlohmann::json::parse(jl[i]);
        CHECK(std::stod(cells[0]) == xs[i]);
        CHECK(j["x"].get<double>() == xs[i]);
        CHECK(std::stod(cells[1]) == j["y"].get<double>());
    }
    CHECK(format_double(kInf) == "inf");
    CHECK(format_double(-kInf) == "-inf");
}

TEST_CASE("empty tables are refused and leave no file")
{
    TempDir dir("empty");
    fs::create_directories(dir.path);
    Table t;
    t.columns = {"x"};
    const auto p = dir.path / "e.csv";
    CHECK_THROWS_AS(emit(t, p.string(), TableFormat::Csv), ValidationError);
    CHECK_FALSE(fs::exists(p));
    t.add({1.0});
    CHECK_THROWS_AS(emit(t, "/proc/wellpose/none.csv", TableFormat::Csv), IoError);
}

TEST_CASE("config round trip")
{
    for (const char* name : {"gevrey_a05_p2.json", "cinf_onepluslog.json", "constant.json"}) {
        CAPTURE(name);
        const auto a = load_config(kConfigs + "/" + name);
        const auto text = serialize_config(a);
        const auto b = parse_config(text, a.base_dir);
        CHECK(serialize_config(b) == text);
    }
    const auto m = parse_config(kMinimal);
    CHECK(m.xi_grid.count == 8);
    CHECK(m.field.params.T == 1.0);
}

TEST_CASE("config errors name the offending field")
{
    auto message = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string("accepted");
    };
    auto edit = [](std::string from, std::string to) {
        std::string s = kMinimal;
        s.replace(s.find(from), from.size(), to);
        return s;
    };
    CHECK(message(edit("\"count\": 8", "\"count\": 4")).find("xi_grid.count") != std::string::npos);
    CHECK(message(edit("\"min\": 1,", "\"min\": 0.5,")).find("xi_grid.min") != std::string::npos);
    CHECK(message(edit("\"T\": 1", "\"T\": 1, \"colour\": 2")).find("field.colour") != std::string::npos);
    CHECK(message(edit("\"family\": \"constant\"", "\"family\": \"wavy\"")).find("field.family") != std::string::npos);
    CHECK(message("{not json").find("accepted") == std::string::npos);
}

TEST_CASE("eps column follows the coupling rule exactly")
{
    const auto ctx = prepare(load_config(kConfigs + "/constant.json"));
    const auto sweep = run_sweep(ctx, 2);
    REQUIRE(sweep.rows.size() == 8);
    CHECK(sweep.errors.empty());
    const double tau1 = std::exp(-1.0);
    CHECK(sweep.tau1 == doctest::Approx(tau1).epsilon(1e-15));
    for (const auto& r : sweep.rows) {
        CHECK(r.eps == std::min(1.0 / r.xi, sweep.tau1));
        CHECK(r.eps_clamped == (1.0 / r.xi > sweep.tau1));
        CHECK(r.E0 > 0.0);
        CHECK(std::abs(r.log_ratio) < 1e-8);
        CHECK(r.gronwall_total == 0.0);
        CHECK(r.dominance_pass);
    }
    CHECK(std::abs(sweep.M_empirical) < 1e-12);
}

TEST_CASE("exit codes")
{
    TempDir dir("exit");
    CHECK(cli({"validate", kConfigs + "/constant.json", "--out", dir.path.string()}).code == kExitOk);
    CHECK(fs::exists(dir.path / "validate.json"));

    const auto missing = cli({"validate", "/nonexistent/config.json"});
    CHECK(missing.code == kExitIo);
    CHECK(missing.err.find("/nonexistent/config.json") != std::string::npos);

    const auto cfg = dir.path / "bad.json";
    fs::create_directories(dir.path);
    {
        std::ofstream o(cfg);
        std::string s = kMinimal;
        s.replace(s.find("\"count\": 8"), 10, "\"count\": 2");
        o << s;
    }
    const auto bad = cli({"validate", cfg.string()});
    CHECK(bad.code == kExitValidation);
    CHECK(bad.err.find("xi_grid.count") != std::string::npos);

    CHECK(cli({"frobnicate", cfg.string()}).code == kExitValidation);
    CHECK(cli({"validate", kConfigs + "/constant.json", "--format", "xml"}).code == kExitValidation);
    CHECK(cli({"validate", kConfigs + "/constant.json", "--out", "/proc/wellpose"}).code == kExitIo);
}

TEST_CASE("constant field: all stages pass with flat growth")
{
    TempDir dir("constant");
    const auto r = cli({"all", kConfigs + "/constant.json", "--out", dir.path.string()});
    CHECK(r.code == kExitOk);
    const auto p = nlohmann::json::parse(slurp(dir.path / "approximation_summary.json"));
    CHECK(p["all_pass"].get<bool>());
    const auto c = nlohmann::json::parse(slurp(dir.path / "classification.json"));
    CHECK(std::abs(c["fit"]["M_sup"].get<double>()) < 1e-6);
    CHECK(fs::exists(dir.path / "sweep.csv"));
    CHECK(fs::exists(dir.path / "certificate.json"));
}

TEST_CASE("output is independent of the worker count and the format")
{
    TempDir a("w1"), b("w3"), j("jsonl");
    REQUIRE(cli({"sweep", kConfigs + "/constant.json", "--out", a.path.string(), "--workers", "1"}).code == kExitOk);
    REQUIRE(cli({"sweep", kConfigs + "/constant.json", "--out", b.path.string(), "--workers", "3"}).code == kExitOk);
    CHECK(slurp(a.path / "sweep.csv") == slurp(b.path / "sweep.csv"));

    REQUIRE(cli({"--format", "jsonl", "sweep", kConfigs + "/constant.json", "--out", j.path.string()}).code == kExitOk);
    const auto csv = split_lines(slurp(a.path / "sweep.csv"));
    const auto jl = split_lines(slurp(j.path / "sweep.jsonl"));
    REQUIRE(csv.size() == jl.size() + 1);
    const auto header = split_csv(csv[0]);
    for (std::size_t i = 0; i < jl.size(); ++i) {
        const auto row = split_csv(csv[i + 1]);
        const auto obj = nlohmann::ordered_json::parse(jl[i]);
        std::size_t k = 0;
        for (auto it = obj.begin(); it != obj.end(); ++it, ++k) {
            CHECK(it.key() == header[k]);
            if (it->is_number()) CHECK(std::stod(row[k]) == it->get<double>());
        }
    }
}

TEST_CASE("WELLPOSE_OUT_DIR overrides the config and --out overrides both")
{
    TempDir env("env"), flag("flag");
    ::setenv("WELLPOSE_OUT_DIR", env.path.string().c_str(), 1);
    CHECK(cli({"validate", kConfigs + "/constant.json"}).code == kExitOk);
    CHECK(fs::exists(env.path / "validate.json"));
    CHECK(cli({"validate", kConfigs + "/constant.json", "--out", flag.path.string()}).code == kExitOk);
    CHECK(fs::exists(flag.path / "validate.json"));
    ::unsetenv("WELLPOSE_OUT_DIR");
}

TEST_CASE("bundled log-modulus config classifies as C-infinity")
{
    TempDir dir("cinf");
    const auto r = cli({"classify", kConfigs + "/cinf_onepluslog.json", "--out", dir.path.string()});
    CHECK(r.code == kExitOk);
    const auto c = nlohmann::json::parse(slurp(dir.path / "classification.json"));
    CHECK(c["verdict"].get<std::string>() == "C∞ well-posed");
    CHECK(c["modulus"].get<std::string>() == "τ|log τ|/(1+log|log τ|)");
}
