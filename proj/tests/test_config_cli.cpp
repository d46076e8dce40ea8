#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "riccati_hjb/config.hpp"
#include "riccati_hjb/errors.hpp"

using namespace riccati;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = RICCATI_HJB_CONFIG_DIR;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("riccati_hjb_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "riccati_hjb");
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

std::string read_text(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

nlohmann::json small_config() {
    return nlohmann::json::parse(R"({
      "model": {"assets": [0.1028, 0.0516],
                "covariance": {"volatilities": [0.169, 0.0082], "correlation": -0.1151}},
      "utility": {"family": "dara", "a0": 9, "a1": 6, "x_star": 2},
      "pde": {"n_cells": 80, "t_final": 1, "n_steps": 20},
      "checks": {"pairs": 100, "energy_refinement": false}
    })");
}

}  // namespace

TEST_CASE("json syntax errors carry line and column") {
    try {
        parse_json_text("{\n  \"model\": [1, 2,\n}", "bad.json");
        FAIL("expected an error");
    } catch (const InputError& e) {
        const std::string what = e.what();
        CHECK(what.rfind("bad.json:3:", 0) == 0);
    }
}

TEST_CASE("schema errors name the offending key") {
    nlohmann::json c = small_config();
    c["pde"]["n_celss"] = 10;
    CHECK_THROWS_WITH_AS(parse_config(c, "cfg.json", "."), doctest::Contains("/pde/n_celss"), InputError);

    c = small_config();
    c["model"]["covariance"] = nlohmann::json::parse("[[0.04, 0.01], [0.01]]");
    CHECK_THROWS_AS(parse_config(c, "cfg.json", "."), InputError);

    c = small_config();
    c.erase("model");
    CHECK_THROWS_WITH_AS(parse_config(c, "cfg.json", ".").require_model(), doctest::Contains("/model"), InputError);

    c = small_config();
    c["pde"]["slices"] = {0.0, 5.0};
    CHECK_THROWS_AS(parse_config(c, "cfg.json", "."), InputError);
}

TEST_CASE("shipped configs parse") {
    for (const char* name : {"two_asset_dara.json", "two_asset_constant9.json", "three_fund_menu.json", "mms.json",
                             "negative_control_dirichlet.json", "from_csv.json"}) {
        CAPTURE(name);
        CHECK_NOTHROW(load_config(kConfigs / name));
    }
    const RunConfig menu = load_config(kConfigs / "three_fund_menu.json");
    CHECK(menu.require_model().menu() != nullptr);
    const RunConfig csv = load_config(kConfigs / "from_csv.json");
    const RunConfig direct = load_config(kConfigs / "two_asset_dara.json");
    CHECK(csv.require_model().mu().isApprox(direct.require_model().mu(), 1e-15));
}

TEST_CASE("slice lists") {
    CHECK(parse_slice_list("0,1.5, 10") == std::vector<double>{0.0, 1.5, 10.0});
    CHECK_THROWS_AS(parse_slice_list("1,abc"), InputError);
    CHECK_THROWS_AS(parse_slice_list(""), InputError);
}

TEST_CASE("exit codes") {
    TempDir tmp("exit");
    const fs::path good = tmp.path / "good.json";
    write_text(good, small_config().dump());

    SUBCASE("usage") {
        CHECK(invoke({}).code == cli::kUsage);
        CHECK(invoke({"frobnicate"}).code == cli::kUsage);
        CHECK(invoke({"solve"}).code == cli::kUsage);
        write_text(tmp.path / "empty.json", "  \n");
        CHECK(invoke({"solve", "--config", (tmp.path / "empty.json").string()}).code == cli::kUsage);
        write_text(tmp.path / "braces.json", "{}");
        CHECK(invoke({"verify", "--config", (tmp.path / "braces.json").string()}).code == cli::kUsage);
        CHECK(invoke({"--help"}).code == cli::kOk);
    }
    SUBCASE("input") {
        write_text(tmp.path / "broken.json", "{\"model\": ");
        const Outcome o = invoke({"solve", "--config", (tmp.path / "broken.json").string()});
        CHECK(o.code == cli::kInputError);
        CHECK(o.err.find("broken.json:1:") != std::string::npos);
        CHECK(invoke({"solve", "--config", (tmp.path / "missing.json").string()}).code == cli::kInputError);
        CHECK(invoke({"solve", "--config", good.string(), "--slices", "0,7"}).code == cli::kInputError);
        nlohmann::json c = small_config();
        c["model"]["covariance"] = nlohmann::json::parse("[[0.04, 0.05], [0.05, 0.04]]");
        write_text(tmp.path / "indefinite.json", c.dump());
        CHECK(invoke({"ingest", "--config", (tmp.path / "indefinite.json").string()}).code == cli::kInputError);
    }
    SUBCASE("solver") {
        nlohmann::json c = small_config();
        c["pde"]["picard_max"] = 1;
        c["pde"]["picard_tol"] = 1e-15;
        write_text(tmp.path / "starved.json", c.dump());
        const Outcome o = invoke({"solve", "--config", (tmp.path / "starved.json").string(), "--out",
                                  (tmp.path / "o").string()});
        CHECK(o.code == cli::kSolverError);
        CHECK(o.err.find("step 0") != std::string::npos);
    }
    SUBCASE("check failed") {
        const Outcome o = invoke({"verify", "--config", (kConfigs / "negative_control_dirichlet.json").string(),
                                  "--out", (tmp.path / "neg").string()});
        CHECK(o.code == cli::kCheckFailed);
        const auto report = nlohmann::json::parse(read_text(tmp.path / "neg" / "verify_report.json"));
        CHECK(report.dump().find("maximum_principle") != std::string::npos);
    }
    SUBCASE("output") {
        write_text(tmp.path / "file", "x");
        const Outcome o = invoke({"ingest", "--config", good.string(), "--out", (tmp.path / "file" / "sub").string()});
        CHECK(o.code == cli::kOutputError);
    }
}

TEST_CASE("every subcommand writes its files and a manifest") {
    TempDir tmp("inventory");
    const fs::path cfg = tmp.path / "cfg.json";
    write_text(cfg, small_config().dump());
    const std::vector<std::pair<std::string, std::string>> runs{{"ingest", "model.json"},
                                                                {"alpha-curve", "alpha_curve.csv"},
                                                                {"weights-path", "weights_path.csv"},
                                                                {"verify", "verify_report.json"}};
    for (const auto& [command, file] : runs) {
        CAPTURE(command);
        const fs::path out = tmp.path / command;
        const Outcome o = invoke({command, "--config", cfg.string(), "--out", out.string()});
        CHECK(o.code == cli::kOk);
        CHECK(fs::exists(out / file));
        const auto manifest = nlohmann::json::parse(read_text(out / "manifest.json"));
        CHECK(manifest.at("command") == command);
        CHECK(manifest.at("outputs").size() >= 1);
        CHECK(manifest.at("config") == small_config());
    }

    const fs::path solve_out = tmp.path / "solve";
    CHECK(invoke({"solve", "--config", cfg.string(), "--out", solve_out.string(), "--slices", "0,0.5,1"}).code ==
          cli::kOk);
    std::size_t slices = 0;
    for (const auto& entry : fs::directory_iterator(solve_out)) {
        if (entry.path().filename().string().rfind("slice_", 0) == 0) ++slices;
    }
    CHECK(slices == 3);
    const std::string first = read_text(solve_out / "slice_000_tau_0.csv");
    CHECK(first.rfind("x,phi,alpha,theta_1,theta_2\n", 0) == 0);

    SUBCASE("a manifest reproduces its run") {
        const fs::path again = tmp.path / "again";
        CHECK(invoke({"solve", "--config", (solve_out / "manifest.json").string(), "--out", again.string(),
                      "--slices", "0,0.5,1"})
                  .code == cli::kOk);
        for (const auto& entry : fs::directory_iterator(solve_out)) {
            if (entry.path().extension() == ".csv") {
                CHECK(read_text(entry.path()) == read_text(again / entry.path().filename()));
            }
        }
    }
    SUBCASE("ingest from csv files") {
        const fs::path out = tmp.path / "csv";
        CHECK(invoke({"ingest", "--mu", (kConfigs / "data" / "two_asset_mu.csv").string(), "--sigma",
                      (kConfigs / "data" / "two_asset_sigma.csv").string(), "--out", out.string()})
                  .code == cli::kOk);
        const auto model = nlohmann::json::parse(read_text(out / "model.json"));
        CHECK(model.at("closed_form").at("phi_minus").get<double>() == doctest::Approx(1.7826984228).epsilon(1e-9));
        CHECK(model.at("closed_form").at("phi_plus").is_null());
    }
}

TEST_CASE("seeded verify output is byte-identical") {
    TempDir tmp("seed");
    const fs::path cfg = tmp.path / "cfg.json";
    write_text(cfg, small_config().dump());
    for (const char* run : {"a", "b"}) {
        CHECK(invoke({"verify", "--config", cfg.string(), "--seed", "7", "--out", (tmp.path / run).string()}).code ==
              cli::kOk);
    }
    CHECK(read_text(tmp.path / "a" / "verify_report.json") == read_text(tmp.path / "b" / "verify_report.json"));
    for (const auto& entry : fs::directory_iterator(tmp.path / "a")) {
        if (entry.path().extension() == ".csv") {
            CHECK(read_text(entry.path()) == read_text(tmp.path / "b" / entry.path().filename()));
        }
    }
    const auto manifest = nlohmann::json::parse(read_text(tmp.path / "a" / "manifest.json"));
    CHECK(manifest.at("effective").dump().find("\"seed\":7") != std::string::npos);
}
