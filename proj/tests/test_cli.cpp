// Shells out to the built CLI binary (path in GMWB_CLI) and checks the CSV
// contracts, exit codes, and the config round trip.
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "gmwb/config.hpp"
#include "gmwb/csv.hpp"

namespace {

std::string cli() {
    const char* p = std::getenv("GMWB_CLI");
    REQUIRE(p != nullptr);
    return p;
}

int run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("config parsing: defaults, overrides, unknown keys") {
    using namespace gmwb;
    const RunConfig def = default_config();
    CHECK(def.contract.withdraw_rate == doctest::Approx(20.0));  // z0/T
    CHECK(def.model.sigma_r == doctest::Approx(0.02));

    const RunConfig kou = parse_config(R"({"model":{"jump":{"type":"kou"}},
        "contract":{"maturity":10.0}})");
    CHECK(kou.contract.withdraw_rate == doctest::Approx(10.0));
    CHECK(std::holds_alternative<KouJump>(kou.model.jump));

    const RunConfig abs = parse_config(
        R"({"contract":{"withdraw_rate":7.5,"withdraw_rate_absolute":true}})");
    CHECK(abs.contract.withdraw_rate == doctest::Approx(7.5));

    CHECK_THROWS_AS(parse_config(R"({"modle":{}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"model":{"sigma_zz":1}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"schema_version":99})"), config_error);
    CHECK_THROWS_AS(parse_config("not json"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"model":{"rho":1.5}})"), std::exception);

    // echo -> parse round trip preserves the model block
    const std::string echo = config_echo(kou);
    const RunConfig back = parse_config(echo);
    CHECK(back.contract.maturity == kou.contract.maturity);
    CHECK(std::holds_alternative<KouJump>(back.model.jump));
}

TEST_CASE("kernel-diag emits one deterministic row per level") {
    const std::string out = "/tmp/gmwb_kdiag.csv";
    REQUIRE(run("kernel-diag --level 0 --out " + out) == 0);
    const gmwb::CsvTable t = gmwb::CsvTable::parse(slurp(out));
    REQUIRE(t.rows.size() == 1);
    CHECK(t.header[0] == "level");
    CHECK(t.rows[0][0] == "0");
    CHECK(std::stod(t.rows[0][2]) < 1e-6 * 0.25 / 5.0);  // defect < eps dtau/T
    CHECK(!t.comments.empty());  // config echo

    REQUIRE(run("kernel-diag --level 0 --out /tmp/gmwb_kdiag2.csv") == 0);
    const gmwb::CsvTable t2 = gmwb::CsvTable::parse(slurp("/tmp/gmwb_kdiag2.csv"));
    CHECK(t.rows == t2.rows);
}

TEST_CASE("price subcommand emits the CSV schema and round-trips") {
    const std::string out = "/tmp/gmwb_price.csv";
    REQUIRE(run("price --level 0 --out " + out) == 0);
    const gmwb::CsvTable t = gmwb::CsvTable::parse(slurp(out));
    REQUIRE(t.header.size() == 6);
    CHECK(t.header[1] == "price");
    REQUIRE(t.rows.size() == 1);
    const double price = std::stod(t.rows[0][1]);
    CHECK(price > 100.0);
    CHECK(price < 130.0);

    // config echo re-parses as a valid configuration
    bool found = false;
    for (const auto& cmt : t.comments)
        if (cmt.rfind("config: ", 0) == 0) {
            (void)gmwb::parse_config(cmt.substr(8));
            found = true;
        }
    CHECK(found);
}

TEST_CASE("exit codes: missing config, grid condition, fee usage, bracket, controls") {
    CHECK(run("price --config /nonexistent/cfg.json") == 2);

    write_file("/tmp/gmwb_badgrid.json", R"({"grid":{"r_min":-6.0}})");
    CHECK(run("price --config /tmp/gmwb_badgrid.json") == 3);

    write_file("/tmp/gmwb_badtol.json", R"({"run":{"fee_tol":0.0}})");
    CHECK(run("fee --config /tmp/gmwb_badtol.json") == 2);

    // both bracket ends price below par: no sign change
    write_file("/tmp/gmwb_badbracket.json",
               R"({"run":{"fee_bracket_lo":0.19,"fee_bracket_hi":0.2},
                   "grid":{"n_w":256,"n_r":32,"n_a":4,"n_tau":10}})");
    CHECK(run("fee --config /tmp/gmwb_badbracket.json") == 4);

    write_file("/tmp/gmwb_noctrl.json",
               R"({"run":{"store_controls":false},
                   "mc":{"paths":200},
                   "grid":{"n_w":256,"n_r":32,"n_a":4,"n_tau":10}})");
    CHECK(run("mc-validate --config /tmp/gmwb_noctrl.json") == 5);
}

TEST_CASE("mc-validate writes a coherent row on a small lattice") {
    write_file("/tmp/gmwb_mc.json",
               R"({"mc":{"paths":2000,"substeps":5,"seed":4242},
                   "grid":{"n_w":256,"n_r":32,"n_a":6,"n_tau":10}})");
    const std::string out = "/tmp/gmwb_mc.csv";
    REQUIRE(run("mc-validate --config /tmp/gmwb_mc.json --out " + out) == 0);
    const gmwb::CsvTable t = gmwb::CsvTable::parse(slurp(out));
    REQUIRE(t.rows.size() == 1);
    const double mean = std::stod(t.rows[0][4]);
    const double lo = std::stod(t.rows[0][6]);
    const double hi = std::stod(t.rows[0][7]);
    CHECK(lo <= mean);
    CHECK(mean <= hi);
    CHECK(mean > 80.0);
    CHECK(mean < 150.0);
}

TEST_CASE("controls subcommand emits the map schema") {
    write_file("/tmp/gmwb_ctl.json", R"({"grid":{"n_w":256,"n_r":32,"n_a":6,"n_tau":10}})");
    const std::string out = "/tmp/gmwb_ctl.csv";
    REQUIRE(run("controls --config /tmp/gmwb_ctl.json --out " + out) == 0);
    const gmwb::CsvTable t = gmwb::CsvTable::parse(slurp(out));
    REQUIRE(t.header == std::vector<std::string>{"z", "a", "gamma_star", "branch"});
    CHECK(t.rows.size() > 100);
    for (const auto& row : t.rows) {
        const std::string& b = row[3];
        CHECK((b == "none" || b == "continuous" || b == "finite"));
    }
}
