// End-to-end checks of the command-line front-end. The binary path comes in
// through RD_CLI_PATH; each case writes a config, runs a subcommand and
// inspects the CSV artifacts and exit codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "core/case_studies.hpp"
#include "core/risk_neutral_vi.hpp"
#include "core/solvers.hpp"

namespace fs = std::filesystem;
using namespace riskdiv;

namespace {

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::current_path() / "cli_test_scratch";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::trunc);
    out << content;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& stderr_to = {}) {
    std::string cmd = std::string(RD_CLI_PATH) + " " + args;
    if (!stderr_to.empty()) cmd += " 2> " + stderr_to.string();
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

// column values of a CSV written by the CLI (comment lines skipped)
std::vector<double> csv_column(const fs::path& p, std::size_t col) {
    std::ifstream in(p);
    std::vector<double> out;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::stringstream ls(line);
        std::string cell;
        for (std::size_t c = 0; std::getline(ls, cell, ','); ++c)
            if (c == col) out.push_back(cell == "nan" ? std::nan("") : std::stod(cell));
    }
    return out;
}

std::string config_de(double mu, double beta, double gamma, double step, double x_max,
                      const fs::path& out_dir, const std::string& extra = "") {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "{\"model_kind\":\"double_exponential\",\"mu\":" << mu << ",\"beta\":" << beta
       << ",\"gamma\":" << gamma << ",\"grid_step\":" << step << ",\"grid_x_max\":" << x_max
       << ",\"output_dir\":\"" << out_dir.string() << "\"" << extra << "}";
    return os.str();
}

struct GridSpec {
    double step;
    std::size_t n;
    double x_max;
};

GridSpec small_grid(const IncrementModel& m, double beta, double frac) {
    RiskParams p(beta, 0.0);
    const double step = bbar(m, p) * frac;
    const double x_max = xi_star(m, p) + 10.0 * step;
    const auto n = static_cast<std::size_t>(std::ceil(x_max / step)) + 1;
    return {step, n, x_max};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("solve-finite writes per-stage columns; N=1 is the identity") {
    auto m = IncrementModel::double_exponential(2.0);
    const auto g = small_grid(m, 0.9, 1.0 / 40.0);
    const fs::path out = work_dir() / "finite1";
    const fs::path cfg = work_dir() / "finite1.json";
    write_file(cfg, config_de(2.0, 0.9, 1.0, g.step, g.x_max, out, ",\"horizon\":1"));
    REQUIRE(run_cli("solve-finite " + cfg.string()) == 0);
    const auto x = csv_column(out / "value.csv", 0);
    const auto j1 = csv_column(out / "value.csv", 1);
    REQUIRE(x.size() == j1.size());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(j1[i] == x[i]);
}

TEST_CASE("solve-finite N=2 matches the closed form column-wise") {
    auto m = IncrementModel::double_exponential(2.0);
    const auto g = small_grid(m, 0.9, 1.0 / 40.0);
    const fs::path out = work_dir() / "finite2";
    const fs::path cfg = work_dir() / "finite2.json";
    write_file(cfg, config_de(2.0, 0.9, 0.5, g.step, g.x_max, out, ",\"horizon\":2"));
    REQUIRE(run_cli("solve-finite " + cfg.string()) == 0);
    const auto x = csv_column(out / "value.csv", 0);
    const auto j2 = csv_column(out / "value.csv", 2);
    RiskParams p(0.9, 0.5);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(j2[i] == doctest::Approx(two_stage_closed_form(x[i], p, m)).epsilon(1e-9));
    // overrides replace config fields
    const fs::path out2 = work_dir() / "finite2b";
    REQUIRE(run_cli("solve-finite " + cfg.string() + " output_dir=\"" + out2.string() + "\"") == 0);
    CHECK(fs::exists(out2 / "value.csv"));
}

TEST_CASE("malformed configs exit 2 without partial files") {
    const fs::path out = work_dir() / "broken";
    const fs::path cfg = work_dir() / "broken.json";
    write_file(cfg, "{\"model_kind\":\"double_exponential\" this is not json");
    CHECK(run_cli("solve-finite " + cfg.string()) == 2);
    CHECK_FALSE(fs::exists(out));

    write_file(cfg, "{\"model_kind\":\"nonsense\",\"beta\":0.9,\"output_dir\":\"" +
                        out.string() + "\"}");
    CHECK(run_cli("solve-finite " + cfg.string()) == 2);
    CHECK_FALSE(fs::exists(out / "value.csv"));

    CHECK(run_cli("solve-finite " + (work_dir() / "missing.json").string()) == 2);

    // invalid model parameters are a config error too
    write_file(cfg,
               "{\"model_kind\":\"left_exponential\",\"lambda\":1.0,\"d\":0.5,\"beta\":0.9,"
               "\"gamma\":1.0,\"output_dir\":\"" +
                   out.string() + "\"}");
    CHECK(run_cli("solve-infinite " + cfg.string()) == 2);
}

TEST_CASE("solve-infinite writes value, policy, bands and report") {
    auto m = IncrementModel::double_exponential(2.0);
    const auto g = small_grid(m, 0.9, 1.0 / 60.0);
    const fs::path out = work_dir() / "inf";
    const fs::path cfg = work_dir() / "inf.json";
    write_file(cfg, config_de(2.0, 0.9, 0.2, g.step, g.x_max, out, ",\"tol\":1e-7"));
    REQUIRE(run_cli("solve-infinite " + cfg.string()) == 0);

    const std::string report = read_file(out / "report.txt");
    CHECK(report.find("iterations=") != std::string::npos);
    const auto pos = report.find("certified_error=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(report.substr(pos + 16)) <= 1e-7);
    CHECK(report.find("xi=") != std::string::npos);

    const std::string bands = read_file(out / "bands.csv");
    const bool classified = bands.find("PayAll") != std::string::npos ||
                            bands.find("Barrier") != std::string::npos ||
                            bands.find("FiniteBand") != std::string::npos;
    CHECK(classified);

    // byte-identical on rerun
    const fs::path out2 = work_dir() / "inf_rerun";
    REQUIRE(run_cli("solve-infinite " + cfg.string() + " output_dir=\"" + out2.string() + "\"") ==
            0);
    CHECK(read_file(out / "value.csv") == read_file(out2 / "value.csv"));
    CHECK(read_file(out / "bands.csv") == read_file(out2 / "bands.csv"));
}

TEST_CASE("pay-all regime is classified from the solve") {
    auto m = IncrementModel::left_exponential(6.0, 1.1);
    const auto g = small_grid(m, 0.99, 1.0 / 60.0);
    const fs::path out = work_dir() / "payall";
    const fs::path cfg = work_dir() / "payall.json";
    std::ostringstream os;
    os << std::setprecision(17);
    os << "{\"model_kind\":\"left_exponential\",\"lambda\":6.0,\"d\":1.1,\"beta\":0.99,"
       << "\"gamma\":6.0,\"grid_step\":" << g.step << ",\"grid_x_max\":" << g.x_max
       << ",\"tol\":1e-6,\"output_dir\":\"" << out.string() << "\"}";
    write_file(cfg, os.str());
    REQUIRE(run_cli("solve-infinite " + cfg.string()) == 0);
    CHECK(read_file(out / "bands.csv").find("classification=PayAll") != std::string::npos);
}

TEST_CASE("policy-iter logs nonincreasing gaps and matches solve-infinite") {
    auto m = IncrementModel::double_exponential(2.0);
    const auto g = small_grid(m, 0.9, 1.0 / 60.0);
    const fs::path out_pi = work_dir() / "pi";
    const fs::path out_vi = work_dir() / "pi_vi";
    const fs::path cfg = work_dir() / "pi.json";
    write_file(cfg, config_de(2.0, 0.9, 0.2, g.step, g.x_max, out_pi, ",\"tol\":1e-7"));
    REQUIRE(run_cli("policy-iter " + cfg.string()) == 0);
    REQUIRE(run_cli("solve-infinite " + cfg.string() + " output_dir=\"" + out_vi.string() + "\"") ==
            0);

    const auto gaps = csv_column(out_pi / "gaps.csv", 1);
    REQUIRE(!gaps.empty());
    for (std::size_t k = 1; k < gaps.size(); ++k) CHECK(gaps[k] <= gaps[k - 1] + 1e-12);

    const auto v_pi = csv_column(out_pi / "value.csv", 1);
    const auto v_vi = csv_column(out_vi / "value.csv", 1);
    REQUIRE(v_pi.size() == v_vi.size());
    for (std::size_t i = 0; i < v_pi.size(); ++i) CHECK(std::abs(v_pi[i] - v_vi[i]) <= 2e-7);
}

TEST_CASE("policy-iter warns about tabulated boundary jumps") {
    // uniform density on [-1, 1]: jumps to zero at both support endpoints
    const fs::path dens = work_dir() / "uniform.csv";
    write_file(dens, "z,g\n-1.0,0.5\n1.0,0.5\n");
    const fs::path out = work_dir() / "pi_tab";
    const fs::path cfg = work_dir() / "pi_tab.json";
    std::ostringstream os;
    os << std::setprecision(17);
    os << "{\"model_kind\":\"tabulated\",\"tabulated_csv\":\"" << dens.string()
       << "\",\"beta\":0.8,\"gamma\":0.5,\"grid_step\":0.05,\"grid_x_max\":11.0,"
       << "\"tol\":1e-6,\"output_dir\":\"" << out.string() << "\"}";
    write_file(cfg, os.str());
    const fs::path errlog = work_dir() / "pi_tab.stderr";
    REQUIRE(run_cli("policy-iter " + cfg.string(), errlog) == 0);
    CHECK(read_file(errlog).find("A3'") != std::string::npos);
}

TEST_CASE("barrier-curve: shape, gamma = 0 oracle row, empty list") {
    const fs::path out = work_dir() / "curve";
    const fs::path cfg = work_dir() / "curve.json";
    std::ostringstream os;
    os << std::setprecision(17);
    os << "{\"model_kind\":\"double_exponential\",\"mu\":1.2,\"beta\":0.99,"
       << "\"gammas\":[0.0,0.1,0.3,0.6,1.0,1.5,2.0],\"curve_mode\":\"three_stage\","
       << "\"output_dir\":\"" << out.string() << "\"}";
    write_file(cfg, os.str());
    REQUIRE(run_cli("barrier-curve " + cfg.string()) == 0);
    const auto barriers = csv_column(out / "curve.csv", 1);
    REQUIRE(barriers.size() == 7);
    for (std::size_t i = 1; i < barriers.size(); ++i) CHECK(barriers[i] <= barriers[i - 1] + 1e-9);
    CHECK(read_file(out / "curve.csv").find("# model=") != std::string::npos);

    // infinite-horizon mode at gamma = 0 equals the independent comparator
    auto m = IncrementModel::double_exponential(2.0);
    const auto g = small_grid(m, 0.9, 1.0 / 60.0);
    const fs::path out0 = work_dir() / "curve0";
    const fs::path cfg0 = work_dir() / "curve0.json";
    std::ostringstream os0;
    os0 << std::setprecision(17);
    os0 << "{\"model_kind\":\"double_exponential\",\"mu\":2.0,\"beta\":0.9,"
        << "\"gammas\":[0.0],\"curve_mode\":\"infinite_horizon\",\"tol\":1e-7,"
        << "\"grid_step\":" << g.step << ",\"grid_x_max\":" << g.x_max << ",\"output_dir\":\""
        << out0.string() << "\"}";
    write_file(cfg0, os0.str());
    REQUIRE(run_cli("barrier-curve " + cfg0.string()) == 0);
    const auto row = csv_column(out0 / "curve.csv", 1);
    REQUIRE(row.size() == 1);
    const double rn_barrier = risk_neutral_xi(m, 0.9, SurplusGrid(g.step, g.n), 1e-7);
    // same grid node; the CSV round-trips 12 significant digits
    CHECK(std::abs(row[0] - rn_barrier) < 0.5 * g.step);
    CHECK(row[0] == doctest::Approx(rn_barrier).epsilon(1e-9));

    write_file(cfg0, "{\"model_kind\":\"double_exponential\",\"mu\":2.0,\"beta\":0.9,"
                     "\"gammas\":[],\"output_dir\":\"" + out0.string() + "\"}");
    CHECK(run_cli("barrier-curve " + cfg0.string()) == 2);
}

TEST_CASE("validate passes on the default setup and fails on a crude grid") {
    auto m = IncrementModel::double_exponential(2.0);
    const auto g = small_grid(m, 0.9, 1.0 / 50.0);
    const fs::path out = work_dir() / "validate";
    const fs::path cfg = work_dir() / "validate.json";
    write_file(cfg, config_de(2.0, 0.9, 0.5, g.step, g.x_max, out,
                              ",\"horizon\":2,\"mc_outer\":20000,\"mc_seed\":11"));
    REQUIRE(run_cli("validate " + cfg.string()) == 0);
    const std::string table = read_file(out / "validate.csv");
    CHECK(table.find("fail") == std::string::npos);

    // identical bytes under the same seed
    const fs::path out2 = work_dir() / "validate_rerun";
    REQUIRE(run_cli("validate " + cfg.string() + " output_dir=\"" + out2.string() + "\"") == 0);
    CHECK(read_file(out / "validate.csv") == read_file(out2 / "validate.csv"));

    // demanding more precision than the estimator pairing resolves must
    // surface as fail rows and exit code 4
    const fs::path out3 = work_dir() / "validate_fail";
    const fs::path cfg3 = work_dir() / "validate_fail.json";
    write_file(cfg3, config_de(2.0, 0.9, 0.5, g.step, g.x_max, out3,
                               ",\"horizon\":2,\"mc_outer\":20000,\"mc_seed\":11,"
                               "\"pass_sigma\":1e-4"));
    CHECK(run_cli("validate " + cfg3.string()) == 4);
    CHECK(read_file(out3 / "validate.csv").find("fail") != std::string::npos);
}

}  // TEST_SUITE
