#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string cli = ROBIN_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    if (st == -1) return -1;
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path("cli_scratch") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
    double num(std::size_t row, const std::string& name) const {
        const int c = col(name);
        REQUIRE(c >= 0);
        return std::stod(rows[row][c]);
    }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

Csv read_csv(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    Csv t;
    std::string line;
    REQUIRE(std::getline(in, line));
    t.header = split(line);
    while (std::getline(in, line))
        if (!line.empty()) t.rows.push_back(split(line));
    return t;
}

std::string elliptic_cfg(const std::string& data_block) {
    return "[geometry]\n"
           "r1 = 1.0\nr2 = 2.0\nn_r = 33\nn_theta = 16\n"
           "[problem]\nkind = elliptic\n"
           "[gamma]\ntype = constant\nvalue = 1.5\nlo = 0.5\nhi = 3.0\n" +
           data_block;
}

const char* kParabolicCfg =
    "[geometry]\n"
    "r1 = 1.0\nr2 = 2.0\nn_r = 17\nn_theta = 8\n"
    "[problem]\nkind = parabolic\n"
    "[time]\nT = 1.0\nn_t = 8\nscheme = ie\n"
    "[gamma]\ntype = constant\nvalue = 1.5\nlo = 0.5\nhi = 3.0\n"
    "[data]\ntype = oracle\nc1 = 0.3\nc2 = 1.0\n";

}  // namespace

TEST_CASE("argument errors exit with the usage code") {
    CHECK(run("") == 2);
    CHECK(run("no-such-command") == 2);
    CHECK(run("forward") == 2);
    CHECK(run("--help") == 0);
    CHECK(run("forward --help") == 0);
}

TEST_CASE("config errors exit with the usage code") {
    const fs::path dir = scratch("badcfg");
    CHECK(run("forward --config " + (dir / "nope.cfg").string() + " --out " + dir.string()) == 2);

    write_file(dir / "unknown.cfg", elliptic_cfg("[data]\ntype = zero\nwhatever = 1\n"));
    CHECK(run("forward --config " + (dir / "unknown.cfg").string() + " --out " + dir.string()) ==
          2);

    write_file(dir / "kind.cfg",
               "[geometry]\nr1 = 1.0\nr2 = 2.0\nn_r = 9\nn_theta = 8\n"
               "[problem]\nkind = banana\n"
               "[gamma]\ntype = constant\nvalue = 1.0\nlo = 0.1\nhi = 5.0\n"
               "[data]\ntype = zero\n");
    CHECK(run("forward --config " + (dir / "kind.cfg").string() + " --out " + dir.string()) == 2);

    write_file(dir / "geom.cfg", "[geometry]\nr1 = 2.0\nr2 = 1.0\nn_r = 9\nn_theta = 8\n"
                                 "[problem]\nkind = elliptic\n"
                                 "[gamma]\ntype = constant\nvalue = 1.0\nlo = 0.1\nhi = 5.0\n"
                                 "[data]\ntype = zero\n");
    CHECK(run("forward --config " + (dir / "geom.cfg").string() + " --out " + dir.string()) == 2);

    // the time block belongs to parabolic runs only, and cn needs one
    write_file(dir / "time.cfg",
               elliptic_cfg("[data]\ntype = zero\n") + "[time]\nT = 1.0\nn_t = 4\n");
    CHECK(run("forward --config " + (dir / "time.cfg").string() + " --out " + dir.string()) == 2);
    write_file(dir / "plain.cfg", elliptic_cfg("[data]\ntype = zero\n"));
    CHECK(run("forward --config " + (dir / "plain.cfg").string() + " --out " + dir.string() +
              " --scheme cn") == 2);
}

TEST_CASE("zero data produce zero fields and traces") {
    const fs::path dir = scratch("zero");
    write_file(dir / "z.cfg", elliptic_cfg("[data]\ntype = zero\n"));
    REQUIRE(run("forward --config " + (dir / "z.cfg").string() + " --out " + dir.string()) == 0);

    const Csv field = read_csv(dir / "field.csv");
    REQUIRE(field.rows.size() == 33u * 16u);
    for (std::size_t i = 0; i < field.rows.size(); ++i) CHECK(field.num(i, "value") == 0.0);
    const Csv trace = read_csv(dir / "trace.csv");
    REQUIRE(trace.rows.size() == 16u);
    for (std::size_t i = 0; i < trace.rows.size(); ++i) CHECK(trace.num(i, "value") == 0.0);
}

TEST_CASE("oracle data carry exact values and a small error column") {
    const fs::path dir = scratch("oracle");
    write_file(dir / "o.cfg", elliptic_cfg("[data]\ntype = oracle\nc1 = 2.0\nc2 = 0.5\n"));
    REQUIRE(run("forward --config " + (dir / "o.cfg").string() + " --out " + dir.string()) == 0);

    const Csv field = read_csv(dir / "field.csv");
    REQUIRE(field.col("exact") >= 0);
    REQUIRE(field.col("error") >= 0);
    double max_err = 0.0;
    for (std::size_t i = 0; i < field.rows.size(); ++i) {
        max_err = std::max(max_err, std::abs(field.num(i, "error")));
        CHECK(field.num(i, "exact") ==
              doctest::Approx(2.0 + 0.5 * std::log(field.num(i, "r"))).epsilon(1e-12));
    }
    CHECK(max_err < 1e-2);
}

TEST_CASE("file-backed gamma and data drive a forward solve") {
    const fs::path dir = scratch("filedata");
    std::ostringstream gcsv;
    gcsv << "gamma\n";
    for (int j = 0; j < 16; ++j) gcsv << 1.5 + 0.2 * std::cos(2.0 * M_PI * j / 16.0) << "\n";
    write_file(dir / "gamma.csv", gcsv.str());
    std::ostringstream dcsv;
    dcsv << "g,h\n";
    for (int j = 0; j < 16; ++j) dcsv << "1.0,0.25\n";
    write_file(dir / "data.csv", dcsv.str());

    write_file(dir / "f.cfg",
               "[geometry]\nr1 = 1.0\nr2 = 2.0\nn_r = 33\nn_theta = 16\n"
               "[problem]\nkind = elliptic\n"
               "[gamma]\ntype = file\npath = " +
                   (dir / "gamma.csv").string() +
                   "\nlo = 0.5\nhi = 3.0\n"
                   "[data]\ntype = file\npath = " +
                   (dir / "data.csv").string() + "\n");
    REQUIRE(run("forward --config " + (dir / "f.cfg").string() + " --out " + dir.string()) == 0);
    const Csv trace = read_csv(dir / "trace.csv");
    REQUIRE(trace.rows.size() == 16u);
    for (std::size_t i = 0; i < trace.rows.size(); ++i) CHECK(trace.num(i, "value") > 0.0);

    // wrong row count is addressed to the file
    write_file(dir / "short.csv", "gamma\n1.0\n1.0\n");
    write_file(dir / "s.cfg",
               "[geometry]\nr1 = 1.0\nr2 = 2.0\nn_r = 33\nn_theta = 16\n"
               "[problem]\nkind = elliptic\n"
               "[gamma]\ntype = file\npath = " +
                   (dir / "short.csv").string() +
                   "\nlo = 0.5\nhi = 3.0\n"
                   "[data]\ntype = zero\n");
    CHECK(run("forward --config " + (dir / "s.cfg").string() + " --out " + dir.string()) == 2);
}

TEST_CASE("sensitivity construction reproduces the radial response") {
    const fs::path dir = scratch("sens");
    write_file(dir / "s.cfg", elliptic_cfg("[data]\ntype = oracle\nc1 = 2.0\nc2 = 0.5\n") +
                                  "[sensitivity]\ntype = construction\n");
    REQUIRE(run("sensitivity --config " + (dir / "s.cfg").string() + " --out " + dir.string()) ==
            0);
    const Csv trace = read_csv(dir / "sensitivity_trace.csv");
    REQUIRE(trace.rows.size() == 16u);
    for (std::size_t i = 0; i < trace.rows.size(); ++i)
        CHECK(trace.num(i, "value") == doctest::Approx(-0.5).epsilon(2e-2));
}

TEST_CASE("probe output is byte-identical across jobs and seeds") {
    const fs::path dir = scratch("probe");
    write_file(dir / "p.cfg", elliptic_cfg("[data]\ntype = oracle\nc1 = 2.0\nc2 = 0.5\n") +
                                  "[probe]\nb = 0.1\nn_samples = 8\nseed = 42\nmode = radial\n");
    const std::string base = "probe --config " + (dir / "p.cfg").string();
    REQUIRE(run(base + " --out " + (dir / "j1").string() + " --jobs 1") == 0);
    REQUIRE(run(base + " --out " + (dir / "j4").string() + " --jobs 4") == 0);
    REQUIRE(run(base + " --out " + (dir / "s9").string() + " --jobs 4 --seed 9") == 0);

    const std::string a = slurp(dir / "j1" / "probe.csv");
    CHECK(a == slurp(dir / "j4" / "probe.csv"));
    CHECK(a != slurp(dir / "s9" / "probe.csv"));

    const Csv t = read_csv(dir / "j1" / "probe.csv");
    REQUIRE(t.rows.size() == 9u);  // 8 samples plus the summary row
    for (std::size_t i = 0; i + 1 < t.rows.size(); ++i)
        CHECK(t.num(i, "ratio") == doctest::Approx(t.num(i, "coeff_dist") / t.num(i, "data_dist"))
                                       .epsilon(1e-12));
}

TEST_CASE("reconstruct recovers the coefficient and is run-to-run deterministic") {
    const fs::path dir = scratch("rec");
    write_file(dir / "r.cfg",
               elliptic_cfg("[data]\ntype = oracle\nc1 = 2.0\nc2 = 0.5\nnoise = 0.01\nseed = 5\n") +
                   "[reconstruct]\ngamma0 = 1.0\nmax_iters = 25\n");
    const std::string base = "reconstruct --config " + (dir / "r.cfg").string();
    REQUIRE(run(base + " --out " + (dir / "a").string()) == 0);
    REQUIRE(run(base + " --out " + (dir / "b").string() + " --jobs 4") == 0);
    CHECK(slurp(dir / "a" / "gamma_hat.csv") == slurp(dir / "b" / "gamma_hat.csv"));
    CHECK(slurp(dir / "a" / "history.csv") == slurp(dir / "b" / "history.csv"));

    // 1% noise on 16 angles leaves visible scatter in the weak high modes;
    // the angular mean and the overall distance still have to land
    const Csv g = read_csv(dir / "a" / "gamma_hat.csv");
    REQUIRE(g.rows.size() == 16u);
    double mean = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < g.rows.size(); ++i) {
        CHECK(g.num(i, "gamma_truth") == 1.5);
        mean += g.num(i, "gamma_hat") / 16.0;
        sq += std::pow(g.num(i, "gamma_hat") - 1.5, 2);
    }
    CHECK(mean == doctest::Approx(1.5).epsilon(5e-2));
    CHECK(std::sqrt(sq / (16.0 * 1.5 * 1.5)) < 0.4);
    const Csv h = read_csv(dir / "a" / "history.csv");
    CHECK(h.rows.size() >= 2u);
    CHECK(h.num(h.rows.size() - 1, "misfit") < h.num(0, "misfit"));
}

TEST_CASE("parabolic commands run under both schemes") {
    const fs::path dir = scratch("par");
    write_file(dir / "p.cfg", std::string(kParabolicCfg) +
                                  "[reconstruct]\ngamma0 = 1.0\nmax_iters = 10\n"
                                  "[probe]\nb = 0.1\nn_samples = 4\nseed = 3\nmode = radial\n");
    const std::string cfg = (dir / "p.cfg").string();
    REQUIRE(run("forward --config " + cfg + " --out " + (dir / "ie").string()) == 0);
    REQUIRE(run("forward --config " + cfg + " --out " + (dir / "cn").string() + " --scheme cn") ==
            0);
    const Csv field = read_csv(dir / "ie" / "field.csv");
    REQUIRE(field.col("t") >= 0);
    CHECK(field.rows.size() == 9u * 17u * 8u);
    CHECK(slurp(dir / "ie" / "field.csv") != slurp(dir / "cn" / "field.csv"));

    REQUIRE(run("reconstruct --config " + cfg + " --out " + (dir / "rec").string()) == 0);
    const Csv g = read_csv(dir / "rec" / "gamma_hat.csv");
    for (std::size_t i = 0; i < g.rows.size(); ++i)
        CHECK(g.num(i, "gamma_hat") == doctest::Approx(1.5).epsilon(1e-3));

    REQUIRE(run("probe --config " + cfg + " --out " + (dir / "pr1").string() + " --jobs 1") == 0);
    REQUIRE(run("probe --config " + cfg + " --out " + (dir / "pr4").string() + " --jobs 4") == 0);
    CHECK(slurp(dir / "pr1" / "probe.csv") == slurp(dir / "pr4" / "probe.csv"));

    // compare-bc stays an elliptic diagnostic
    CHECK(run("compare-bc --config " + cfg + " --out " + (dir / "cb").string()) == 2);
}

TEST_CASE("compare-bc writes the three-way diagnostic") {
    const fs::path dir = scratch("cbc");
    write_file(dir / "c.cfg", elliptic_cfg("[data]\ntype = oracle\nc1 = 2.0\nc2 = 0.5\n"));
    REQUIRE(run("compare-bc --config " + (dir / "c.cfg").string() + " --out " + dir.string()) ==
            0);
    const Csv t = read_csv(dir / "compare_bc.csv");
    REQUIRE(t.col("outer_bc") >= 0);
    REQUIRE(t.rows.size() == 3u * 9u);  // three conditions, modes k = 0..8
    CHECK(t.rows[0][t.col("outer_bc")] == "robin");
    CHECK(t.rows[9][t.col("outer_bc")] == "neumann");
    CHECK(t.rows[18][t.col("outer_bc")] == "dirichlet");
    for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(t.num(i, "mode_response") > 0.0);
}

TEST_CASE("oracle-check passes on the small grid and fails when corrupted") {
    const fs::path dir = scratch("ocheck");
    write_file(dir / "o.cfg", elliptic_cfg("[data]\ntype = zero\n"));
    CHECK(run("oracle-check --config " + (dir / "o.cfg").string() + " --out " +
              (dir / "ok").string()) == 0);
    const Csv t = read_csv(dir / "ok" / "oracle_check.csv");
    CHECK(t.rows.size() == 13u);

    CHECK(run("oracle-check --corrupt-oracle --out " + (dir / "bad").string()) == 1);
    const Csv bad = read_csv(dir / "bad" / "oracle_check.csv");
    bool saw_fail = false;
    for (std::size_t i = 0; i < bad.rows.size(); ++i)
        if (bad.rows[i][bad.col("status")] == "FAIL") saw_fail = true;
    CHECK(saw_fail);
}
