#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string cli = DPSCHED_CLI;
const std::string configs = DPSCHED_CONFIG_DIR;

fs::path scratch()
{
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("dpsched_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::string& args)
{
    auto out = scratch() / "stdout.txt";
    auto err = scratch() / "stderr.txt";
    std::string cmd = cli + " " + args + " >" + out.string() + " 2>" + err.string();
    int status = std::system(cmd.c_str());
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, slurp(out), slurp(err)};
}

std::string config(const std::string& name)
{
    return "--config " + configs + "/" + name;
}

fs::path write_config(const std::string& name, const std::string& text)
{
    auto p = scratch() / name;
    std::ofstream(p) << text;
    return p;
}

// Data rows of a CSV written by the tool: comment and header lines dropped.
std::vector<std::vector<std::string>> rows(const std::string& csv)
{
    std::vector<std::vector<std::string>> out;
    std::stringstream ss(csv);
    std::string line;
    bool header = true;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        out.push_back(cells);
    }
    return out;
}

} // namespace

TEST_CASE("solve reports and exit codes")
{
    auto ok = run("solve " + config("two_channel.json"));
    CHECK(ok.code == 0);
    CHECK(ok.out.find("delay       2.86941338") != std::string::npos);
    CHECK(ok.out.find("thresholds  T=") != std::string::npos);

    // above saturation: the always-transmit delay, 0.55 / 1.089 ...
    auto sat = run("solve " + config("two_channel.json") + " --p-aver 4 --format csv");
    REQUIRE(sat.code == 0);
    auto r = rows(sat.out);
    REQUIRE(r.size() == 1);
    CHECK(r[0][1] == "0.505050505");

    auto zero = run("solve " + config("two_channel.json") + " --p-aver 0");
    CHECK(zero.code == 3);
    CHECK(zero.err.find("P_min = 1.5622") != std::string::npos);

    auto bad = write_config("bad_theta.json", R"({"arrival": {"probs": [0.5, 0.6]},
        "channel": {"probs": [1], "powers": [1]}, "buffer": {"capacity": 4}})");
    auto b = run("solve --config " + bad.string() + " --p-aver 1");
    CHECK(b.code == 2);
    CHECK(b.err.find("arrival") != std::string::npos);

    auto missing = write_config("missing.json", R"({"channel": {"probs": [1], "powers": [1]},
        "buffer": {"capacity": 4}})");
    auto m = run("solve --config " + missing.string() + " --p-aver 1");
    CHECK(m.code == 2);
    CHECK(m.err.find("arrival.probs") != std::string::npos);

    CHECK(run("solve " + config("two_channel.json") + " --no-such-flag").code == 2);
    CHECK(run("solve --config /nonexistent.json").code == 2);
}

TEST_CASE("sweep endpoints agree with solve")
{
    auto s = run("solve " + config("two_channel.json") + " --format csv");
    REQUIRE(s.code == 0);
    auto head = rows(s.out).at(0);
    std::string p_min = head[3];
    std::string p_max = head[4];

    auto out = scratch() / "sweep2.csv";
    auto sw = run("sweep " + config("two_channel.json") + " --points 2 --out " + out.string());
    REQUIRE(sw.code == 0);
    auto csv = slurp(out);
    CHECK(csv.rfind("# dpsched sweep v1\np_aver,feasible,delay,power,thresholds\n", 0) == 0);
    auto r = rows(csv);
    REQUIRE(r.size() == 2);
    CHECK(r[0][0] == p_min);
    CHECK(r[1][0] == p_max);
    for (const auto& row : r) {
        auto one = run("solve " + config("two_channel.json") + " --format csv --p-aver " + row[0]);
        REQUIRE(one.code == 0);
        CHECK(rows(one.out).at(0)[1] == row[2]);
    }

    auto below = run("sweep " + config("two_channel.json") + " --p-min 1 --p-max 2 --points 3");
    REQUIRE(below.code == 0);
    auto rb = rows(below.out);
    CHECK(rb[0][1] == "0");
    CHECK(rb[0][2] == "nan");
    CHECK(rb[2][1] == "1");
}

TEST_CASE("burstier arrivals cost delay")
{
    // same mean arrival rate 0.55, variance 0.4975 versus 0.2475
    auto hi = run("sweep " + config("two_channel.json") + " --p-min 1.6 --p-max 3.3 --points 18");
    auto lo = run("sweep " + config("bernoulli_055.json") + " --p-min 1.6 --p-max 3.3 --points 18");
    REQUIRE(hi.code == 0);
    REQUIRE(lo.code == 0);
    auto rh = rows(hi.out);
    auto rl = rows(lo.out);
    REQUIRE(rh.size() == rl.size());
    for (std::size_t i = 0; i < rh.size(); ++i) {
        INFO("p_aver " << rh[i][0]);
        CHECK(std::stod(rh[i][2]) > std::stod(rl[i][2]));
    }
}

TEST_CASE("simulate is reproducible")
{
    auto a = scratch() / "sim_a.csv";
    auto b = scratch() / "sim_b.csv";
    auto c = scratch() / "sim_c.csv";
    std::string base = "simulate " + config("two_channel.json") + " --slots 100000 ";
    REQUIRE(run(base + "--seed 11 --out " + a.string()).code == 0);
    REQUIRE(run(base + "--seed 11 --out " + b.string()).code == 0);
    REQUIRE(run(base + "--seed 12 --out " + c.string()).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
    CHECK(slurp(a).rfind("# dpsched simulate v1\n", 0) == 0);
}

TEST_CASE("verify passes on solved instances")
{
    auto v = run("verify " + config("two_channel.json"));
    CHECK(v.code == 0);
    CHECK(v.out.find("FAIL") == std::string::npos);
    CHECK(v.out.find("round_trip") != std::string::npos);
    CHECK(run("verify " + config("four_channel.json")).code == 0);
}

TEST_CASE("oracle agrees with the LP on a small instance")
{
    auto o = run("oracle " + config("small.json"));
    CHECK(o.code == 0);
    CHECK(o.err.find("policies 256") != std::string::npos);
    CHECK(rows(o.out).size() == 256);
}

TEST_CASE("table build, save and load")
{
    auto t = scratch() / "four_channel_table.csv";
    REQUIRE(run("table " + config("four_channel.json") + " --out " + t.string()).code == 0);
    auto built = run("table " + config("four_channel.json") + " --p-aver 1.2");
    auto loaded = run("table " + config("four_channel.json") + " --load " + t.string() + " --p-aver 1.2");
    REQUIRE(built.code == 0);
    REQUIRE(loaded.code == 0);
    CHECK(built.out == loaded.out);
    CHECK(run("table " + config("two_channel.json") + " --load " + t.string() + " --p-aver 1.2").code == 2);
    CHECK(run("table " + config("four_channel.json") + " --p-aver -1").code == 3);
}
