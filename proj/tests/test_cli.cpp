#include "phasefield/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace phasefield;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("phasefield_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "phasefield");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text)
{
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t line_count(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

constexpr const char* kBase = R"([potential]
kind = "double_well"
[grid]
J = 64
[scheme]
epsilon = 0.01
dt = 0.1
steps = 40
record_every = 10
[initial]
kind = "random_uniform"
seed = 42
)";

}  // namespace

TEST_CASE("cli run")
{
    TempDir tmp;
    const auto cfg = write(tmp.path, "run.cfg", kBase);
    const auto out = tmp.path / "out";

    const auto ok = invoke({"run", "--config", cfg.string(), "--out", out.string()});
    CHECK(ok.code == kExitOk);
    CHECK(fs::exists(out / "run.csv"));
    CHECK(line_count(slurp(out / "run.csv")) == 1 + 5);
    auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(summary["dt"].get<double>() == 0.1);

    const auto over = invoke({"run", "-c", cfg.string(), "--set", "dt=0.5", "-o", out.string()});
    CHECK(over.code == kExitOk);
    summary = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(summary["dt"].get<double>() == 0.5);

    // Same configuration twice: identical CSV bytes.
    const auto a = slurp(out / "run.csv");
    invoke({"run", "-c", cfg.string(), "--set", "dt=0.5", "-o", out.string()});
    CHECK(slurp(out / "run.csv") == a);
}

TEST_CASE("cli errors map to exit code 1")
{
    TempDir tmp;
    const auto missing = (tmp.path / "nope.cfg").string();
    const auto r = invoke({"run", "--config", missing});
    CHECK(r.code == kExitError);
    CHECK(r.err.find(missing) != std::string::npos);

    const auto cfg = write(tmp.path, "run.cfg", kBase);
    CHECK(invoke({"run", "-c", cfg.string(), "--set", "bogus=1"}).code == kExitError);
    CHECK(invoke({"run", "-c", cfg.string(), "--set", "scheme.steps=0"}).code == kExitError);
    CHECK(invoke({"frobnicate"}).code == kExitError);
    CHECK(invoke({}).code == kExitError);
    CHECK(invoke({"run"}).code == kExitError);
    CHECK(invoke({"--help"}).code == kExitOk);
}

TEST_CASE("cli check reports without running")
{
    TempDir tmp;
    const auto cfg = write(tmp.path, "dw.cfg", std::string(kBase) + "[output]\npath = \"" +
                                                   (tmp.path / "never").string() + "\"\n");
    auto r = invoke({"check", "-c", cfg.string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("dt_max             = 0.5\n") != std::string::npos);
    CHECK(r.out.find("L                  = 1\n") != std::string::npos);
    CHECK(r.out.find("endpoints_vanish   = true") != std::string::npos);
    CHECK_FALSE(fs::exists(tmp.path / "never"));

    const auto bad = write(tmp.path, "bad.cfg",
                           "[potential]\nkind = \"polynomial\"\ncoeffs = [0, -0.5, 0.5]\n");
    r = invoke({"check", "-c", bad.string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("endpoints_vanish   = false") != std::string::npos);

    const auto concave = write(tmp.path, "concave.cfg",
                               "[potential]\nkind = \"polynomial\"\ncoeffs = [0, 0, -0.5]\n");
    r = invoke({"check", "-c", concave.string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("dt_max             = inf\n") != std::string::npos);

    const auto broken = write(tmp.path, "broken.cfg", "[potential]\nkind = 7 7\nnope = 1\n");
    CHECK(invoke({"check", "-c", broken.string()}).code == kExitError);
}

TEST_CASE("cli sweep and converge")
{
    TempDir tmp;
    const auto sweep_cfg = write(tmp.path, "sweep.cfg",
                                 std::string(kBase) + "[sweep]\ndt_grid = [0.05, 0.1, 0.25, 0.5, 1]\n");
    const auto out = tmp.path / "out";
    auto r = invoke({"sweep", "-c", sweep_cfg.string(), "-o", out.string()});
    CHECK(r.code == kExitOk);
    CHECK(line_count(slurp(out / "sweep.csv")) == 1 + 5);
    CHECK(slurp(out / "sweep.csv").rfind(
              "dt,within_bound,first_bound_violation_step,first_energy_increase_step,final_energy\n",
              0) == 0);

    const auto conv_cfg = write(tmp.path, "conv.cfg",
                                R"([grid]
J = 64
[scheme]
epsilon = 0.1
dt = auto
[initial]
kind = "sine_wave"
amplitude = 0.5
[converge]
ladder_dt = [0.01, 0.005, 0.0025]
ladder_J = 64
reference_dt = 0.0003125
reference_J = 64
final_time = 0.05
)");
    r = invoke({"converge", "-c", conv_cfg.string(), "-o", out.string()});
    CHECK(r.code == kExitOk);
    const auto csv = slurp(out / "convergence.csv");
    CHECK(line_count(csv) == 1 + 3);
    CHECK(csv.find(",none\n") != std::string::npos);
    const auto j = nlohmann::json::parse(slurp(out / "convergence.json"));
    CHECK(j["rows"][0]["observed_order"].is_null());
    CHECK_FALSE(j["rows"][1]["observed_order"].is_null());
    CHECK_FALSE(j["rows"][2]["observed_order"].is_null());
}

TEST_CASE("exit codes for theorem violations")
{
    RunSummary s;
    CHECK(exit_code_for(s) == kExitOk);
    s.first_violation = FirstViolation{12, "energy_decay"};
    CHECK(exit_code_for(s) == kExitTheoremViolated);

    SweepResult sw;
    sw.rows.resize(2);
    sw.rows[1].first_bound_violation_step = 3;  // inactive rows only report
    CHECK(exit_code_for(sw) == kExitOk);
    sw.rows[0].first_active_violation = FirstViolation{1, "max_principle"};
    CHECK(exit_code_for(sw) == kExitTheoremViolated);

    ConvergenceTable t;
    CHECK(exit_code_for(t) == kExitOk);
    t.all_active_satisfied = false;
    CHECK(exit_code_for(t) == kExitTheoremViolated);
}
