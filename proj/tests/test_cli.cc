#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

// Runs the CLI with `args`, capturing stdout; stderr is discarded.
Outcome cli(const std::string& args) {
    const std::string cmd = fmt::format("'{}' {} 2>/dev/null", QCSOC_CLI_PATH, args);
    Outcome o;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return o;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) o.out.append(buf, n);
    const int status = pclose(p);
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("qcsoc_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST(Cli, ExitCodes) {
    const fs::path d = scratch("codes");
    write(d / "bad.json", R"({"plant": {"nope": 1}})");
    write(d / "bad.s", "bogus a0\n");
    EXPECT_EQ(cli("").code, 64);
    EXPECT_EQ(cli("frobnicate").code, 64);
    EXPECT_EQ(cli(fmt::format("run --config {}", (d / "bad.json").string())).code, 64);
    EXPECT_EQ(cli(fmt::format("run --config {}", (d / "missing.json").string())).code, 66);
    EXPECT_EQ(cli(fmt::format("run --program {}", (d / "missing.s").string())).code, 66);
    EXPECT_EQ(cli(fmt::format("asm --program {} --out-dir {}", (d / "bad.s").string(), d.string())).code, 65);
    EXPECT_EQ(cli(fmt::format("run --program builtin:readout --trace-channels 99 --out-dir {}", d.string())).code, 64);
    EXPECT_EQ(cli("run --program builtin:nope").code, 64);
}

TEST(Cli, SingleShotReturnsGuestExitCode) {
    const fs::path d = scratch("exit");
    write(d / "p.s", "li a0, 42\necall\n");
    EXPECT_EQ(cli(fmt::format("run --program {} --out-dir {}", (d / "p.s").string(), d.string())).code, 42);
    write(d / "loop.s", "spin: j spin\n");
    write(d / "cfg.json", R"({"max_cycles": 1000})");
    EXPECT_EQ(cli(fmt::format("run --config {} --program {} --out-dir {}", (d / "cfg.json").string(),
                              (d / "loop.s").string(), d.string()))
                  .code,
              71);
}

TEST(Cli, MapListsRegions) {
    const Outcome o = cli("map --format kv");
    ASSERT_EQ(o.code, 0);
    EXPECT_NE(o.out.find("0x40000000"), std::string::npos) << o.out;
    EXPECT_NE(o.out.find("0x41000710"), std::string::npos) << o.out;
    const Outcome t = cli("map --format table");
    ASSERT_EQ(t.code, 0);
    EXPECT_NE(t.out.find("ENV(3)"), std::string::npos) << t.out;
}

TEST(Cli, AsmDisasmRoundTrip) {
    const fs::path d = scratch("asm");
    write(d / "p.s", "li a0, 0x12345\nloop: addi a0, a0, -1\nbnez a0, loop\necall\n");
    ASSERT_EQ(cli(fmt::format("asm --program {} --out-dir {} --symbols", (d / "p.s").string(), d.string())).code, 0);
    EXPECT_EQ(fs::file_size(d / "p.bin"), 20u);
    EXPECT_NE(slurp(d / "p.sym").find("loop"), std::string::npos);
    const Outcome dis = cli(fmt::format("disasm --program {}", (d / "p.bin").string()));
    ASSERT_EQ(dis.code, 0);
    const fs::path d2 = scratch("asm2");
    write(d2 / "p.s", dis.out);
    ASSERT_EQ(cli(fmt::format("asm --program {} --out-dir {}", (d2 / "p.s").string(), d2.string())).code, 0);
    EXPECT_EQ(slurp(d / "p.bin"), slurp(d2 / "p.bin"));
}

// Same inputs give byte-identical artifacts whatever the thread count.
TEST(Cli, RunOutputsAreReproducible) {
    std::vector<fs::path> dirs;
    for (int threads : {1, 1, 3}) {
        const fs::path d = scratch(fmt::format("repro{}", dirs.size()));
        const Outcome o = cli(fmt::format(
            "run --program builtin:fast-reset-branch --shots 50 --seed 17 --threads {} --trace-channels 0,15 --out-dir {}",
            threads, d.string()));
        ASSERT_EQ(o.code, 0);
        dirs.push_back(d);
    }
    for (const char* f : {"shots.csv", "waveform.csv", "manifest.txt"}) {
        const std::string a = slurp(dirs[0] / f);
        EXPECT_FALSE(a.empty()) << f;
        EXPECT_EQ(a, slurp(dirs[1] / f)) << f;
        EXPECT_EQ(a, slurp(dirs[2] / f)) << f;
    }
    const std::string shots = slurp(dirs[0] / "shots.csv");
    EXPECT_EQ(shots.rfind("shot,measured_state,I,Q,cycles\n", 0), 0u);
    EXPECT_EQ(std::count(shots.begin(), shots.end(), '\n'), 51);
    const std::string manifest = slurp(dirs[0] / "manifest.txt");
    EXPECT_NE(manifest.find("seed=17\n"), std::string::npos) << manifest;
    EXPECT_NE(manifest.find("shots=50\n"), std::string::npos) << manifest;
}

TEST(Cli, LatencyReportBalances) {
    for (const char* prog : {"builtin:fast-reset-branch", "builtin:fast-reset-branchless"}) {
        const Outcome o = cli(fmt::format("latency --program {}", prog));
        EXPECT_EQ(o.code, 0) << prog;
        EXPECT_NE(o.out.find("ns"), std::string::npos) << o.out;
    }
}
