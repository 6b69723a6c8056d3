// qcsoc: batch front-end for the controller simulator.
//
// Exit codes: 0 ok (or the guest exit code of a single-shot run), 64 bad
// configuration or usage, 65 assembly error, 66 missing input, 70 guest
// fault, 71 timeout.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qcsoc/assembler.h"
#include "qcsoc/config.h"
#include "qcsoc/experiment.h"

namespace fs = std::filesystem;
using namespace qcsoc;

namespace {

constexpr int kExitConfig = 64;
constexpr int kExitAssembly = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitGuestFault = 70;
constexpr int kExitTimeout = 71;

struct Common {
    std::string config;
    std::string program;
    uint64_t shots = 0;
    std::optional<uint64_t> seed;
    std::string trace_channels;
    std::string out_dir;
    unsigned threads = 0;
};

struct CliError {
    int code;
    std::string message;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw CliError{kExitNoInput, fmt::format("cannot open {}", p.string())};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, std::string_view data) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw CliError{kExitNoInput, fmt::format("cannot write {}", p.string())};
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

fs::path out_dir(const Common& c) {
    fs::path d = c.out_dir.empty() ? fs::path(".") : fs::path(c.out_dir);
    fs::create_directories(d);
    return d;
}

std::vector<int> parse_channels(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            size_t used = 0;
            const int ch = std::stoi(item, &used);
            if (used != item.size() || ch < 0) throw std::invalid_argument(item);
            out.push_back(ch);
        } catch (const std::logic_error&) {
            throw CliError{kExitConfig, fmt::format("--trace-channels: '{}' is not a channel number", item)};
        }
    }
    return out;
}

RunConfig load_config(const Common& c) {
    RunConfig rc;
    if (!c.config.empty()) {
        if (!fs::exists(c.config)) throw CliError{kExitNoInput, fmt::format("config {} not found", c.config)};
        rc = load_run_config(c.config);
    }
    if (!c.program.empty()) {
        rc.program = c.program;
        rc.base_dir.clear();
    }
    if (c.shots) rc.shots = c.shots;
    if (c.seed) rc.seed = *c.seed;
    if (c.threads) rc.threads = c.threads;
    if (!c.trace_channels.empty()) {
        rc.trace_channels = parse_channels(c.trace_channels);
        for (int ch : rc.trace_channels) {
            if (ch >= rc.system.dac_channels) {
                throw CliError{kExitConfig, fmt::format("--trace-channels: DAC channel {} out of range", ch)};
            }
        }
    }
    return rc;
}

LoadedProgram load(RunConfig& rc) {
    if (rc.program.empty()) throw CliError{kExitConfig, "program: missing (use --program or the config's program key)"};
    const bool builtin = rc.program.rfind("builtin:", 0) == 0;
    if (!builtin) {
        fs::path p(rc.program);
        if (p.is_relative() && !rc.base_dir.empty() && !fs::exists(p)) p = rc.base_dir / p;
        if (!fs::exists(p)) throw CliError{kExitNoInput, fmt::format("program {} not found", rc.program)};
    }
    return load_program(rc);
}

int cmd_run(const Common& c) {
    RunConfig rc = load_config(c);
    LoadedProgram prog = load(rc);
    RunOptions opt;
    opt.shots = rc.shots;
    opt.seed = rc.seed;
    opt.max_cycles = rc.max_cycles;
    opt.threads = rc.threads;
    opt.trace_channels = rc.trace_channels;
    opt.capture_readout = rc.dump_readout_buffers;
    const RunResult res = run_shots(rc.system, prog, opt);

    const fs::path dir = out_dir(c);
    write_file(dir / "shots.csv", format_shots_csv(res.records));
    if (!rc.trace_channels.empty()) write_file(dir / "waveform.csv", format_waveform_csv(res.waveform));
    for (size_t ch = 0; ch < res.readout_buffers.size(); ++ch) {
        if (res.readout_buffers[ch].empty()) continue;
        write_samples_file(dir / fmt::format("readout_{}.bin", ch), res.readout_buffers[ch]);
    }
    write_file(dir / "manifest.txt", format_manifest(make_manifest(rc, prog, res)));

    int code = 0;
    for (const auto& r : res.records) {
        switch (r.halt) {
            case HaltReason::kProgramExit: break;
            case HaltReason::kTimeout:
                std::cerr << fmt::format("shot {}: timeout at cycle {}\n", r.shot, r.cycles);
                code = std::max(code, kExitTimeout);
                break;
            default:
                std::cerr << fmt::format("shot {}: {} at pc 0x{:08x}\n", r.shot, halt_reason_name(r.halt), r.pc);
                if (code != kExitTimeout) code = kExitGuestFault;
        }
    }
    if (code == 0 && res.records.size() == 1) code = res.records.front().exit_code & 0xFF;
    return code;
}

int cmd_asm(const Common& c, bool symbols) {
    if (c.program.empty()) throw CliError{kExitConfig, "asm needs --program"};
    RunConfig rc = load_config(Common{c.config, "", 0, {}, "", "", 0});
    const std::string text = slurp(c.program);
    const AssemblyUnit unit = assemble(text, kProgBase, asm_options(rc.system));
    Soc soc(rc.system);
    const auto unmapped = unmapped_mmio_refs(unit, soc.bus().map());
    if (!unmapped.empty()) {
        for (const auto& r : unmapped) {
            std::cerr << fmt::format("line {}: {} = 0x{:08x} is not mapped\n", r.line, r.name, r.address);
        }
        return kExitAssembly;
    }
    const fs::path dir = out_dir(c);
    const std::string stem = fs::path(c.program).stem().string();
    write_file(dir / (stem + ".bin"), std::string_view(reinterpret_cast<const char*>(unit.image.data()), unit.image.size()));
    if (symbols) write_file(dir / (stem + ".sym"), format_symbols(unit));
    std::cout << fmt::format("{}: {} bytes\n", (dir / (stem + ".bin")).string(), unit.image.size());
    return 0;
}

int cmd_disasm(const Common& c, bool comments) {
    if (c.program.empty()) throw CliError{kExitConfig, "disasm needs --program"};
    RunConfig rc = load_config(Common{c.config, "", 0, {}, "", "", 0});
    const std::string bytes = slurp(c.program);
    if (bytes.size() % 4 != 0) throw CliError{kExitConfig, "binary length is not a multiple of 4"};
    const std::string text =
        disassemble(std::span(reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size()), kProgBase,
                    DisasmOptions{comments, rc.system.rv32m});
    if (c.out_dir.empty()) {
        std::cout << text;
    } else {
        write_file(out_dir(c) / (fs::path(c.program).stem().string() + ".s"), text);
    }
    return 0;
}

int cmd_map(const Common& c, const std::string& format) {
    RunConfig rc = load_config(Common{c.config, "", 0, {}, "", "", 0});
    Soc soc(rc.system);
    const AddressMap& map = soc.bus().map();
    const std::string table = format_map_table(map);
    const std::string kv = format_map_keyvalue(map, rc.system.dac_channels, rc.system.adc_channels);
    if (!c.out_dir.empty()) {
        const fs::path dir = out_dir(c);
        write_file(dir / "map.txt", table);
        write_file(dir / "map.kv", kv);
    }
    if (format == "kv") std::cout << kv;
    else if (format == "table") std::cout << table;
    else std::cout << table << '\n' << kv;
    return 0;
}

int cmd_latency(const Common& c) {
    RunConfig rc = load_config(c);
    if (rc.program.empty()) rc.program = "builtin:fast-reset-branchless";
    LoadedProgram prog = load(rc);
    const LatencyReport r = measure_latency(rc.system, prog, rc.seed, rc.max_cycles);
    const std::string text = format_latency(r);
    std::cout << text;
    if (!c.out_dir.empty()) write_file(out_dir(c) / "latency.txt", text);
    return r.measured_loop == r.loop_components() ? 0 : kExitGuestFault;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cycle-accurate quantum-control SoC simulator"};
    app.require_subcommand(1);
    Common c;
    auto add_common = [&](CLI::App* sub, bool run_flags) {
        sub->add_option("--config", c.config, "Experiment file (JSON)");
        sub->add_option("--program", c.program, "Program: assembly, flat .bin, or builtin:<name>");
        sub->add_option("--out-dir", c.out_dir, "Output directory");
        if (run_flags) {
            sub->add_option("--shots", c.shots, "Shot count (overrides the config)");
            sub->add_option("--seed", c.seed, "Seed (overrides the config)");
            sub->add_option("--trace-channels", c.trace_channels, "Comma-separated DAC channels to trace");
            sub->add_option("--threads", c.threads, "Worker threads; results do not depend on it");
        }
    };
    auto* run = app.add_subcommand("run", "Run shots and write CSV, traces and a manifest");
    add_common(run, true);
    bool symbols = false;
    auto* as = app.add_subcommand("asm", "Assemble to a flat binary");
    add_common(as, false);
    as->add_flag("--symbols", symbols, "Also write a symbol file");
    bool comments = false;
    auto* dis = app.add_subcommand("disasm", "Disassemble a flat binary");
    add_common(dis, false);
    dis->add_flag("--comments", comments, "Annotate lines with address and encoding");
    std::string format = "both";
    auto* mp = app.add_subcommand("map", "Print the address map");
    add_common(mp, false);
    mp->add_option("--format", format, "table, kv or both")->check(CLI::IsMember({"table", "kv", "both"}));
    auto* lat = app.add_subcommand("latency", "Decompose feedback latency of one shot");
    add_common(lat, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) return cmd_run(c);
        if (*as) return cmd_asm(c, symbols);
        if (*dis) return cmd_disasm(c, comments);
        if (*mp) return cmd_map(c, format);
        if (*lat) return cmd_latency(c);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << '\n';
        return e.code;
    } catch (const AssemblyError& e) {
        std::cerr << e.what() << '\n';
        return kExitAssembly;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
