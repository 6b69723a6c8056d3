// Python bindings: a thin layer over the C++ API. Configurations cross the
// boundary as JSON text; the package wrapper serializes dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "qcsoc/assembler.h"
#include "qcsoc/config.h"
#include "qcsoc/experiment.h"
#include "qcsoc/hash.h"
#include "qcsoc/trig.h"

namespace py = pybind11;
using namespace qcsoc;

namespace {

RunConfig config_from(const std::string& json_text, const std::string& base_dir) {
    return parse_run_config(nlohmann::json::parse(json_text), base_dir);
}

py::dict record_dict(const ShotRecord& r) {
    py::dict d;
    d["shot"] = r.shot;
    d["measured_state"] = r.state;
    d["I"] = r.i;
    d["Q"] = r.q;
    d["cycles"] = r.cycles;
    d["exit_code"] = r.exit_code;
    d["halt"] = std::string(halt_reason_name(r.halt));
    return d;
}

py::dict run(const std::string& json_text, const std::string& base_dir) {
    RunConfig rc = config_from(json_text, base_dir);
    const LoadedProgram lp = load_program(rc);
    RunOptions o;
    o.shots = rc.shots;
    o.seed = rc.seed;
    o.max_cycles = rc.max_cycles;
    o.threads = rc.threads;
    o.trace_channels = rc.trace_channels;
    RunResult res;
    {
        py::gil_scoped_release release;
        res = run_shots(rc.system, lp, o);
    }
    py::list records;
    for (const auto& r : res.records) records.append(record_dict(r));
    py::dict out;
    out["records"] = records;
    out["shots_csv"] = format_shots_csv(res.records);
    out["waveform_csv"] = format_waveform_csv(res.waveform);
    out["manifest"] = format_manifest(make_manifest(rc, lp, res));
    return out;
}

py::dict latency(const std::string& json_text, const std::string& base_dir) {
    RunConfig rc = config_from(json_text, base_dir);
    if (rc.program.empty()) rc.program = "builtin:fast-reset-branchless";
    const LoadedProgram lp = load_program(rc);
    const LatencyReport r = measure_latency(rc.system, lp, rc.seed, rc.max_cycles);
    py::dict d;
    d["pulse_latency"] = r.pulse_latency;
    d["plant_delay"] = r.plant_delay;
    d["window"] = r.window;
    d["finalize"] = r.finalize;
    d["cpu_reaction"] = r.cpu_reaction;
    d["conditional_latency"] = r.conditional_latency;
    d["measured_loop"] = r.measured_loop;
    d["loop_components"] = r.loop_components();
    d["total_cycles"] = r.total();
    d["total_ns"] = r.ns(r.total());
    return d;
}

}  // namespace

PYBIND11_MODULE(_qcsoc, m) {
    m.doc() = "Cycle-accurate quantum-control SoC simulator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    static py::exception<AssemblyError> asm_error(m, "AssemblyError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const AssemblyError& e) {
            py::set_error(asm_error, e.what());
        }
    });

    m.def("builtin_programs", &builtin_program_names);
    m.def("run", &run, py::arg("config_json"), py::arg("base_dir") = "",
          "Runs the experiment described by a JSON config; returns records, CSV text and the manifest.");
    m.def("latency", &latency, py::arg("config_json"), py::arg("base_dir") = "");

    m.def(
        "assemble",
        [](const std::string& text) {
            const AssemblyUnit u = assemble(text);
            return py::make_tuple(py::bytes(reinterpret_cast<const char*>(u.image.data()), u.image.size()), u.labels);
        },
        py::arg("source"), "Returns (image bytes, labels).");
    m.def(
        "disassemble",
        [](const py::bytes& image, bool comments) {
            const std::string b = image;
            if (b.size() % 4 != 0) throw py::value_error("image length is not a multiple of 4");
            return disassemble(std::span(reinterpret_cast<const uint8_t*>(b.data()), b.size()), kProgBase,
                               DisasmOptions{comments, true});
        },
        py::arg("image"), py::arg("comments") = false);

    m.def(
        "cos_sin",
        [](uint32_t theta, const std::string& backend) {
            const CosSin cs = TrigUnit(parse_trig_backend(backend)).eval(theta);
            return py::make_tuple(cs.c, cs.s);
        },
        py::arg("theta"), py::arg("backend") = "lut:12", "Q1.15 cos and sin of a 32-bit phase word.");
    m.def("git_blob_sha1", [](const py::bytes& b) { return git_blob_sha1(std::string(b)); });
}
