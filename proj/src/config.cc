#include "qcsoc/config.h"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

namespace qcsoc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ConfigError(fmt::format("{}: {}", key, what));
}

int64_t as_int(const json& v, const std::string& key, int64_t lo, int64_t hi) {
    int64_t out = 0;
    if (v.is_number_integer()) {
        if (v.is_number_unsigned() && v.get<uint64_t>() > uint64_t(std::numeric_limits<int64_t>::max())) {
            fail(key, "integer out of range");
        }
        out = v.get<int64_t>();
    } else if (v.is_string()) {
        const std::string s = v.get<std::string>();
        const bool neg = !s.empty() && s[0] == '-';
        std::string body = neg ? s.substr(1) : s;
        int base = 10;
        if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
            body = body.substr(2);
            base = 16;
        }
        size_t used = 0;
        long long mag = 0;
        // Digits only: stoll would accept a sign or leading whitespace here.
        const bool digits = !body.empty() && std::isxdigit(static_cast<unsigned char>(body[0]));
        try {
            if (digits) mag = std::stoll(body, &used, base);
        } catch (const std::out_of_range&) {
            fail(key, fmt::format("'{}' is out of range", s));
        } catch (const std::invalid_argument&) {
            used = 0;
        }
        if (!digits || used != body.size()) fail(key, fmt::format("'{}' is not an integer", s));
        out = neg ? -mag : mag;
    } else {
        fail(key, "expected an integer (decimal or \"0x\" string)");
    }
    if (out < lo || out > hi) fail(key, fmt::format("{} is outside [{}, {}]", out, lo, hi));
    return out;
}

double as_double(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return static_cast<double>(as_int(v, key, std::numeric_limits<int64_t>::min(),
                                                         std::numeric_limits<int64_t>::max()));
    fail(key, "expected a number");
}

bool as_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
}

uint32_t as_u32(const json& v, const std::string& key) {
    return static_cast<uint32_t>(as_int(v, key, std::numeric_limits<int32_t>::min(), 0xFFFF'FFFFll));
}

// Visits every member of an object, rejecting keys without a handler.
class Fields {
   public:
    using Handler = std::function<void(const json&, const std::string&)>;

    Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
    }
    Fields& on(const std::string& name, Handler h) {
        handlers_[name] = std::move(h);
        return *this;
    }
    void run() const {
        for (const auto& [name, value] : obj_.items()) {
            const std::string key = path_.empty() ? name : path_ + "." + name;
            auto it = handlers_.find(name);
            if (it == handlers_.end()) fail(key, "unknown key");
            it->second(value, key);
        }
    }

   private:
    const json& obj_;
    std::string path_;
    std::map<std::string, Handler> handlers_;
};

template <typename T>
Fields::Handler int_into(T& dst, int64_t lo, int64_t hi) {
    return [&dst, lo, hi](const json& v, const std::string& k) { dst = static_cast<T>(as_int(v, k, lo, hi)); };
}

void parse_generator(const json& obj, const std::string& path, GeneratorConfig& g) {
    Fields f(obj, path);
    f.on("envelope_capacity", int_into(g.envelope_capacity, 1, 32768));
    f.on("fifo_depth", int_into(g.fifo_depth, 1, 4096));
    f.on("multiplex", [&](const json& v, const std::string& k) { g.multiplex = as_bool(v, k); });
    f.on("trig", [&](const json& v, const std::string& k) {
        try {
            g.trig = parse_trig_backend(as_string(v, k));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            fail(k, e.what());
        }
    });
    f.on("latency", [&](const json& v, const std::string& k) {
        Fields lat(v, k);
        const char* names[kNumPorts] = {"freq", "phase", "amp", "env", "dur"};
        for (int p = 0; p < kNumPorts; ++p) lat.on(names[p], int_into(g.port_latency[p], 0, 1024));
        lat.run();
    });
    f.run();
}

void parse_decoder(const json& obj, const std::string& path, DecoderChannelConfig& d) {
    Fields f(obj, path);
    f.on("trig", [&](const json& v, const std::string& k) {
        try {
            d.trig = parse_trig_backend(as_string(v, k));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            fail(k, e.what());
        }
    });
    f.on("readout_buffer", [&](const json& v, const std::string& k) {
        Fields rb(v, k);
        rb.on("enabled", [&](const json& x, const std::string& kk) { d.readout_buffer = as_bool(x, kk); });
        rb.on("capacity", int_into(d.readout_buffer_capacity, 1, 1 << 20));
        rb.run();
    });
    f.run();
}

// "dac": {"7": {...}} overrides applied after the defaults block.
void parse_channel_overrides(const json& obj, const std::string& path, std::map<int, json>& out) {
    if (!obj.is_object()) fail(path, "expected an object keyed by channel number");
    for (const auto& [name, value] : obj.items()) {
        const std::string key = path + "." + name;
        size_t used = 0;
        int ch = -1;
        try {
            ch = std::stoi(name, &used);
        } catch (const std::logic_error&) {
            used = 0;
        }
        if (used != name.size() || ch < 0) fail(key, "channel keys must be non-negative integers");
        out[ch] = value;
    }
}

void parse_plant(const json& obj, const std::string& path, SystemConfig& sys) {
    PlantConfig& p = sys.plant;
    Fields f(obj, path);
    f.on("enabled", [&](const json& v, const std::string& k) { sys.plant_enabled = as_bool(v, k); });
    f.on("drive_channel", int_into(p.drive_channel, 0, 31));
    f.on("readout_channel", int_into(p.readout_channel, 0, 31));
    f.on("adc_channel", int_into(p.adc_channel, 0, 31));
    f.on("qubit_freq", [&](const json& v, const std::string& k) { p.qubit_freq = as_u32(v, k); });
    f.on("freq_tolerance", [&](const json& v, const std::string& k) { p.freq_tolerance = as_u32(v, k); });
    f.on("coupling", [&](const json& v, const std::string& k) {
        p.coupling = as_double(v, k);
        if (!(p.coupling >= 0) || !std::isfinite(p.coupling)) fail(k, "must be finite and non-negative");
    });
    f.on("initial_theta", [&](const json& v, const std::string& k) {
        p.initial_theta = as_double(v, k);
        if (!std::isfinite(p.initial_theta)) fail(k, "must be finite");
    });
    f.on("delay", int_into(p.delay, 0, 4096));
    f.on("reflect_amp", int_into(p.reflect_amp, 0, 32767));
    f.on("phase0", [&](const json& v, const std::string& k) { p.phase0 = as_u32(v, k); });
    f.on("phase1", [&](const json& v, const std::string& k) { p.phase1 = as_u32(v, k); });
    f.on("noise_sigma", [&](const json& v, const std::string& k) {
        p.noise_sigma = as_double(v, k);
        if (!(p.noise_sigma >= 0) || !std::isfinite(p.noise_sigma)) fail(k, "must be finite and non-negative");
    });
    f.on("readout_freq", [&](const json& v, const std::string& k) { p.readout_freq = as_u32(v, k); });
    f.run();
}

void parse_program_args(const json& obj, const std::string& path, ProgramArgs& a) {
    Fields f(obj, path);
    f.on("window", int_into(a.window, 1, kMaxWindow));
    f.on("initial_amp", int_into(a.initial_amp, 1, 32767));
    f.on("shots_per_iter", int_into(a.shots_per_iter, 2, 1 << 20));
    f.on("max_iters", int_into(a.max_iters, 1, 100000));
    f.on("check_pulses", int_into(a.check_pulses, 1, 15));
    f.on("shots_per_point", int_into(a.shots_per_point, 1, 1 << 20));
    f.on("amps", [&](const json& v, const std::string& k) {
        if (!v.is_array()) fail(k, "expected an array");
        a.amps.clear();
        for (size_t i = 0; i < v.size(); ++i) {
            a.amps.push_back(static_cast<int32_t>(as_int(v[i], fmt::format("{}[{}]", k, i), -32768, 32767)));
        }
    });
    f.run();
}

EnvelopeSpec parse_envelope(const json& obj, const std::string& path) {
    EnvelopeSpec e;
    bool has_channel = false;
    Fields f(obj, path);
    f.on("channel", [&](const json& v, const std::string& k) {
        e.channel = static_cast<int>(as_int(v, k, 0, 31));
        has_channel = true;
    });
    f.on("start", int_into(e.start, 0, 32767));
    f.on("file", [&](const json& v, const std::string& k) { e.file = as_string(v, k); });
    f.on("shape", [&](const json& v, const std::string& k) {
        e.shape = as_string(v, k);
        if (e.shape != "rect" && e.shape != "gauss" && e.shape != "zero") fail(k, "shape must be rect, gauss or zero");
    });
    f.on("length", int_into(e.length, 1, 32768));
    f.on("value", int_into(e.value, -32768, 32767));
    f.run();
    if (!has_channel) fail(path + ".channel", "missing");
    if (e.file.empty() == e.shape.empty()) fail(path, "exactly one of file or shape is required");
    if (!e.shape.empty() && e.length == 0) fail(path + ".length", "missing");
    return e;
}

std::vector<int> parse_channel_list(const json& v, const std::string& k) {
    if (!v.is_array()) fail(k, "expected an array of channel numbers");
    std::vector<int> out;
    for (size_t i = 0; i < v.size(); ++i) out.push_back(static_cast<int>(as_int(v[i], fmt::format("{}[{}]", k, i), 0, 31)));
    return out;
}

}  // namespace

RunConfig parse_run_config(const json& doc, const fs::path& base_dir) {
    RunConfig rc;
    rc.base_dir = base_dir;
    SystemConfig& sys = rc.system;
    const SystemConfig defaults = SystemConfig::defaults();
    GeneratorConfig dac_default = defaults.generators.front();
    DecoderChannelConfig adc_default = defaults.decoders.front();
    json dac_defaults_doc, adc_defaults_doc;
    std::map<int, json> dac_over, adc_over;

    Fields f(doc, "");
    f.on("system_clock_hz", [&](const json& v, const std::string& k) {
        sys.clock_hz = as_double(v, k);
        if (!(sys.clock_hz > 0) || !std::isfinite(sys.clock_hz)) fail(k, "must be positive");
    });
    f.on("dac_channels", int_into(sys.dac_channels, 1, 32));
    f.on("adc_channels", int_into(sys.adc_channels, 1, 32));
    f.on("samples_per_cycle_dac", int_into(sys.dac_samples_per_cycle, 1, 64));
    f.on("samples_per_cycle_adc", int_into(sys.adc_samples_per_cycle, 1, 64));
    f.on("qubits_per_cpu", int_into(sys.qubits_per_cpu, 1, 32));
    f.on("rv32m", [&](const json& v, const std::string& k) { sys.rv32m = as_bool(v, k); });
    f.on("pipeline", [&](const json& v, const std::string& k) {
        Fields p(v, k);
        p.on("branch_taken_penalty", int_into(sys.pipeline.branch_taken_penalty, 0, 64));
        p.on("mmio_load_latency", int_into(sys.pipeline.mmio_load_latency, 0, 64));
        p.on("ram_load_latency", int_into(sys.pipeline.ram_load_latency, 0, 64));
        p.run();
    });
    f.on("dac_defaults", [&](const json& v, const std::string& k) { parse_generator(v, k, dac_default); });
    f.on("adc_defaults", [&](const json& v, const std::string& k) { parse_decoder(v, k, adc_default); });
    f.on("dac", [&](const json& v, const std::string& k) { parse_channel_overrides(v, k, dac_over); });
    f.on("adc", [&](const json& v, const std::string& k) { parse_channel_overrides(v, k, adc_over); });
    f.on("plant", [&](const json& v, const std::string& k) { parse_plant(v, k, sys); });
    f.on("shots", int_into(rc.shots, 1, int64_t{1} << 40));
    f.on("seed", [&](const json& v, const std::string& k) {
        if (v.is_number_unsigned()) rc.seed = v.get<uint64_t>();
        else rc.seed = static_cast<uint64_t>(as_int(v, k, std::numeric_limits<int64_t>::min(),
                                                    std::numeric_limits<int64_t>::max()));
    });
    f.on("max_cycles", int_into(rc.max_cycles, 0, std::numeric_limits<int64_t>::max()));
    f.on("threads", int_into(rc.threads, 1, 256));
    f.on("program", [&](const json& v, const std::string& k) { rc.program = as_string(v, k); });
    f.on("program_args", [&](const json& v, const std::string& k) { parse_program_args(v, k, rc.program_args); });
    f.on("envelopes", [&](const json& v, const std::string& k) {
        if (!v.is_array()) fail(k, "expected an array");
        for (size_t i = 0; i < v.size(); ++i) rc.envelopes.push_back(parse_envelope(v[i], fmt::format("{}[{}]", k, i)));
    });
    f.on("trace_channels", [&](const json& v, const std::string& k) { rc.trace_channels = parse_channel_list(v, k); });
    f.on("dump_readout_buffers", [&](const json& v, const std::string& k) { rc.dump_readout_buffers = as_bool(v, k); });
    f.run();

    sys.generators.assign(static_cast<size_t>(sys.dac_channels), dac_default);
    sys.decoders.assign(static_cast<size_t>(sys.adc_channels), adc_default);
    for (const auto& [ch, v] : dac_over) {
        const std::string key = fmt::format("dac.{}", ch);
        if (ch >= sys.dac_channels) fail(key, fmt::format("channel out of range (dac_channels = {})", sys.dac_channels));
        parse_generator(v, key, sys.generators[ch]);
    }
    for (const auto& [ch, v] : adc_over) {
        const std::string key = fmt::format("adc.{}", ch);
        if (ch >= sys.adc_channels) fail(key, fmt::format("channel out of range (adc_channels = {})", sys.adc_channels));
        parse_decoder(v, key, sys.decoders[ch]);
    }
    sys.normalize();
    try {
        sys.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    for (size_t i = 0; i < rc.envelopes.size(); ++i) {
        if (rc.envelopes[i].channel >= sys.dac_channels) {
            fail(fmt::format("envelopes[{}].channel", i), "out of range");
        }
    }
    for (int ch : rc.trace_channels) {
        if (ch >= sys.dac_channels) fail("trace_channels", fmt::format("DAC channel {} out of range", ch));
    }
    // The thread count cannot change any output, so it does not enter the hash.
    nlohmann::json hashed = doc;
    hashed.erase("threads");
    rc.canonical = hashed.dump();
    return rc;
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open config {}", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return parse_run_config(doc, path.parent_path());
}

std::vector<int16_t> read_samples_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % 2 != 0) throw ConfigError(fmt::format("{}: odd byte count for int16 samples", path.string()));
    std::vector<int16_t> out(bytes.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        const auto lo = static_cast<uint8_t>(bytes[2 * i]);
        const auto hi = static_cast<uint8_t>(bytes[2 * i + 1]);
        out[i] = static_cast<int16_t>(static_cast<uint16_t>(lo | (hi << 8)));
    }
    return out;
}

void write_samples_file(const fs::path& path, std::span<const int16_t> samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    for (int16_t s : samples) {
        const auto u = static_cast<uint16_t>(s);
        const char b[2] = {static_cast<char>(u & 0xFF), static_cast<char>(u >> 8)};
        out.write(b, 2);
    }
}

std::vector<int16_t> make_envelope(const EnvelopeSpec& spec, const fs::path& base_dir) {
    if (!spec.file.empty()) {
        fs::path p(spec.file);
        if (p.is_relative()) p = base_dir / p;
        return read_samples_file(p);
    }
    std::vector<int16_t> out(spec.length, 0);
    if (spec.shape == "rect") {
        std::fill(out.begin(), out.end(), static_cast<int16_t>(spec.value));
    } else if (spec.shape == "gauss") {
        // sigma = length / 6, centred.
        const double mid = (spec.length - 1) / 2.0;
        const double sigma = spec.length / 6.0;
        for (uint32_t i = 0; i < spec.length; ++i) {
            const double z = (i - mid) / sigma;
            out[i] = static_cast<int16_t>(std::lround(spec.value * std::exp(-0.5 * z * z)));
        }
    }
    return out;
}

}  // namespace qcsoc
