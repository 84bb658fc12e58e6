#include "raman_echo/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace raman_echo {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool to_double(const std::string& text, double& out)
{
    const std::string t = trim(text);
    if (t.empty()) {
        return false;
    }
    const char* begin = t.data();
    if (*begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), out);
    return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

std::vector<std::string> split_ws(const std::string& s)
{
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string tok; is >> tok;) {
        out.push_back(tok);
    }
    return out;
}

struct Entry {
    std::string value;
    int line = 0;
};

class Parser {
public:
    explicit Parser(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(int line, const std::string& msg) const
    {
        std::ostringstream os;
        os << source_ << ':' << line << ": " << msg;
        throw config_error(os.str());
    }

    double number(const std::string& key, const Entry& e) const
    {
        double v = 0.0;
        if (!to_double(e.value, v)) {
            fail(e.line, "'" + key + "' expects a number, got '" + e.value + "'");
        }
        return v;
    }

    bool boolean(const std::string& key, const Entry& e) const
    {
        const std::string v = e.value;
        if (v == "true" || v == "1" || v == "yes") {
            return true;
        }
        if (v == "false" || v == "0" || v == "no") {
            return false;
        }
        fail(e.line, "'" + key + "' expects true/false, got '" + v + "'");
    }

    Eigen::Index count(const std::string& key, const Entry& e) const
    {
        const double v = number(key, e);
        if (v != std::floor(v) || v < 0 || v > 1e9) {
            fail(e.line, "'" + key + "' expects a non-negative integer");
        }
        return static_cast<Eigen::Index>(v);
    }

    const std::string& source() const { return source_; }

private:
    std::string source_;
};

void resolve_g_bar(RunConfig& cfg)
{
    if (!cfg.gamma_r_target) {
        return;
    }
    SystemParams& s = cfg.system;
    const double ratio = rabi_ratio(s);
    if (!(ratio > 0.0)) {
        throw config_error("gamma_r needs a non-zero Rabi ratio (set omega1 or rabi_ratio)");
    }
    if (*cfg.gamma_r_target < 0.0 || !(s.delta_in > 0.0) || !(s.n_atoms > 0.0)) {
        throw config_error("gamma_r must be >= 0 with delta_in > 0 and n_atoms > 0");
    }
    s.g_bar = std::sqrt(*cfg.gamma_r_target * s.delta_in / (2.0 * s.n_atoms)) / ratio;
}

} // namespace

std::uint64_t fnv1a(const std::string& text, std::uint64_t seed)
{
    std::uint64_t h = seed;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_string(std::uint64_t hash)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << hash;
    return os.str();
}

RunConfig parse_config(std::istream& in, const std::string& source)
{
    Parser parser(source);
    std::map<std::string, std::map<std::string, Entry>> sections;
    std::vector<Entry> pulse_lines;
    std::string canonical;

    std::string section;
    std::string raw;
    int line_no = 0;
    static const std::map<std::string, std::vector<std::string>> known = {
        {"system",
         {"gamma1", "delta_in", "t2_inv", "big_delta0", "omega1", "omega1_im", "rabi_ratio", "n_atoms", "g_bar",
          "gamma_r", "gamma1_si", "allow_nonadiabatic"}},
        {"grid", {"nu_min", "nu_max", "n_points"}},
        {"pulses", {"pulse"}},
        {"pipeline",
         {"T0", "k_atoms", "rtol", "atol", "dt_out", "settle", "extent_sigmas", "input_dt", "cutoff",
          "standing_wave", "seed", "fixed_step", "compare_full_model"}},
        {"geometry", {"length_cm", "fill_chi", "gamma1_si", "rabi_ratio_sq"}},
    };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                parser.fail(line_no, "malformed section header '" + line + "'");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!known.count(section)) {
                parser.fail(line_no, "unknown section [" + section + "]");
            }
            canonical += "[" + section + "]\n";
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            parser.fail(line_no, "expected 'key = value', got '" + line + "'");
        }
        if (section.empty()) {
            parser.fail(line_no, "entry outside of any [section]");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& keys = known.at(section);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            parser.fail(line_no, "unknown key '" + key + "' in [" + section + "]");
        }
        if (value.empty()) {
            parser.fail(line_no, "empty value for '" + key + "'");
        }
        canonical += key + "=" + value + "\n";
        if (section == "pulses") {
            pulse_lines.push_back({value, line_no});
            continue;
        }
        auto& sec = sections[section];
        if (sec.count(key)) {
            parser.fail(line_no, "duplicate key '" + key + "' (first set on line " + std::to_string(sec[key].line) + ")");
        }
        sec[key] = {value, line_no};
    }

    RunConfig cfg;
    cfg.source = source;
    cfg.hash = fnv1a(canonical);

    auto get = [&](const std::string& sec, const std::string& key) -> const Entry* {
        auto s = sections.find(sec);
        if (s == sections.end()) {
            return nullptr;
        }
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };
    auto set_number = [&](const std::string& sec, const std::string& key, double& target) {
        if (const Entry* e = get(sec, key)) {
            target = parser.number(key, *e);
        }
    };

    // [system]
    SystemParams& s = cfg.system;
    set_number("system", "gamma1", s.gamma1);
    set_number("system", "delta_in", s.delta_in);
    set_number("system", "t2_inv", s.t2_inv);
    set_number("system", "big_delta0", s.big_delta0);
    set_number("system", "n_atoms", s.n_atoms);
    set_number("system", "gamma1_si", s.gamma1_si);
    if (const Entry* e = get("system", "allow_nonadiabatic")) {
        s.allow_nonadiabatic = parser.boolean("allow_nonadiabatic", *e);
    }
    const Entry* omega_re = get("system", "omega1");
    const Entry* omega_im = get("system", "omega1_im");
    const Entry* ratio = get("system", "rabi_ratio");
    if (ratio && (omega_re || omega_im)) {
        parser.fail(ratio->line, "give either rabi_ratio or omega1, not both");
    }
    if (ratio) {
        const double r = parser.number("rabi_ratio", *ratio);
        if (r < 0.0) {
            parser.fail(ratio->line, "rabi_ratio must be >= 0");
        }
        s.omega1 = r * s.big_delta0;
    } else if (omega_re || omega_im) {
        const double re = omega_re ? parser.number("omega1", *omega_re) : 0.0;
        const double im = omega_im ? parser.number("omega1_im", *omega_im) : 0.0;
        s.omega1 = {re, im};
    }
    const Entry* g_bar = get("system", "g_bar");
    const Entry* gamma_r = get("system", "gamma_r");
    if (g_bar && gamma_r) {
        parser.fail(gamma_r->line, "give either gamma_r or g_bar, not both");
    }
    if (g_bar) {
        s.g_bar = parser.number("g_bar", *g_bar);
    }
    if (gamma_r) {
        cfg.gamma_r_target = parser.number("gamma_r", *gamma_r);
        try {
            resolve_g_bar(cfg);
        } catch (const config_error& err) {
            parser.fail(gamma_r->line, err.what());
        }
    }

    // [grid]
    set_number("grid", "nu_min", cfg.grid.nu_min);
    set_number("grid", "nu_max", cfg.grid.nu_max);
    if (const Entry* e = get("grid", "n_points")) {
        cfg.grid.n_points = parser.count("n_points", *e);
    }

    // [pulses]
    for (const Entry& e : pulse_lines) {
        const auto tok = split_ws(e.value);
        if (tok.size() != 3) {
            parser.fail(e.line, "pulse expects '<shape> <dw_f> <tau>'");
        }
        PulseSpec spec;
        spec.shape = tok[0];
        if (spec.shape != "gaussian") {
            parser.fail(e.line, "unknown pulse shape '" + spec.shape + "' (supported: gaussian)");
        }
        if (!to_double(tok[1], spec.dw_f) || !to_double(tok[2], spec.tau)) {
            parser.fail(e.line, "pulse width and arrival time must be numbers");
        }
        if (!(spec.dw_f > 0.0)) {
            parser.fail(e.line, "pulse width must be > 0");
        }
        cfg.pulses.push_back(spec);
    }
    if (cfg.pulses.empty()) {
        cfg.pulses.push_back({});
    }

    // [pipeline]
    PipelineSettings& pl = cfg.pipeline;
    set_number("pipeline", "T0", pl.t0_storage);
    if (const Entry* e = get("pipeline", "k_atoms")) {
        pl.k_atoms = parser.count("k_atoms", *e);
    }
    IntegratorOptions& integ = pl.options.simulation.integrator;
    set_number("pipeline", "rtol", integ.rtol);
    set_number("pipeline", "atol", integ.atol);
    set_number("pipeline", "fixed_step", integ.fixed_step);
    set_number("pipeline", "dt_out", pl.options.simulation.dt_out);
    set_number("pipeline", "settle", pl.options.settle);
    set_number("pipeline", "extent_sigmas", pl.options.extent_sigmas);
    set_number("pipeline", "input_dt", pl.options.input_dt);
    set_number("pipeline", "cutoff", pl.ensemble.cutoff);
    if (const Entry* e = get("pipeline", "standing_wave")) {
        pl.ensemble.standing_wave = parser.boolean("standing_wave", *e);
    }
    if (const Entry* e = get("pipeline", "seed")) {
        pl.ensemble.seed = static_cast<std::uint64_t>(parser.count("seed", *e));
    }
    if (const Entry* e = get("pipeline", "compare_full_model")) {
        pl.compare_full_model = parser.boolean("compare_full_model", *e);
    }

    // [geometry]
    GeometrySettings& geo = cfg.geometry;
    set_number("geometry", "length_cm", geo.geometry.length_cm);
    set_number("geometry", "fill_chi", geo.geometry.fill_chi);
    set_number("geometry", "gamma1_si", geo.gamma1_si);
    set_number("geometry", "rabi_ratio_sq", geo.rabi_ratio_sq);

    // Semantic checks, reported against the offending line where possible.
    auto line_of = [&](const std::string& sec, const std::string& key) {
        const Entry* e = get(sec, key);
        return e ? e->line : 0;
    };
    auto check = [&](bool ok, const std::string& sec, const std::string& key, const std::string& msg) {
        if (!ok) {
            parser.fail(line_of(sec, key), msg);
        }
    };
    try {
        (void)validate(s);
    } catch (const config_error& err) {
        int line = 0;
        for (const auto& [key, entry] : sections["system"]) {
            line = line == 0 ? entry.line : std::min(line, entry.line);
        }
        parser.fail(line, err.what());
    }
    try {
        validate(cfg.grid);
    } catch (const config_error& err) {
        parser.fail(line_of("grid", "n_points") ? line_of("grid", "n_points") : line_of("grid", "nu_min"), err.what());
    }
    check(pl.t0_storage > 0.0, "pipeline", "T0", "T0 must be > 0");
    check(pl.k_atoms >= 3 && pl.k_atoms % 2 == 1, "pipeline", "k_atoms", "k_atoms must be odd and >= 3");
    check(integ.rtol > 0.0 && integ.atol > 0.0, "pipeline", "rtol", "tolerances must be > 0");
    check(pl.options.simulation.dt_out > 0.0, "pipeline", "dt_out", "dt_out must be > 0");
    check(pl.options.settle >= 0.0, "pipeline", "settle", "settle must be >= 0");
    check(pl.ensemble.cutoff > 0.0, "pipeline", "cutoff", "cutoff must be > 0");
    check(geo.gamma1_si > 0.0, "geometry", "gamma1_si", "gamma1_si must be > 0");
    try {
        validate(geo.geometry);
    } catch (const config_error& err) {
        parser.fail(line_of("geometry", "length_cm") ? line_of("geometry", "length_cm") : line_of("geometry", "fill_chi"),
                    err.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config file '" + path + "'");
    }
    return parse_config(in, path);
}

PulseTrain build_train(const RunConfig& cfg)
{
    PulseTrain train;
    for (const PulseSpec& spec : cfg.pulses) {
        train.modes.push_back(gaussian_mode(cfg.grid, spec.dw_f, spec.tau));
    }
    validate(train);
    return train;
}

void apply_parameter(RunConfig& cfg, const std::string& name, double value)
{
    SystemParams& s = cfg.system;
    if (name == "delta_in") {
        s.delta_in = value;
    } else if (name == "t2_inv") {
        s.t2_inv = value;
    } else if (name == "gamma_r") {
        cfg.gamma_r_target = value;
    } else if (name == "rabi_ratio") {
        s.omega1 = value * s.big_delta0;
    } else if (name == "big_delta0") {
        const std::complex<double> ratio = s.omega1 / s.big_delta0;
        s.big_delta0 = value;
        s.omega1 = ratio * value;
    } else if (name == "n_atoms") {
        s.n_atoms = value;
    } else if (name == "g_bar") {
        cfg.gamma_r_target.reset();
        s.g_bar = value;
    } else if (name == "dw_f") {
        for (PulseSpec& p : cfg.pulses) {
            p.dw_f = value;
        }
    } else if (name == "T0") {
        cfg.pipeline.t0_storage = value;
    } else if (name == "k_atoms") {
        cfg.pipeline.k_atoms = static_cast<Eigen::Index>(std::llround(value));
    } else {
        throw config_error("unknown sweep parameter '" + name
                           + "' (supported: delta_in, t2_inv, gamma_r, rabi_ratio, big_delta0, n_atoms, g_bar, dw_f, "
                             "T0, k_atoms)");
    }
    resolve_g_bar(cfg);
    validate(s);
}

SweepSpec parse_sweep(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
        throw config_error("sweep spec must look like name=a:b:step or name=v1,v2,...");
    }
    SweepSpec spec;
    spec.name = trim(text.substr(0, eq));
    const std::string body = trim(text.substr(eq + 1));
    if (spec.name.empty() || body.empty()) {
        throw config_error("sweep spec is missing a name or values");
    }
    if (body.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::istringstream is(body);
        for (std::string tok; std::getline(is, tok, ':');) {
            double v = 0.0;
            if (!to_double(tok, v)) {
                throw config_error("sweep range component '" + tok + "' is not a number");
            }
            parts.push_back(v);
        }
        if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
            throw config_error("sweep range must be a:b:step with b >= a and step > 0");
        }
        const auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
        if (n > 1'000'000) {
            throw config_error("sweep range has too many points");
        }
        for (long i = 0; i <= n; ++i) {
            spec.values.push_back(parts[0] + static_cast<double>(i) * parts[2]);
        }
    } else {
        std::istringstream is(body);
        for (std::string tok; std::getline(is, tok, ',');) {
            double v = 0.0;
            if (!to_double(tok, v)) {
                throw config_error("sweep value '" + tok + "' is not a number");
            }
            spec.values.push_back(v);
        }
    }
    return spec;
}

} // namespace raman_echo
