#include "phasefield/config.hpp"

#include "phasefield/errors.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace phasefield {

namespace {

constexpr std::array<std::string_view, 30> kKnownKeys{
    "potential.kind",      "potential.coeffs",     "potential.gamma",
    "grid.J",              "grid.length",
    "scheme.kind",         "scheme.epsilon",       "scheme.dt",
    "scheme.steps",        "scheme.record_every",
    "newton.tol",          "newton.max_iters",
    "initial.kind",        "initial.seed",         "initial.amplitude",
    "initial.modes",       "initial.center",       "initial.width",
    "initial.value",
    "output.path",
    "sweep.dt_grid",       "sweep.dt_lo",          "sweep.dt_hi",
    "sweep.dt_count",      "sweep.steps",
    "converge.ladder_dt",  "converge.ladder_J",    "converge.reference_dt",
    "converge.reference_J", "converge.final_time",
};

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool is_known(std::string_view key)
{
    return std::find(kKnownKeys.begin(), kKnownKeys.end(), key) != kKnownKeys.end();
}

std::string strip_comment(std::string_view line)
{
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') {
            quoted = !quoted;
        } else if (line[i] == '#' && !quoted) {
            return std::string(line.substr(0, i));
        }
    }
    return std::string(line);
}

std::optional<double> parse_number(std::string_view text)
{
    const std::string s(trim(text));
    if (s.empty()) {
        return std::nullopt;
    }
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) {
        return std::nullopt;
    }
    return v;
}

}  // namespace

std::span<const std::string_view> ConfigFile::known_keys() { return kKnownKeys; }

void ConfigFile::fail(std::string_view key, const std::string& what) const
{
    std::ostringstream msg;
    msg << source_ << ": " << key;
    if (auto it = entries_.find(key); it != entries_.end() && it->second.line > 0) {
        msg << " (line " << it->second.line << ")";
    }
    msg << ": " << what;
    throw ConfigError(msg.str());
}

void ConfigFile::set(std::string key, std::string raw, int line)
{
    if (!is_known(key)) {
        std::ostringstream msg;
        msg << source_;
        if (line > 0) {
            msg << ":" << line;
        }
        msg << ": unknown key '" << key << "'";
        throw ConfigError(msg.str());
    }
    entries_[std::move(key)] = Entry{std::move(raw), line};
}

ConfigFile ConfigFile::parse(std::string_view text, std::string source)
{
    ConfigFile file;
    file.source_ = std::move(source);
    std::string section;
    int lineno = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = strip_comment(line);
        const auto body = trim(stripped);
        if (body.empty()) {
            continue;
        }
        if (body.front() == '[' && body.back() == ']' && body.find('=') == std::string_view::npos) {
            section = std::string(trim(body.substr(1, body.size() - 2)));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(file.source_ + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        }
        const auto key = trim(body.substr(0, eq));
        const auto value = trim(body.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(file.source_ + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        }
        std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        file.set(std::move(full), std::string(value), lineno);
    }
    return file;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

void ConfigFile::apply_override(std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
    }
    std::string key(trim(assignment.substr(0, eq)));
    const auto value = trim(assignment.substr(eq + 1));
    if (value.empty()) {
        throw ConfigError("override '" + std::string(assignment) + "' has an empty value");
    }
    if (key.find('.') == std::string::npos) {
        std::vector<std::string_view> matches;
        for (auto k : kKnownKeys) {
            if (k.substr(k.find('.') + 1) == key) {
                matches.push_back(k);
            }
        }
        if (matches.size() == 1) {
            key = std::string(matches.front());
        } else if (matches.size() > 1) {
            throw ConfigError("override key '" + key + "' is ambiguous; use a dotted key");
        }
    }
    if (!is_known(key)) {
        throw ConfigError("override references unknown key '" + key + "'");
    }
    entries_[key] = Entry{std::string(value), 0};
}

bool ConfigFile::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::optional<std::string> ConfigFile::get_string(std::string_view key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    const std::string& raw = it->second.raw;
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
        return raw.substr(1, raw.size() - 2);
    }
    if (raw.front() == '"' || raw.front() == '[') {
        fail(key, "expected a string, got " + raw);
    }
    return raw;
}

std::optional<double> ConfigFile::get_real(std::string_view key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    const auto v = parse_number(it->second.raw);
    if (!v) {
        fail(key, "expected a number, got " + it->second.raw);
    }
    return v;
}

std::optional<std::int64_t> ConfigFile::get_integer(std::string_view key) const
{
    const auto v = get_real(key);
    if (!v) {
        return std::nullopt;
    }
    if (std::trunc(*v) != *v || std::abs(*v) > 9.0e15) {
        fail(key, "expected an integer, got " + entries_.find(key)->second.raw);
    }
    return static_cast<std::int64_t>(*v);
}

std::optional<std::vector<double>> ConfigFile::get_list(std::string_view key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    const std::string& raw = it->second.raw;
    if (raw.front() != '[') {
        const auto v = parse_number(raw);
        if (!v) {
            fail(key, "expected a number or a list, got " + raw);
        }
        return std::vector<double>{*v};
    }
    if (raw.back() != ']') {
        fail(key, "unterminated list " + raw);
    }
    std::vector<double> out;
    const std::string_view inner = trim(std::string_view(raw).substr(1, raw.size() - 2));
    if (inner.empty()) {
        return out;
    }
    std::size_t pos = 0;
    while (pos <= inner.size()) {
        const auto comma = inner.find(',', pos);
        const auto item = inner.substr(pos, comma == std::string_view::npos ? inner.npos : comma - pos);
        const auto v = parse_number(item);
        if (!v) {
            fail(key, "bad list element '" + std::string(trim(item)) + "'");
        }
        out.push_back(*v);
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

namespace {

template <class T>
T require(const std::optional<T>& v, std::string_view key)
{
    if (!v) {
        throw ConfigError("missing required key '" + std::string(key) + "'");
    }
    return *v;
}

PotentialSpec parse_potential(const ConfigFile& f)
{
    const auto kind = f.get_string("potential.kind").value_or("double_well");
    double lo = -1.0;
    double hi = 1.0;
    if (const auto gamma = f.get_list("potential.gamma")) {
        if (gamma->size() != 2) {
            throw ConfigError("potential.gamma must be [g_minus, g_plus]");
        }
        lo = (*gamma)[0];
        hi = (*gamma)[1];
    }
    if (kind == "double_well") {
        if (f.has("potential.coeffs")) {
            throw ConfigError("potential.coeffs only applies to potential.kind = \"polynomial\"");
        }
        return PotentialSpec::double_well(lo, hi);
    }
    if (kind == "polynomial") {
        auto coeffs = require(f.get_list("potential.coeffs"), "potential.coeffs");
        return PotentialSpec::polynomial(std::move(coeffs), lo, hi);
    }
    throw ConfigError("potential.kind must be \"double_well\" or \"polynomial\", got \"" + kind + "\"");
}

SchemeKind parse_scheme_kind(const std::string& s)
{
    if (s == "semi_implicit") {
        return SchemeKind::SemiImplicit;
    }
    if (s == "explicit") {
        return SchemeKind::Explicit;
    }
    if (s == "convex_splitting") {
        return SchemeKind::ConvexSplitting;
    }
    throw ConfigError("scheme.kind must be semi_implicit, explicit or convex_splitting, got \"" + s +
                      "\"");
}

InitialCondition parse_initial(const ConfigFile& f)
{
    const auto kind = require(f.get_string("initial.kind"), "initial.kind");
    if (kind == "random_uniform") {
        const auto seed = f.get_integer("initial.seed").value_or(0);
        if (seed < 0) {
            throw ConfigError("initial.seed must be non-negative");
        }
        return RandomUniform{static_cast<std::uint64_t>(seed)};
    }
    if (kind == "sine_wave") {
        SineWave w;
        w.amplitude = f.get_real("initial.amplitude").value_or(w.amplitude);
        w.modes = static_cast<int>(f.get_integer("initial.modes").value_or(w.modes));
        return w;
    }
    if (kind == "tanh_front") {
        TanhFront t;
        t.center = f.get_real("initial.center").value_or(t.center);
        t.width = f.get_real("initial.width").value_or(t.width);
        return t;
    }
    if (kind == "constant") {
        return ConstantField{require(f.get_real("initial.value"), "initial.value")};
    }
    throw ConfigError("initial.kind must be random_uniform, sine_wave, tanh_front or constant, got \"" +
                      kind + "\"");
}

std::size_t positive_size(std::int64_t v, std::string_view key)
{
    if (v < 1) {
        throw ConfigError(std::string(key) + " must be positive");
    }
    return static_cast<std::size_t>(v);
}

}  // namespace

PotentialSpec parse_potential_config(const ConfigFile& f) { return parse_potential(f); }

RunConfig parse_run_config(const ConfigFile& f)
{
    RunConfig cfg;
    cfg.potential = parse_potential(f);
    cfg.J = positive_size(require(f.get_integer("grid.J"), "grid.J"), "grid.J");
    cfg.length = f.get_real("grid.length").value_or(1.0);
    cfg.scheme = parse_scheme_kind(f.get_string("scheme.kind").value_or("semi_implicit"));
    cfg.epsilon = require(f.get_real("scheme.epsilon"), "scheme.epsilon");

    const auto dt_raw = require(f.get_string("scheme.dt"), "scheme.dt");
    if (dt_raw == "auto") {
        cfg.dt.reset();
    } else {
        cfg.dt = f.get_real("scheme.dt");
    }
    cfg.steps = f.get_integer("scheme.steps").value_or(0);
    cfg.record_every = f.get_integer("scheme.record_every").value_or(1);
    cfg.newton.tol = f.get_real("newton.tol").value_or(cfg.newton.tol);
    cfg.newton.max_iters =
        static_cast<int>(f.get_integer("newton.max_iters").value_or(cfg.newton.max_iters));
    cfg.initial = parse_initial(f);
    cfg.output = f.get_string("output.path").value_or(".");
    return cfg;
}

SweepConfig parse_sweep_config(const ConfigFile& f)
{
    SweepConfig cfg;
    cfg.base = parse_run_config(f);
    if (const auto grid = f.get_list("sweep.dt_grid")) {
        if (f.has("sweep.dt_lo") || f.has("sweep.dt_hi") || f.has("sweep.dt_count")) {
            throw ConfigError("give either sweep.dt_grid or sweep.dt_lo/dt_hi/dt_count, not both");
        }
        cfg.dt_grid = *grid;
    } else if (f.has("sweep.dt_lo") || f.has("sweep.dt_hi") || f.has("sweep.dt_count")) {
        const double lo = require(f.get_real("sweep.dt_lo"), "sweep.dt_lo");
        const double hi = require(f.get_real("sweep.dt_hi"), "sweep.dt_hi");
        const auto count = positive_size(require(f.get_integer("sweep.dt_count"), "sweep.dt_count"),
                                         "sweep.dt_count");
        cfg.dt_grid = geometric_grid(lo, hi, count);
    } else {
        throw ConfigError("sweep needs sweep.dt_grid or sweep.dt_lo/dt_hi/dt_count");
    }
    cfg.steps_per_dt = f.get_integer("sweep.steps").value_or(0);
    return cfg;
}

ConvergenceConfig parse_convergence_config(const ConfigFile& f)
{
    ConvergenceConfig cfg;
    cfg.base = parse_run_config(f);

    auto dts = require(f.get_list("converge.ladder_dt"), "converge.ladder_dt");
    auto Js = require(f.get_list("converge.ladder_J"), "converge.ladder_J");
    if (dts.empty() || Js.empty()) {
        throw ConfigError("convergence ladder is empty");
    }
    const std::size_t n = std::max(dts.size(), Js.size());
    if ((dts.size() != n && dts.size() != 1) || (Js.size() != n && Js.size() != 1)) {
        throw ConfigError("converge.ladder_dt and converge.ladder_J lengths differ");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = dts.size() == 1 ? dts[0] : dts[i];
        const double J = Js.size() == 1 ? Js[0] : Js[i];
        if (std::trunc(J) != J || J < 3) {
            throw ConfigError("converge.ladder_J entries must be integers >= 3");
        }
        cfg.ladder.push_back(Resolution{dt, static_cast<std::size_t>(J)});
    }

    const double T = require(f.get_real("converge.final_time"), "converge.final_time");
    const double ref_dt = require(f.get_real("converge.reference_dt"), "converge.reference_dt");
    const auto ref_J = positive_size(require(f.get_integer("converge.reference_J"),
                                             "converge.reference_J"),
                                     "converge.reference_J");
    if (!(T > 0.0) || !(ref_dt > 0.0)) {
        throw ConfigError("converge.final_time and converge.reference_dt must be positive");
    }
    const double ratio = T / ref_dt;
    const double steps = std::round(ratio);
    if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
        throw ConfigError("converge.reference_dt does not divide converge.final_time");
    }
    cfg.reference = cfg.base;
    cfg.reference.dt = ref_dt;
    cfg.reference.J = ref_J;
    cfg.reference.steps = static_cast<std::int64_t>(steps);
    // The ladder rungs take their step counts from the final time.
    cfg.base.steps = cfg.reference.steps;
    return cfg;
}

}  // namespace phasefield
