#include "config.hpp"

#include "csv.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace robin::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return trim(s.substr(pos)).empty();
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

ConfigFile ConfigFile::parse(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());

    ConfigFile cfg;
    cfg.path_ = path.string();
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(cfg.path_ + ":" + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(cfg.path_ + ":" + std::to_string(lineno) + ": empty section name");
            cfg.sections_.emplace(section, lineno);
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(cfg.path_ + ":" + std::to_string(lineno) +
                              ": expected key = value");
        if (section.empty())
            throw ConfigError(cfg.path_ + ":" + std::to_string(lineno) +
                              ": key outside any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(cfg.path_ + ":" + std::to_string(lineno) + ": empty key");
        const auto [it, inserted] = cfg.entries_.emplace(section + "." + key,
                                                         Entry{value, lineno, false});
        if (!inserted)
            throw ConfigError(cfg.path_ + ":" + std::to_string(lineno) + ": duplicate key [" +
                              section + "] " + key + " (first at line " +
                              std::to_string(it->second.line) + ")");
    }
    return cfg;
}

bool ConfigFile::has_section(const std::string& section) const {
    return sections_.count(section) > 0;
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section,
                                          const std::string& key) const {
    const auto it = entries_.find(section + "." + key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

const ConfigFile::Entry& ConfigFile::require(const std::string& section,
                                             const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) throw ConfigError(path_ + ": missing required key [" + section + "] " + key);
    return *e;
}

void ConfigFile::fail(const std::string& section, const std::string& key,
                      const std::string& message) const {
    const auto it = entries_.find(section + "." + key);
    const std::string where =
        it == entries_.end() ? path_ : path_ + ":" + std::to_string(it->second.line);
    throw ConfigError(where + ": [" + section + "] " + key + ": " + message);
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
    return require(section, key).value;
}

std::string ConfigFile::get_string_or(const std::string& section, const std::string& key,
                                      const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    const Entry& e = require(section, key);
    double v;
    if (!parse_double(e.value, v)) fail(section, key, "expected a number, got '" + e.value + "'");
    return v;
}

double ConfigFile::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
    return find(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int(const std::string& section, const std::string& key) const {
    const Entry& e = require(section, key);
    double v;
    if (!parse_double(e.value, v) || v != static_cast<double>(static_cast<long long>(v)))
        fail(section, key, "expected an integer, got '" + e.value + "'");
    return static_cast<int>(v);
}

int ConfigFile::get_int_or(const std::string& section, const std::string& key,
                           int fallback) const {
    return find(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t ConfigFile::get_seed_or(const std::string& section, const std::string& key,
                                      std::uint64_t fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(e->value, &pos);
        if (!trim(e->value.substr(pos)).empty()) throw std::invalid_argument("junk");
        return v;
    } catch (const std::exception&) {
        fail(section, key, "expected a nonnegative integer seed, got '" + e->value + "'");
    }
}

std::vector<double> ConfigFile::get_double_list(const std::string& section,
                                                const std::string& key) const {
    const Entry& e = require(section, key);
    std::vector<double> out;
    std::istringstream ss(e.value);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        double v;
        if (cell.empty() || !parse_double(cell, v))
            fail(section, key, "expected comma-separated numbers, got '" + e.value + "'");
        out.push_back(v);
    }
    if (out.empty()) fail(section, key, "empty list");
    return out;
}

void ConfigFile::check_all_used() const {
    for (const auto& [full, entry] : entries_) {
        if (!entry.used)
            throw ConfigError(path_ + ":" + std::to_string(entry.line) + ": unknown key " + full);
    }
}

namespace {

RobinCoefficient load_gamma(const ConfigFile& cfg, const AnnulusGrid& grid) {
    const std::string type = cfg.get_string("gamma", "type");
    const double lo = cfg.get_double("gamma", "lo");
    const double hi = cfg.get_double("gamma", "hi");

    Eigen::VectorXd values;
    if (type == "constant") {
        values = Eigen::VectorXd::Constant(grid.n_theta, cfg.get_double("gamma", "value"));
    } else if (type == "array") {
        const std::vector<double> list = cfg.get_double_list("gamma", "values");
        if (static_cast<int>(list.size()) != grid.n_theta)
            cfg.fail("gamma", "values",
                     "expected n_theta = " + std::to_string(grid.n_theta) + " entries, got " +
                         std::to_string(list.size()));
        values = Eigen::Map<const Eigen::VectorXd>(list.data(), list.size());
    } else if (type == "file") {
        const CsvTable t = read_csv(cfg.get_string("gamma", "path"));
        const int col = t.column("gamma");
        if (col < 0) cfg.fail("gamma", "path", t.path + ": no 'gamma' column");
        if (static_cast<int>(t.rows.size()) != grid.n_theta)
            cfg.fail("gamma", "path",
                     t.path + ": expected n_theta = " + std::to_string(grid.n_theta) +
                         " rows, got " + std::to_string(t.rows.size()));
        values.resize(grid.n_theta);
        for (int j = 0; j < grid.n_theta; ++j) values[j] = t.rows[j][col];
    } else {
        cfg.fail("gamma", "type", "expected constant | array | file, got '" + type + "'");
    }

    try {
        return RobinCoefficient(values, lo, hi);
    } catch (const InvalidArgument& e) {
        cfg.fail("gamma", "type", e.what());
    }
}

DataBlock load_data(const ConfigFile& cfg) {
    DataBlock d;
    const std::string type = cfg.get_string("data", "type");
    if (type == "oracle") {
        d.type = DataSpecType::Oracle;
        d.c1 = cfg.get_double("data", "c1");
        d.c2 = cfg.get_double("data", "c2");
    } else if (type == "constant") {
        d.type = DataSpecType::Constant;
        d.g_value = cfg.get_double_or("data", "g_value", 0.0);
        d.h_value = cfg.get_double_or("data", "h_value", 0.0);
    } else if (type == "zero") {
        d.type = DataSpecType::Zero;
    } else if (type == "file") {
        d.type = DataSpecType::File;
        d.path = cfg.get_string("data", "path");
    } else {
        cfg.fail("data", "type", "expected oracle | constant | zero | file, got '" + type + "'");
    }
    d.noise = cfg.get_double_or("data", "noise", 0.0);
    if (d.noise < 0.0) cfg.fail("data", "noise", "must be nonnegative");
    d.seed = cfg.get_seed_or("data", "seed", 0);
    return d;
}

ReconstructBlock load_reconstruct(const ConfigFile& cfg, const AnnulusGrid& grid) {
    ReconstructBlock r;
    if (cfg.has("reconstruct", "gamma0_values")) {
        const std::vector<double> list = cfg.get_double_list("reconstruct", "gamma0_values");
        if (static_cast<int>(list.size()) != grid.n_theta)
            cfg.fail("reconstruct", "gamma0_values",
                     "expected n_theta = " + std::to_string(grid.n_theta) + " entries");
        r.gamma0 = Eigen::Map<const Eigen::VectorXd>(list.data(), list.size());
    } else {
        r.gamma0 = Eigen::VectorXd::Constant(grid.n_theta,
                                             cfg.get_double_or("reconstruct", "gamma0", 1.0));
    }
    ReconstructionOptions& o = r.opts;
    o.max_iters = cfg.get_int_or("reconstruct", "max_iters", o.max_iters);
    o.tol_misfit = cfg.get_double_or("reconstruct", "tol_misfit", o.tol_misfit);
    o.tol_step = cfg.get_double_or("reconstruct", "tol_step", o.tol_step);
    o.levenberg_lambda0 = cfg.get_double_or("reconstruct", "lambda0", o.levenberg_lambda0);
    o.lambda_decrease = cfg.get_double_or("reconstruct", "lambda_decrease", o.lambda_decrease);
    o.lambda_increase = cfg.get_double_or("reconstruct", "lambda_increase", o.lambda_increase);
    o.noise_level = cfg.get_double_or("reconstruct", "noise_level", o.noise_level);
    o.tikhonov = cfg.get_double_or("reconstruct", "tikhonov", o.tikhonov);
    return r;
}

ProbeBlock load_probe(const ConfigFile& cfg) {
    ProbeBlock p;
    p.b = cfg.get_double("probe", "b");
    p.n_samples = cfg.get_int("probe", "n_samples");
    p.seed = cfg.get_seed_or("probe", "seed", 0);
    const std::string mode = cfg.get_string_or("probe", "mode", "radial");
    if (mode == "radial")
        p.mode = ProbeMode::RadialOnly;
    else if (mode == "full")
        p.mode = ProbeMode::FullAngle;
    else
        cfg.fail("probe", "mode", "expected radial | full, got '" + mode + "'");
    return p;
}

SensitivityBlock load_sensitivity(const ConfigFile& cfg, const AnnulusGrid& grid) {
    SensitivityBlock s;
    const std::string type = cfg.get_string_or("sensitivity", "type", "constant");
    if (type == "constant") {
        s.type = DirectionSpecType::Constant;
        s.value = cfg.get_double_or("sensitivity", "value", 1.0);
    } else if (type == "array") {
        s.type = DirectionSpecType::Array;
        const std::vector<double> list = cfg.get_double_list("sensitivity", "values");
        if (static_cast<int>(list.size()) != grid.n_theta)
            cfg.fail("sensitivity", "values",
                     "expected n_theta = " + std::to_string(grid.n_theta) + " entries");
        s.values = Eigen::Map<const Eigen::VectorXd>(list.data(), list.size());
    } else if (type == "construction") {
        s.type = DirectionSpecType::Construction;
    } else {
        cfg.fail("sensitivity", "type",
                 "expected constant | array | construction, got '" + type + "'");
    }
    return s;
}

}  // namespace

RunConfig build_run_config(const ConfigFile& cfg, const CliOverrides& overrides) {
    RunConfig rc;

    try {
        rc.grid = build_annulus(cfg.get_double("geometry", "r1"), cfg.get_double("geometry", "r2"),
                                cfg.get_int("geometry", "n_r"), cfg.get_int("geometry", "n_theta"));
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError(cfg.path() + ": [geometry]: " + e.what());
    }

    const std::string kind = cfg.get_string("problem", "kind");
    if (kind == "elliptic")
        rc.kind = ProblemKind::Elliptic;
    else if (kind == "parabolic")
        rc.kind = ProblemKind::Parabolic;
    else
        cfg.fail("problem", "kind", "expected elliptic | parabolic, got '" + kind + "'");

    const std::string bc = cfg.get_string_or("problem", "outer_bc", "robin");
    if (bc == "robin")
        rc.outer_bc = OuterBC::Robin1;
    else if (bc == "neumann")
        rc.outer_bc = OuterBC::Neumann;
    else if (bc == "dirichlet")
        rc.outer_bc = OuterBC::Dirichlet;
    else
        cfg.fail("problem", "outer_bc", "expected robin | neumann | dirichlet, got '" + bc + "'");

    if (rc.kind == ProblemKind::Parabolic) {
        if (rc.outer_bc != OuterBC::Robin1)
            cfg.fail("problem", "outer_bc", "parabolic runs use the robin outer condition");
        if (!cfg.has_section("time"))
            throw ConfigError(cfg.path() + ": parabolic runs need a [time] section");
        try {
            rc.tg = build_time_grid(cfg.get_double("time", "T"), cfg.get_int("time", "n_t"));
        } catch (const ConfigError&) {
            throw;
        } catch (const InvalidArgument& e) {
            throw ConfigError(cfg.path() + ": [time]: " + e.what());
        }
        const std::string scheme = cfg.get_string_or("time", "scheme", "ie");
        if (scheme == "ie")
            rc.scheme = Scheme::ImplicitEuler;
        else if (scheme == "cn")
            rc.scheme = Scheme::CrankNicolson;
        else
            cfg.fail("time", "scheme", "expected ie | cn, got '" + scheme + "'");
    } else if (cfg.has_section("time")) {
        throw ConfigError(cfg.path() + ": [time] section requires kind = parabolic");
    }

    rc.gamma = load_gamma(cfg, rc.grid);
    rc.data = load_data(cfg);
    rc.solver_tol = cfg.get_double_or("solver", "tol", 1e-10);
    if (!(rc.solver_tol > 0.0)) cfg.fail("solver", "tol", "must be positive");

    if (cfg.has_section("reconstruct")) rc.reconstruct = load_reconstruct(cfg, rc.grid);
    if (cfg.has_section("probe")) rc.probe = load_probe(cfg);
    if (cfg.has_section("sensitivity")) rc.sensitivity = load_sensitivity(cfg, rc.grid);

    if (overrides.seed) {
        rc.data.seed = *overrides.seed;
        if (rc.probe) rc.probe->seed = *overrides.seed;
    }
    if (overrides.scheme) {
        if (rc.kind != ProblemKind::Parabolic)
            throw ConfigError(cfg.path() + ": --scheme applies only to parabolic runs");
        rc.scheme = *overrides.scheme;
    }

    cfg.check_all_used();
    return rc;
}

}  // namespace robin::cli
