#pragma once

#include <robin/elliptic.hpp>
#include <robin/geometry.hpp>
#include <robin/inverse.hpp>
#include <robin/parabolic.hpp>
#include <robin/robin_coefficient.hpp>
#include <robin/stability.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace robin::cli {

/// Config problem addressed by file, line, and field; the CLI maps it to
/// exit code 2.
class ConfigError : public InvalidArgument {
  public:
    using InvalidArgument::InvalidArgument;
};

/// Flat sectioned key-value text: [section] headers, key = value lines,
/// # or ; comments. Getters mark keys as consumed; check_all_used rejects
/// anything the run does not understand, so typos fail fast.
class ConfigFile {
  public:
    static ConfigFile parse(const std::filesystem::path& path);

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    int get_int(const std::string& section, const std::string& key) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t get_seed_or(const std::string& section, const std::string& key,
                              std::uint64_t fallback) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;

    void check_all_used() const;
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& message) const;

  private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool used = false;
    };

    std::string path_;
    std::map<std::string, Entry> entries_;  // "section.key"
    std::map<std::string, int> sections_;   // section -> first line

    const Entry* find(const std::string& section, const std::string& key) const;
    const Entry& require(const std::string& section, const std::string& key) const;
};

enum class ProblemKind { Elliptic, Parabolic };
enum class DataSpecType { Oracle, Constant, Zero, File };

struct DataBlock {
    DataSpecType type = DataSpecType::Zero;
    double c1 = 0.0, c2 = 0.0;       // oracle
    double g_value = 0.0, h_value = 0.0;  // constant
    std::filesystem::path path;      // file
    double noise = 0.0;              // relative Gaussian noise on synthesized data
    std::uint64_t seed = 0;
};

struct ReconstructBlock {
    Eigen::VectorXd gamma0;  // resolved to n_theta entries
    ReconstructionOptions opts;
};

struct ProbeBlock {
    double b = 0.1;
    int n_samples = 100;
    std::uint64_t seed = 0;
    ProbeMode mode = ProbeMode::RadialOnly;
};

enum class DirectionSpecType { Constant, Array, Construction };

struct SensitivityBlock {
    DirectionSpecType type = DirectionSpecType::Constant;
    double value = 1.0;
    Eigen::VectorXd values;
};

struct RunConfig {
    AnnulusGrid grid;
    ProblemKind kind = ProblemKind::Elliptic;
    OuterBC outer_bc = OuterBC::Robin1;
    TimeGrid tg;  // populated when parabolic
    Scheme scheme = Scheme::ImplicitEuler;
    RobinCoefficient gamma;
    DataBlock data;
    double solver_tol = 1e-10;
    std::optional<ReconstructBlock> reconstruct;
    std::optional<ProbeBlock> probe;
    std::optional<SensitivityBlock> sensitivity;
};

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<Scheme> scheme;
};

/// Validates every recognized section and rejects unknown keys before any
/// solve happens.
RunConfig build_run_config(const ConfigFile& cfg, const CliOverrides& overrides);

}  // namespace robin::cli
