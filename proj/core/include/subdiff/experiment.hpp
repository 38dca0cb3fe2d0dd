#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subdiff/fractional_pde.hpp"
#include "subdiff/sub_pricing.hpp"
#include "subdiff/subordinator.hpp"

namespace subdiff {

enum class ExperimentKind { EuroCallSweep, AmericanPutSweep, LookbackSweep, Custom };

enum class Method { McClosedForm, McCrr, FdPde, PathMc };

std::string method_name(Method method);
Method parse_method(const std::string& name);
std::string experiment_kind_name(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

/// Full description of a sweep: the alpha grid, the methods to run per
/// alpha, and every numerical knob. Presets fig2/fig3/fig4 reproduce the
/// published experiment configurations.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::EuroCallSweep;
    std::vector<double> alpha_grid;
    std::vector<Method> methods;
    SubordinatorFamily family = SubordinatorFamily::AlphaStable;
    double lambda = 0.0;
    MarketParams market;
    MCConfig mc;
    TreeConfig tree;
    PdeGrid pde;
    int path_grid_size = 1000;
    /// Staircase resolution when mc.delta is 0: target increments per draw.
    double step_target = 1e4;
    std::string output_path = "sweep";

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Named parameter presets for the published figures.
ExperimentConfig preset(const std::string& name);

struct SweepRow {
    double alpha = 1.0;
    std::string method;
    double value = 0.0;
    double std_error = 0.0;
    double elapsed_ms = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<ResultRecord> records;
    std::vector<std::string> errors;  // per-cell failures, partial rows kept

    [[nodiscard]] bool ok() const { return errors.empty(); }
};

/// Runs every (alpha, method) cell, timing each one, and writes
/// <output_path>.csv and <output_path>.json. Cell failures are recorded
/// and the remaining cells still run.
SweepResult run_experiment(const ExperimentConfig& cfg);

void write_sweep_csv(const SweepResult& result, const std::string& file);
void write_sweep_json(const SweepResult& result, const std::string& file);

/// Parses a file produced by write_sweep_csv; values round-trip exactly.
std::vector<SweepRow> read_sweep_csv(const std::string& file);

struct RelationRow {
    std::string check;
    double alpha = 1.0;
    double value = 0.0;      // residual or gap
    double bound = 0.0;      // tolerance or analytic bound
    double std_error = 0.0;
    bool pass = false;
    std::string note;
};

struct RelationReport {
    std::vector<RelationRow> rows;

    [[nodiscard]] bool all_pass() const;
};

/// Verifies put-call parity (shared draws, |residual| < 1e-9) and, when
/// requested, the Bachelier/Black-Scholes gap bound. A market outside the
/// bound's regime is reported as a failing row, never silently adjusted.
RelationReport check_relations(const ExperimentConfig& cfg, bool parity,
                               bool gap_bound);

struct SimulatedPathFiles {
    std::vector<std::string> subordinator_files;  // t,S_t
    std::vector<std::string> trajectory_files;    // t,S_t,gbm,abm
};

/// Writes `count` simulated trajectories of the inverse clock S(t) and the
/// subordinated geometric / arithmetic Brownian motions sharing that clock
/// and noise. File stem `out` expands to <out>_s_<k>.csv and
/// <out>_traj_<k>.csv.
SimulatedPathFiles simulate_paths(const LaplaceExponentSpec& spec, double T,
                                  int grid_size, int count, std::uint64_t seed,
                                  double z0, double mu, double sigma,
                                  const std::string& out);

}  // namespace subdiff
