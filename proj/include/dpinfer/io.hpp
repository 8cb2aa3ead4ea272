#ifndef DPINFER_IO_HPP_
#define DPINFER_IO_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dpinfer/bench.hpp"
#include "dpinfer/core.hpp"
#include "dpinfer/inference.hpp"

namespace dpinfer {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
double parse_double(const std::string& text, const std::string& context);

CountCube load_cube_file(const std::string& path);

// Query file: JSON {"coefficients": [...], "epsilon": e, "delta": d}; the
// requirement is optional. A "constant" entry is rejected: additive
// constants never change a linear query's sensitivity or its private
// answer, so they must not appear in the coefficients' stead.
struct QuerySpec {
    LinearQuery query;
    std::optional<UtilityRequirement> requirement;
};
QuerySpec load_query(std::istream& in);
QuerySpec load_query_file(const std::string& path);

// History CSV: header `alpha,sensitivity,y,q_0,...,q_{n-1}`, one row per
// record. Values round-trip bit for bit.
void save_history(std::ostream& out, const QueryHistory& history);
QueryHistory load_history(std::istream& in);
void save_history_file(const std::string& path, const QueryHistory& history);
QueryHistory load_history_file(const std::string& path);

// Mass vector CSV: header `offset,mass`, offsets ascending, center 0.
void save_pmv(std::ostream& out, const ProbabilityMassVector& pmv);
ProbabilityMassVector load_pmv(std::istream& in);
void save_pmv_file(const std::string& path, const ProbabilityMassVector& pmv);
ProbabilityMassVector load_pmv_file(const std::string& path);

// Posterior: the mass-vector CSV at `csv_path` plus a JSON sidecar
// (same path with .json appended) carrying center, method, loss and the
// method parameter (gamma or samples).
void save_posterior(const std::string& csv_path, const Posterior& posterior,
                    const InferenceConfig& config);

// Run log CSV: qid,served_from,alpha_spent,estimate,L,U,epsilon,delta,true_theta.
void save_run_log(std::ostream& out, const std::vector<RunRecord>& log);
void save_run_log_file(const std::string& path,
                       const std::vector<RunRecord>& log);

// Experiment config JSON; unknown keys are rejected to catch typos.
ExperimentConfig load_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config_file(const std::string& path);

}  // namespace dpinfer

#endif  // DPINFER_IO_HPP_
