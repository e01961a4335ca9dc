#pragma once

// Experiment orchestration: runs the checks of a config in dependency order
// and writes a CSV ledger plus trajectory exports and plot-data files.

#include "fellerlab/config.hpp"
#include "fellerlab/grid.hpp"
#include "fellerlab/solver.hpp"
#include "fellerlab/verifier.hpp"

#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <string>

namespace feller {

/// Bumped whenever the ledger column set changes.
inline constexpr int kLedgerSchemaVersion = 1;

std::string ledger_header();
std::string ledger_row(const CheckReport& rep);
std::string skip_row(const std::string& name, const std::string& cause);

/// Serialized appender; every row is flushed in call order.
class LedgerWriter {
public:
    explicit LedgerWriter(std::ostream& os);

    void append(const CheckReport& rep);
    void skip(const std::string& name, const std::string& cause);

    int passed() const { return passed_; }
    int failed() const { return failed_; }
    int skipped() const { return skipped_; }

private:
    std::mutex mu_;
    std::ostream* os_;
    int passed_ = 0, failed_ = 0, skipped_ = 0;
};

struct SuiteResult {
    std::filesystem::path ledger;
    int passed = 0;
    int failed = 0;
    int skipped = 0;

    /// A skipped check counts as not passed.
    bool all_pass() const { return failed == 0 && skipped == 0; }
};

/// Form-bound used by the checks: the config override, the catalog value, or the
/// estimate for the mollified field at the largest m.
double resolve_beta(const ExperimentConfig& cfg, const DriftField& field, const Grid& grid);

/// Writes out_dir/ledger.csv and out_dir/traj_m<m>.bin (states on the (s, t) lattice).
SuiteResult run_suite(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

enum class PlotKind { norm_vs_time, beta_vs_eps, cauchy_heatmap, decay_vs_t0 };

PlotKind parse_plot_kind(const std::string& name);
const char* to_string(PlotKind kind);

/// Plot data from ledger rows. A ledger without data rows gives a header-only
/// file; data rows without the requested kind are an error.
void write_plot_data(std::istream& ledger, PlotKind kind, std::ostream& out);
/// norm_vs_time straight from a binary trajectory.
void write_norm_vs_time(const LoadedTrajectory& traj, std::ostream& out);
/// Dispatches on the input: binary trajectories (norm_vs_time only) or a ledger.
void emit_plot_data(const std::filesystem::path& input, PlotKind kind, const std::filesystem::path& out);

}  // namespace feller
