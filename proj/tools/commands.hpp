// Command implementations behind the sqz command-line tool.
//
// Each command turns a resolved Config into a Report: ordered metadata plus
// one or more numeric tables. Writers render a Report as '#'-annotated CSV or
// as a single JSON document.

#ifndef SQZ_TOOLS_COMMANDS_HPP
#define SQZ_TOOLS_COMMANDS_HPP

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "sqz/ode.hpp"

namespace sqz::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitUnphysical = 3,
  kExitTruncation = 4,
};

/// Flat key/value configuration. Later layers override earlier ones.
class Config {
 public:
  Config() = default;

  /// Parses "key = value" lines; '#' starts a comment.
  static Config parse(const std::string& text);
  static Config load_file(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void merge(const Config& over);
  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }

  [[nodiscard]] std::string get_string(const std::string& key, const std::string& def) const;
  [[nodiscard]] double get_double(const std::string& key, double def) const;
  [[nodiscard]] std::optional<double> get_optional(const std::string& key) const;
  [[nodiscard]] int get_int(const std::string& key, int def) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool def) const;
  /// Comma-separated list, or "start:stop:count" for a linear range.
  [[nodiscard]] std::vector<double> get_list(const std::string& key,
                                             const std::vector<double>& def) const;

  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct Table {
  std::string label;  // distinguishes series; used as the file-name suffix
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;  // per-series extras
};

struct Report {
  std::string command;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, std::string>> summary;
};

struct GlobalOptions {
  bool deterministic = false;    // fixed-step RK4
  std::optional<double> tol;     // overrides the integrator tolerance
  bool json = false;
  unsigned workers = 0;          // 0 = hardware concurrency
};

IntegratorOptions integrator_options(const GlobalOptions& g, double default_rel = 1e-9,
                                     double default_abs = 1e-10);

Report cmd_evolve(const Config& cfg, const GlobalOptions& g);
Report cmd_boundary(const Config& cfg, const GlobalOptions& g);
Report cmd_criterion(const Config& cfg, const GlobalOptions& g);
Report cmd_purity(const Config& cfg, const GlobalOptions& g);
Report cmd_fullmodel(const Config& cfg, const GlobalOptions& g);
Report cmd_sweep(const Config& cfg, const GlobalOptions& g);

/// Default n grid: linear on [0, 1], logarithmic on (1, 100].
std::vector<double> default_n_grid();

/// Formats with 12 significant digits.
std::string format_number(double x);

void write_csv(const Report& report, const Table& table, std::ostream& os);
void write_json(const Report& report, std::ostream& os);

/// Writes the report. With an output path, CSV goes to one file per table
/// (suffixing the table label when there are several); JSON is one document.
void emit(const Report& report, const std::optional<std::string>& out_path, bool json,
          std::ostream& stdout_stream);

/// Runs fn(i) for i in [0, count) on a pool of worker threads.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

/// Maps a thrown exception to the documented exit code and message.
int exit_code_for(const std::exception& e);

}  // namespace sqz::cli

#endif  // SQZ_TOOLS_COMMANDS_HPP
