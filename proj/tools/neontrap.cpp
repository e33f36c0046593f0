// neontrap: command-line driver for the electron-on-neon trap calculations.
#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "neontrap/cli/commands.hpp"
#include "neontrap/cli/config.hpp"
#include "neontrap/cli/result_table.hpp"
#include "neontrap/errors.hpp"
#include "neontrap/parallel.hpp"

namespace fs = std::filesystem;
using namespace neontrap;
using namespace neontrap::cli;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string format;
  int threads = 0;
};

// Flag, then NEONTRAP_THREADS, then the config file, then the hardware.
std::size_t resolve_workers(int flag, const RunConfig& config) {
  if (flag > 0) return static_cast<std::size_t>(flag);
  if (const char* env = std::getenv("NEONTRAP_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) throw ConfigError(fmt::format("NEONTRAP_THREADS must be a positive integer, got '{}'", env));
    return static_cast<std::size_t>(n);
  }
  if (config.threads > 0) return config.threads;
  return default_worker_count();
}

RunConfig load_or_default(const std::string& path) {
  return path.empty() ? RunConfig{} : load_config(path);
}

std::string render(const ResultTable& table, const std::string& format) {
  return format == "json" ? to_json(table) : to_csv(table);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

// One table goes to `out` itself; several go to <stem>.<block><ext> next to it.
std::vector<fs::path> table_paths(const fs::path& out, const std::vector<ResultTable>& tables) {
  if (tables.size() == 1) return {out};
  std::vector<fs::path> paths;
  for (const auto& t : tables) {
    fs::path p = out;
    p.replace_filename(out.stem().string() + "." + t.block + out.extension().string());
    paths.push_back(p);
  }
  return paths;
}

fs::path sidecar(const fs::path& out, const std::string& suffix) { return fs::path(out.string() + suffix); }

int run_subcommand(const std::string& name, const CommonArgs& args) {
  const RunConfig config = load_or_default(args.config_path);
  const std::string format = args.format.empty() ? config.format : args.format;
  const std::size_t workers = resolve_workers(args.threads, config);

  const auto start = std::chrono::steady_clock::now();
  const CommandOutput result = run_command(name, config, workers);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  if (args.out_path.empty()) {
    for (std::size_t i = 0; i < result.tables.size(); ++i) {
      if (i > 0) std::cout << "\n";
      std::cout << render(result.tables[i], format);
    }
  } else {
    const fs::path out(args.out_path);
    const auto paths = table_paths(out, result.tables);
    nlohmann::ordered_json run;
    run["command"] = name;
    run["config_hash"] = config_hash(config);
    run["workers"] = workers;
    run["wall_time_s"] = wall;
    run["files"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < paths.size(); ++i) {
      write_file(paths[i], render(result.tables[i], format));
      run["files"].push_back(paths[i].string());
    }
    write_file(sidecar(out, ".config.ini"), effective_config(config));
    write_file(sidecar(out, ".run.json"), run.dump(2) + "\n");
  }
  std::cerr << fmt::format("{}: {} table(s), {} worker(s), wall time {:.3f} s\n", name, result.tables.size(),
                           workers, wall);
  return 0;
}

ResultTable read_table(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open result file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return path.extension() == ".json" ? parse_json(text.str()) : parse_csv(text.str());
}

// Effective-config echo written next to the output: <table>.config.ini, or, for one of
// several block files <stem>.<block><ext>, <stem><ext>.config.ini.
std::optional<fs::path> find_sidecar_config(const fs::path& table_path, const std::string& block) {
  fs::path direct = sidecar(table_path, ".config.ini");
  if (fs::exists(direct)) return direct;
  const std::string stem = table_path.stem().string();
  const std::string suffix = "." + block;
  if (stem.size() > suffix.size() && stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
    fs::path base = table_path;
    base.replace_filename(stem.substr(0, stem.size() - suffix.size()) + table_path.extension().string());
    fs::path candidate = sidecar(base, ".config.ini");
    if (fs::exists(candidate)) return candidate;
  }
  return std::nullopt;
}

int run_verify(const std::string& table_file, const CommonArgs& args, double rtol, double atol) {
  const fs::path table_path(table_file);
  const ResultTable stored = read_table(table_path);
  const auto* command = stored.find_metadata("command");
  const auto* hash = stored.find_metadata("config_hash");
  if (command == nullptr || hash == nullptr) {
    throw ConfigError("'" + table_file + "' carries no command/config_hash metadata");
  }

  std::string config_path = args.config_path;
  if (config_path.empty()) {
    const auto found = find_sidecar_config(table_path, stored.block);
    if (!found) throw ConfigError("no --config given and no effective-config file found next to '" + table_file + "'");
    config_path = found->string();
  }
  const RunConfig config = load_config(config_path);
  if (config_hash(config) != *hash) {
    throw ConfigError(fmt::format("config hash mismatch: table has {}, '{}' hashes to {}", *hash, config_path,
                                  config_hash(config)));
  }

  const CommandOutput fresh = run_command(*command, config, resolve_workers(args.threads, config));
  for (const auto& table : fresh.tables) {
    if (table.block != stored.block) continue;
    const TableComparison cmp = compare_tables(stored, table, rtol, atol);
    if (!cmp.equal) {
      std::cerr << "verify FAILED for " << table_file << ": " << cmp.first_difference << "\n";
      return kExitNumerical;
    }
    std::cout << fmt::format("verify OK: {} ({} block '{}', {} rows, rtol {:g})\n", table_file, *command,
                             stored.block, stored.rows.size(), rtol);
    return 0;
  }
  std::cerr << "verify FAILED: fresh run of " << *command << " has no block '" << stored.block << "'\n";
  return kExitNumerical;
}

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "INI configuration file")->check(CLI::ExistingFile);
  sub->add_option("--threads", args.threads, "worker count (overrides NEONTRAP_THREADS and the config)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electron-on-neon trap calculations"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CommonArgs args;
  const std::vector<std::pair<std::string, std::string>> descriptions = {
      {"potential-z", "perpendicular potential profiles for each neon thickness"},
      {"ground-sweep", "ground-state energy, mean height and gap over thickness and field"},
      {"lateral", "local-thickness lateral potential and radial spectrum"},
      {"field-sweep", "lateral level spacing against the applied field, with harmonic fit"},
      {"growth", "growth-condition estimates for the neon film"},
  };
  for (const auto& [name, help] : descriptions) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, args);
    sub->add_option("--out", args.out_path, "output path (stdout when omitted)");
    sub->add_option("--format", args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }

  std::string table_file;
  double rtol = 1e-6;
  double atol = 1e-9;
  auto* verify = app.add_subcommand("verify", "re-run the command recorded in a result file and compare");
  verify->add_option("table", table_file, "stored CSV or JSON result")->required();
  add_common(verify, args);
  verify->add_option("--rtol", rtol, "relative tolerance")->check(CLI::NonNegativeNumber);
  verify->add_option("--atol", atol, "absolute tolerance")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "verify") return run_verify(table_file, args, rtol, atol);
    return run_subcommand(name, args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnboundError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
