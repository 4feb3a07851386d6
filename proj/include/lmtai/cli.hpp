#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lmtai/config_io.hpp"

namespace lmtai {

struct ResultTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> footer;
};

struct CliRequest {
  std::string command;
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<std::string> q_mode;
  std::optional<std::string> pulse_mode;
};

enum ExitCode { kExitOk = 0, kExitError = 1, kExitUsage = 2, kExitOracle = 3 };

const std::vector<std::string>& commands();

ParsedConfig parse_config(const std::string& path);
void apply_overrides(RunConfig& cfg, const CliRequest& req);

std::string render_table(const ResultTable& t);
void write_table(const ResultTable& t, const std::string& path);

// Runs a command; the bool is false when an oracle bound was exceeded.
std::pair<ResultTable, bool> run_command(const std::string& command, const RunConfig& cfg);

int dispatch(const CliRequest& req, std::ostream& log);

}  // namespace lmtai
