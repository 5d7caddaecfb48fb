#pragma once

#include "tvmesh/energy.hpp"
#include "tvmesh/noise.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tvmesh::cli {

enum class Command { AddNoise, Denoise, Inpaint, Tv, MinSurface, Metrics };

struct RunConfig {
  Command command = Command::Tv;
  std::string input;
  std::string output;
  std::string reference;
  std::string data;
  std::string mask;
  std::optional<std::array<double, 6>> maskBox;  // xmin,ymin,zmin,xmax,ymax,zmax
  std::string telemetry;
  std::string preset;
  SolverParams params;
  NoiseSpec noise;
  bool harmonicFill = false;  // replace free vertices by harmonic_fill first
  bool skipInit = false;
  double initStep = 0.1;
  int initIters = 1000;
};

std::string command_name(Command c);

/// Every setting of `config` relevant to its command, as key/value pairs
/// using the flag names.
std::vector<std::pair<std::string, std::string>> effective_config(const RunConfig& config);

/// Executes one command. Results go to `out` as `key=value` lines,
/// diagnostics to `err`. Returns the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses the command line (including `--config FILE` with `key = value`
/// lines, overridden by explicit flags) and runs it.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tvmesh::cli
