#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace g2flow {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// State left the stable-form locus (negative radicand, F <= 0, ...).
struct DomainError : Error { using Error::Error; };
struct PositivityError : Error { using Error::Error; };
struct SeedError : Error { using Error::Error; };
struct ConstraintError : Error { using Error::Error; };
struct NonAnalyticError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct RegionExitError : Error { using Error::Error; };
struct ClosureError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

struct StiffnessError : Error {
  StiffnessError(const std::string& what, double param, std::vector<double> last)
      : Error(what), param(param), last_state(std::move(last)) {}
  double param;
  std::vector<double> last_state;
};

struct ResonanceError : Error {
  ResonanceError(const std::string& what, std::vector<int> index, int component)
      : Error(what), multi_index(std::move(index)), component(component) {}
  std::vector<int> multi_index;
  int component;
};

struct BracketError : Error {
  BracketError(const std::string& what, std::string table)
      : Error(what), scan_table(std::move(table)) {}
  std::string scan_table;
};

}  // namespace g2flow
