#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "exinf/doubleslit.hpp"
#include "exinf/eigensolver.hpp"
#include "exinf/hamiltonian.hpp"
#include "exinf/variational.hpp"
#include "json.hpp"

namespace exinf::app {

enum class Command { eigensolve, variational, consistency, doubleslit, sample };

std::string_view command_name(Command command);
std::optional<Command> parse_command(std::string_view name);

/// A configuration document that cannot be used. `where` is "line L, column C"
/// when the problem has a position in the text, and `field` the dotted path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::string where, const std::string& message);
  const std::string& field() const noexcept { return field_; }
  const std::string& where() const noexcept { return where_; }

 private:
  std::string field_;
  std::string where_;
};

struct ConsistencyInput {
  std::vector<std::size_t> states;  ///< eigenstate indices
  std::vector<Complex> coefficients;
  double assigned_energy = 0.0;
  double tolerance = 1e-6;
};

struct ExperimentConfig {
  Command command = Command::eigensolve;
  std::optional<Grid> grid;
  std::optional<Potential> potential;
  std::size_t states = 0;
  EigensolverOptions eigensolver;
  VariationalOptions variational;
  ConsistencyInput consistency;
  SlitConfig slits;
  std::uint64_t hits = 0;
  std::uint64_t seed = 0;

  std::vector<std::string> warnings;
  /// Every setting the run will use, defaults included.
  nlohmann::ordered_json echo;
};

/// Parses a YAML document for `command`. Unknown keys, missing required keys,
/// ill-typed values and broken invariants all throw ConfigError.
ExperimentConfig parse_config(std::string_view text, Command command);

/// Replaces the seed used by the variational initializer and the hit sampler.
void override_seed(ExperimentConfig& config, std::uint64_t seed);

}  // namespace exinf::app
