/// \file cli.hpp
/// \brief Batch front end: generate, factor, solve, null spaces, pseudoinverse

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hifir::cli {

enum class Command { gen, factor, solve, nullspace, pinv };
enum class RhsMode { file, row_sums, random_seeded };
enum class Generator { none, neumann, advdiff };

struct RunConfig {
  Command     command = Command::solve;
  std::string matrix_path;
  RhsMode     rhs_mode = RhsMode::row_sums;
  std::string rhs_path;
  std::string factor_path;  ///< load a saved factorization instead of factoring

  double        alpha    = 10.0;
  double        sigma    = 1e-4;
  double        tau      = 5.0;
  std::size_t   restart  = 30;
  double        rtol     = 1e-12;
  std::size_t   maxit    = 500;
  double        tol_null = 1e-10;
  std::uint64_t seed     = 0;
  bool          left     = false;  ///< nullspace: N(A^T) instead of N(A)
  bool          constant_rns = false;  ///< pinv: N(A) = span{1} is known

  Generator                 gen = Generator::none;
  std::array<std::size_t, 2> grid{0, 0};
  std::array<double, 2>     velocity{1.0, 1.0};

  std::string out_path;
  std::string report_path;  ///< empty prints the report to stdout
  std::string history_path;  ///< JSON lines, optional

  void validate() const;
};

/// \brief bad arguments or unreadable input; maps to exit code 1
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// \brief parse argv; throws InputError, returns nullopt after --help
std::optional<RunConfig> parse_args(int argc, const char *const *argv, std::ostream &help_out);

/// \brief execute; 0 converged, 2 stagnation or breakdown, 1 input error
int run(const RunConfig &cfg, std::ostream &out, std::ostream &err);

/// \brief parse and run
int main_entry(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace hifir::cli
