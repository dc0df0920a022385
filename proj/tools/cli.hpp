#ifndef NNGIBBS_CLI_HPP
#define NNGIBBS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace nngibbs::cli {

enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kUsage = 2,
  kIo = 3,
  kValidation = 4,
  kNotConverged = 5,
};

// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nngibbs::cli

#endif  // NNGIBBS_CLI_HPP
