#pragma once

#include <iosfwd>

namespace optohmf::cli {

// Exit codes. Every failure also prints one line to stderr:
//   error: category=<name> code=<n> message="<text>"
enum ExitCode : int {
  kOk = 0,
  kUsage = 64,
  kConfig = 65,
  kParameter = 66,
  kGrid = 67,
  kNumerical = 68,
  kFit = 69,
  kIo = 74,
  kDomain = 75,
  kInternal = 70,
};

int run(int argc, char** argv);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace optohmf::cli
