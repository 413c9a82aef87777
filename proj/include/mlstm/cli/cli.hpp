#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlstm::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

struct CliOptions {
  // Exposes `gradcheck --corrupt-backward OP` for the negative-control build.
  bool allow_fault_injection = false;
};

/// Runs one `mlstm` invocation. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const CliOptions& options = {});

int main_entry(int argc, char** argv, const CliOptions& options = {});

}  // namespace mlstm::cli
