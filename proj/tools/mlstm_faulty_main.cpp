#include "mlstm/cli/cli.hpp"

int main(int argc, char** argv) {
  mlstm::cli::CliOptions options;
  options.allow_fault_injection = true;
  return mlstm::cli::main_entry(argc, argv, options);
}
