#include "mlstm/cli/cli.hpp"

int main(int argc, char** argv) { return mlstm::cli::main_entry(argc, argv); }
