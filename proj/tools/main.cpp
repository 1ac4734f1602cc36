#include "commands.hpp"

int main(int argc, char** argv) {
  fraclap::cli::apply_thread_env();
  return fraclap::cli::run_cli(argc, argv);
}
