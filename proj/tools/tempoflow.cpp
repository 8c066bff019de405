#include "tempoflow/cli/main.hpp"

int main(int argc, char** argv) {
    return tempoflow::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
