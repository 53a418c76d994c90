#include "quantcal/runner_io.hpp"

int main(int argc, char** argv) {
    return quantcal::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
