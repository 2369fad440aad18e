#include <gsaudit/cli.hpp>

int main(int argc, char** argv) {
    return gsaudit::cli::main(argc, argv);
}
