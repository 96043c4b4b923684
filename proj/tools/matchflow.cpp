#include "matchflow/app.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return matchflow::app::run(argc, argv, std::cout, std::cerr);
}
