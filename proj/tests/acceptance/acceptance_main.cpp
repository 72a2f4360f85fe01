#include <iostream>
#include "busyq/verify.hpp"

int main() {
    const auto results = busyq::run_acceptance(&std::cout);
    return busyq::all_passed(results) ? 0 : 1;
}
