#pragma once

#include <string>

#include "folded/moduli_s4.hpp"

namespace folded::cli {

enum ExitCode { kPass = 0, kInputError = 1, kVerifyFail = 2, kTierViolation = 3 };

// Accepts "0.5", "-0.2+0.3i", "0.6-0.8i", "i", "-2i".
cplx parse_complex(const std::string& s);

int run(int argc, char** argv);

}  // namespace folded::cli
