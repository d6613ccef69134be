#pragma once

namespace mfvol::cli {

/// Exit codes: 0 success, 2 input or validation failure, 3 numerical failure.
int run(int argc, char** argv);

}  // namespace mfvol::cli
