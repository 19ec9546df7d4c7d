#pragma once

namespace rumin::cli {

// Exit codes: 0 success, 1 semantic validation failure, 2 engine or
// verification failure (a certificate is printed), 64 malformed input.
int run(int argc, char** argv);

}  // namespace rumin::cli
