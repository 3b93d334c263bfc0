#pragma once

namespace rerank {

// Full command-line entry point, linkable for in-process testing. Returns the
// process exit code: 0 success, 1 usage error, 2 data error, 3 numeric error.
int run_cli(int argc, const char* const argv[]);

}  // namespace rerank
