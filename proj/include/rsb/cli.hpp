#pragma once

namespace rsb {

// Exit codes: 0 success, 1 usage, 2 bad configuration or input, 3 numeric failure.
int cli_run(int argc, char** argv);

}  // namespace rsb
