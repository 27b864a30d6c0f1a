#ifndef CROPML_CLI_APP_HPP
#define CROPML_CLI_APP_HPP

namespace cropml::cli {

// Full command-line entry point. Returns the process exit code:
// 0 success, 1 usage error, 2 data error, 3 numeric failure.
int run(int argc, const char* const* argv);

} // namespace cropml::cli

#endif
