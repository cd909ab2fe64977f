#pragma once

#include <ostream>

namespace ergotac
{
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitInvalid = 2;

/// Entry point of the `ergotac` command line tool. Diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Keeps freed training buffers in the heap instead of returning them to the OS.
void tune_allocator();

}  // namespace ergotac
