#pragma once

#include <string>
#include <vector>

namespace mindkit {

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string out;
    std::string err;
};

/// Runs argv[0] with the given arguments, capturing stdout and stderr.
/// The child is killed once the wall-clock timeout elapses (<= 0: no limit).
/// Throws IoError only when the process cannot be spawned at all is not
/// distinguishable; a failed exec surfaces as exit code 127.
ProcessResult run_process(const std::vector<std::string>& argv, double timeout_sec);

} // namespace mindkit
