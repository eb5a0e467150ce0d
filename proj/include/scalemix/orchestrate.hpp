#pragma once

#include <functional>
#include <iosfwd>

#include "scalemix/config.hpp"

namespace scalemix {

// Worker cap: SCALEMIX_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int worker_thread_cap();

// Runs task(0), ..., task(count - 1) on up to `threads` workers. Exceptions
// are rethrown after all workers finish, lowest index first.
void run_parallel(int count, int threads, const std::function<void(int)>& task);

// Runs the configured mode and writes its artifacts into rc.output_dir,
// logging progress to `log`. Errors surface as scalemix::Error.
void orchestrate(const RunConfig& rc, std::ostream& log);

}  // namespace scalemix
