#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

namespace cli {

struct Result {
  int code = -1;
  std::string out;
};

/// Runs the command-line tool with `args` (already shell quoted), capturing
/// stdout. stderr is discarded unless `args` redirects it.
inline Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" FEATGTS_CLI "' " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string model_path() { return "'" FEATGTS_SOURCE_DIR "/models/sir.fgts'"; }

}  // namespace cli
