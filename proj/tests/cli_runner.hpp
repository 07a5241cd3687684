#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#ifndef KPCOV_CLI
#error "KPCOV_CLI must name the command-line binary"
#endif

namespace cli {

struct Result {
    int status = -1;
    std::string out;
};

/// Runs the CLI through the shell with `args` appended; stderr is discarded.
inline Result run(const std::string& args) {
    const std::string cmd = std::string("'") + KPCOV_CLI + "' " + args + " 2>/dev/null";
    Result r;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int st = ::pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

inline std::string quote(const std::string& s) { return "'" + s + "'"; }

}  // namespace cli
