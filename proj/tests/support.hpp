// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the relaydmt test suite.

#pragma once

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <relaydmt/channel.hpp>
#include <relaydmt/rng.hpp>

namespace relaydmt::testing {

/// Fading draw with unit variances from stream (seed, index).
inline FadingRealization draw(std::uint64_t seed, std::uint64_t index)
{
    CounterRng rng(seed, index);
    return sample_fading(rng, NetworkConfig{});
}

struct CliResult {
    int status = -1;
    std::string out;
};

/// Runs the CLI with `args`, capturing stdout; stderr goes to /dev/null.
inline CliResult run_cli(const std::string& args)
{
    const std::string cmd = std::string(RELAYDMT_CLI) + " " + args + " 2>/dev/null";
    CliResult r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p)
        return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0)
        r.out.append(buf.data(), n);
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

/// Lines that do not start with '#'.
inline std::string body_of(const std::string& text)
{
    std::istringstream in(text);
    std::string line, body;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#')
            body += line + "\n";
    return body;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

inline std::string temp_path(const std::string& name)
{
    const char* dir = std::getenv("TMPDIR");
    return std::string(dir ? dir : "/tmp") + "/relaydmt_test_" + name;
}

} // namespace relaydmt::testing
