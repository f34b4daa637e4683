#pragma once

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "rdbench/errors.hpp"

namespace rdbench {

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Space-joined command line with minimal quoting, for logs and golden tests.
inline std::string command_string(const std::vector<std::string>& argv) {
    std::ostringstream os;
    for (std::size_t i = 0; i < argv.size(); ++i) {
        if (i) os << ' ';
        bool needs_quote = argv[i].empty() || argv[i].find(' ') != std::string::npos;
        if (needs_quote) os << '\'' << argv[i] << '\'';
        else os << argv[i];
    }
    return os.str();
}

// Runs argv[0] with the given arguments (no shell), capturing stdout and
// stderr. Throws job_error only when the process cannot be spawned at all;
// a nonzero exit is reported through CommandResult.
inline CommandResult run_command(const std::vector<std::string>& argv) {
    if (argv.empty()) throw invalid_input_error("run_command: empty argv");

    int out_pipe[2], err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw job_error("pipe() failed: " + std::string(std::strerror(errno)));

    pid_t pid = fork();
    if (pid < 0) throw job_error("fork() failed: " + std::string(std::strerror(errno)));

    if (pid == 0) {
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);
        std::vector<char*> cargv;
        cargv.reserve(argv.size() + 1);
        for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        std::string msg = "exec failed: " + argv[0] + ": " + std::strerror(errno) + "\n";
        ssize_t ignored = write(STDERR_FILENO, msg.data(), msg.size());
        (void)ignored;
        _exit(127);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);

    // Drain both pipes as data arrives so a chatty tool cannot block on a
    // full pipe buffer.
    CommandResult result;
    struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    std::string* sinks[2] = {&result.out, &result.err};
    int open_fds = 2;
    char buf[4096];
    while (open_fds > 0) {
        if (poll(fds, 2, -1) < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (int i = 0; i < 2; ++i) {
            if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            ssize_t got = read(fds[i].fd, buf, sizeof buf);
            if (got > 0) {
                sinks[i]->append(buf, static_cast<std::size_t>(got));
            } else {
                close(fds[i].fd);
                fds[i].fd = -1;
                --open_fds;
            }
        }
    }

    int status = 0;
    if (waitpid(pid, &status, 0) < 0)
        throw job_error("waitpid() failed: " + std::string(std::strerror(errno)));
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status)) result.exit_code = 128 + WTERMSIG(status);
    return result;
}

// Splits a command template on whitespace. No shell semantics; quoting is
// not supported in templates by design (determinism over convenience).
inline std::vector<std::string> split_command(const std::string& cmd) {
    std::vector<std::string> out;
    std::istringstream is(cmd);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace rdbench
