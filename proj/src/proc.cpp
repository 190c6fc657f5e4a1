#include "hilbench/proc.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "hilbench/error.hpp"

namespace hilbench {

std::optional<std::filesystem::path> find_executable(const std::string& name) {
    namespace fs = std::filesystem;
    auto runnable = [](const fs::path& p) {
        std::error_code ec;
        return fs::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
    };
    if (name.find('/') != std::string::npos) {
        fs::path p{name};
        if (runnable(p)) return p;
        return std::nullopt;
    }
    const char* path_env = std::getenv("PATH");
    if (!path_env) return std::nullopt;
    std::string paths{path_env};
    std::size_t start = 0;
    while (start <= paths.size()) {
        std::size_t colon = paths.find(':', start);
        std::string dir = colon == std::string::npos ? paths.substr(start)
                                                     : paths.substr(start, colon - start);
        if (!dir.empty()) {
            fs::path p = fs::path(dir) / name;
            if (runnable(p)) return p;
        }
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    return std::nullopt;
}

RunResult run_argv(const std::vector<std::string>& argv, double timeout_s,
                   const std::optional<std::filesystem::path>& workdir) {
    if (argv.empty()) raise(Errc::InvalidArgument, "empty argv");

    int fds[2];
    if (pipe(fds) != 0) raise(Errc::InvalidArgument, "pipe: " + std::string(strerror(errno)));

    pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        raise(Errc::InvalidArgument, "fork: " + std::string(strerror(errno)));
    }

    if (pid == 0) {
        setpgid(0, 0);
        close(fds[0]);
        dup2(fds[1], STDOUT_FILENO);
        dup2(fds[1], STDERR_FILENO);
        close(fds[1]);
        if (workdir) {
            if (chdir(workdir->c_str()) != 0) _exit(126);
        }
        std::vector<char*> cargv;
        cargv.reserve(argv.size() + 1);
        for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        _exit(127);
    }

    close(fds[1]);
    fcntl(fds[0], F_SETFL, O_NONBLOCK);

    RunResult result;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(timeout_s));

    bool open = true;
    while (open) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            result.timed_out = true;
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
        }
        int wait_ms = result.timed_out
                          ? 100
                          : static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                                 deadline - now)
                                                 .count()) +
                                1;
        struct pollfd pfd{fds[0], POLLIN, 0};
        int rc = poll(&pfd, 1, std::min(wait_ms, 500));
        if (rc > 0) {
            char buf[4096];
            for (;;) {
                ssize_t n = read(fds[0], buf, sizeof(buf));
                if (n > 0) {
                    result.output.append(buf, static_cast<std::size_t>(n));
                } else if (n == 0) {
                    open = false;
                    break;
                } else {
                    break;  // EAGAIN
                }
            }
        }
        if (result.timed_out && rc <= 0) break;
    }
    close(fds[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    if (result.timed_out) {
        result.exit_code = -1;
    } else if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = 128 + WTERMSIG(status);
    }
    return result;
}

}  // namespace hilbench
