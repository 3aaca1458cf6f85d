// ============================================================================
// stratsynth/external_backend.hpp — real solver via subprocess
// ============================================================================
//
// Materializes the instance with its (check-sat) command replaced by
// (check-sat-using <rendered strategy>), launches the configured command,
// enforces the wallclock timeout (SIGKILL on the process group after
// timeout + grace), and parses the first token of standard output into
// sat/unsat/unknown. Any other output or a nonzero exit is recorded as an
// error result; a missing solver binary raises BackendUnavailableError.
//
// Command template placeholders: {file} (required), {seed} (optional).
//
// ============================================================================

#pragma once

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <utility>

#include "stratsynth/backend.hpp"
#include "stratsynth/errors.hpp"

namespace stratsynth {

namespace detail {

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string output;        // standard output, truncated to a sane bound
    std::int64_t wall_ms = 0;
};

// Runs `sh -c command` in its own process group, killing the group when the
// deadline passes.
inline ProcessResult run_with_deadline(const std::string& command, std::int64_t timeout_ms,
                                       std::int64_t grace_ms) {
    int pipe_fd[2];
    if (pipe(pipe_fd) != 0) throw IoError("pipe() failed");

    const auto start = std::chrono::steady_clock::now();
    const pid_t pid = fork();
    if (pid < 0) {
        close(pipe_fd[0]);
        close(pipe_fd[1]);
        throw IoError("fork() failed");
    }
    if (pid == 0) {
        setpgid(0, 0);
        dup2(pipe_fd[1], STDOUT_FILENO);
        close(pipe_fd[0]);
        close(pipe_fd[1]);
        const int devnull = open("/dev/null", O_WRONLY);
        if (devnull >= 0) dup2(devnull, STDERR_FILENO);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    close(pipe_fd[1]);
    fcntl(pipe_fd[0], F_SETFL, O_NONBLOCK);

    ProcessResult res;
    constexpr std::size_t kMaxOutput = 1 << 16;
    bool killed = false;
    int status = 0;
    for (;;) {
        char buf[4096];
        ssize_t n;
        while ((n = read(pipe_fd[0], buf, sizeof buf)) > 0)
            if (res.output.size() < kMaxOutput) res.output.append(buf, static_cast<std::size_t>(n));

        const pid_t done = waitpid(pid, &status, WNOHANG);
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
        if (done == pid) {
            res.wall_ms = elapsed;
            break;
        }
        if (!killed && elapsed > timeout_ms + grace_ms) {
            kill(-pid, SIGKILL);
            killed = true;
            res.timed_out = true;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    // Drain whatever remained in the pipe.
    char buf[4096];
    ssize_t n;
    while ((n = read(pipe_fd[0], buf, sizeof buf)) > 0)
        if (res.output.size() < kMaxOutput) res.output.append(buf, static_cast<std::size_t>(n));
    close(pipe_fd[0]);

    if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
    return res;
}

inline std::string first_token(const std::string& text) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    return text.substr(start, i - start);
}

inline std::string substitute_placeholder(std::string text, const std::string& key,
                                          const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        text.replace(pos, key.size(), value);
        pos += value.size();
    }
    return text;
}

}  // namespace detail

// Replaces every (check-sat) command with one applying the given strategy.
inline std::string rewrite_check_sat(const std::string& text, const std::string& strategy_text) {
    const std::string replacement = "(check-sat-using " + strategy_text + ")";
    std::string out;
    out.reserve(text.size() + replacement.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t hit = text.find("(check-sat", pos);
        if (hit == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        out.append(text, pos, hit - pos);
        std::size_t i = hit + std::string("(check-sat").size();
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i < text.size() && text[i] == ')') {
            out += replacement;
            pos = i + 1;
        } else {
            out += "(check-sat";  // e.g. an existing (check-sat-using ...)
            pos = hit + std::string("(check-sat").size();
        }
    }
    return out;
}

// ── ExternalBackend ─────────────────────────────────────────────────────────

class ExternalBackend final : public Backend {
  public:
    ExternalBackend(std::string command_template, std::uint64_t seed,
                    std::filesystem::path work_dir, std::int64_t grace_ms = 250)
        : template_(std::move(command_template)),
          seed_(seed),
          work_dir_(std::move(work_dir)),
          grace_ms_(grace_ms) {
        if (template_.find("{file}") == std::string::npos)
            throw ConfigError("solver command template must contain {file}");
        std::filesystem::create_directories(work_dir_);
        check_binary();
    }

    std::string tag() const override { return "external:" + detail::first_token(template_); }
    std::uint64_t seed() const override { return seed_; }

  protected:
    Outcome do_execute(const StrategyNode& strategy, const Instance& instance,
                       std::int64_t timeout_ms) override {
        if (instance.text_source.empty())
            throw IoError("external backend needs a file-backed instance: " + instance.id);
        const std::string text = read_text_file(instance.text_source);
        const std::string rewritten = rewrite_check_sat(text, render(strategy));

        const std::filesystem::path tmp =
            work_dir_ / ("run-" + std::to_string(::getpid()) + "-" +
                         std::to_string(counter_.fetch_add(1)) + ".smt2");
        {
            std::ofstream out(tmp);
            if (!out) throw IoError("cannot write temp instance: " + tmp.string());
            out << rewritten;
        }
        std::string cmd = detail::substitute_placeholder(template_, "{file}", tmp.string());
        cmd = detail::substitute_placeholder(cmd, "{seed}", std::to_string(seed_));

        detail::ProcessResult proc = detail::run_with_deadline(cmd, timeout_ms, grace_ms_);
        std::error_code ec;
        std::filesystem::remove(tmp, ec);

        if (proc.exit_code == 127)
            throw BackendUnavailableError("solver command not found: " + cmd);
        if (proc.timed_out || proc.wall_ms > timeout_ms)
            return {SolveResult::timeout, timeout_ms};

        const std::string token = detail::first_token(proc.output);
        if (token == "sat") return {SolveResult::sat, proc.wall_ms};
        if (token == "unsat") return {SolveResult::unsat, proc.wall_ms};
        if (token == "unknown" && proc.exit_code == 0)
            return {SolveResult::unknown, proc.wall_ms};
        return {SolveResult::error, proc.wall_ms};
    }

  private:
    void check_binary() const {
        const std::string binary = detail::first_token(template_);
        if (binary.empty()) throw ConfigError("empty solver command template");
        if (binary.find('/') != std::string::npos) {
            if (::access(binary.c_str(), X_OK) != 0)
                throw BackendUnavailableError("solver binary missing: " + binary);
            return;
        }
        const char* path_env = std::getenv("PATH");
        std::string path = path_env != nullptr ? path_env : "";
        std::size_t pos = 0;
        while (pos <= path.size()) {
            const std::size_t colon = path.find(':', pos);
            const std::string dir =
                path.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos);
            if (!dir.empty() &&
                ::access((dir + "/" + binary).c_str(), X_OK) == 0)
                return;
            if (colon == std::string::npos) break;
            pos = colon + 1;
        }
        throw BackendUnavailableError("solver binary missing from PATH: " + binary);
    }

    std::string template_;
    std::uint64_t seed_;
    std::filesystem::path work_dir_;
    std::int64_t grace_ms_;
    std::atomic<std::uint64_t> counter_{0};
};

}  // namespace stratsynth
