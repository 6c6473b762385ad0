/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "epdlab/epd_solver.hpp"
#include "epdlab/exponents.hpp"
#include "epdlab/test_functions.hpp"

namespace epdlab::cli {

/// Configuration problems (unknown key, bad value, violated invariant).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct TestFunctionSettings {
    testfn::LambdaQuadSpec lambda_quad;
    testfn::AngleQuadSpec angle_quad;
    double special_rel_tol = 1e-10;
    testfn::BqCacheSpec cache;
};

struct RunConfig {
    ModelParams model;
    solver::GridSpec grid;
    TestFunctionSettings testfn;
    std::string output_dir = "epdlab_out";
    std::vector<double> emit_snapshots;
    double snapshot_spacing = 0.05;  ///< time between stored snapshots for functionals

    /// Resolution bookkeeping: p and r_max default to derived values.
    bool p_given = false;
    bool r_max_given = false;

    testfn::TestFunctionParams test_function_params() const;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses "key = value" lines; '#' starts a comment.
KeyValues parse_key_values(const std::string& text);

/// Applies file entries, then overrides, on top of the defaults and resolves
/// derived values. Throws ConfigError.
RunConfig parse_config(const KeyValues& file_entries, const KeyValues& overrides = {});

/// Reads a config file and resolves it with the overrides.
RunConfig load_config(const std::string& path, const KeyValues& overrides = {});

/// Every key with its resolved value, one per line, numbers at 17 digits.
std::string write_config(const RunConfig& config);

/// Formats a double with 17 significant digits.
std::string fmt(double x);

/// Full command-line entry point. Returns the process exit status:
/// 0 success, 2 configuration error, 3 numeric failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kSchemaVersion = 1;

}  // namespace epdlab::cli
