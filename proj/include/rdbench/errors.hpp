#pragma once

#include <stdexcept>
#include <string>

namespace rdbench {

// Base class for everything this library throws.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Preconditions violated by the caller (lengths, ranges, geometry).
struct invalid_input_error : error {
    using error::error;
};

// Correlation undefined: zero variance in an input (or in its ranks).
struct undefined_correlation_error : error {
    using error::error;
};

// Least-squares fit degenerate: zero variance in x.
struct degenerate_fit_error : error {
    using error::error;
};

// BD computation: the two curves share no quality (or log-rate) interval.
struct no_overlap_error : error {
    using error::error;
};

// BD computation: a curve collapses to fewer than 2 usable points.
struct degenerate_curve_error : error {
    using error::error;
};

// CSV / manifest parse failure; line is 1-based.
struct parse_error : error {
    parse_error(const std::string& msg, std::size_t line_no)
        : error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    std::size_t line;
};

// Bad or missing configuration (tool paths, schema, baseline variant).
struct config_error : error {
    using error::error;
};

// An external tool failed; carries the captured diagnostics.
struct job_error : error {
    job_error(const std::string& msg, std::string tool_output_)
        : error(msg), tool_output(std::move(tool_output_)) {}
    explicit job_error(const std::string& msg) : error(msg) {}
    std::string tool_output;
};

// Aggregation over an empty slice.
struct invalid_slice_error : invalid_input_error {
    using invalid_input_error::invalid_input_error;
};

}  // namespace rdbench
