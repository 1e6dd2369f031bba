#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pw {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Error categories surfaced through the CLI as machine-readable codes.
enum class Errc {
    dimension_mismatch,
    validation,
    parse,
    resource,
    trapped_states,
    io,
    usage,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message, int line = -1, int column = -1)
        : std::runtime_error(std::move(message)), code(code), line(line), column(column) {}

    Errc code;
    int line;    // 1-based source line for parse errors, -1 otherwise
    int column;  // 1-based column, -1 if unknown
};

[[noreturn]] inline void fail(Errc code, const std::string& message, int line = -1, int column = -1) {
    throw Error(code, message, line, column);
}

inline void require(bool ok, Errc code, const std::string& message) {
    if (!ok) fail(code, message);
}

std::string rational_str(const Rational& r);

}  // namespace pw
