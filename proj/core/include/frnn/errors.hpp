#ifndef FRNN_ERRORS_HPP
#define FRNN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace frnn {

/// Malformed or unreadable input data (KEEL files, CSV, config, result matrices).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A relation cannot be constructed on the given training data, e.g. a
/// singular covariance matrix for the Mahalanobis relation. Benchmark runs
/// record this condition as a missing cell rather than aborting.
class RelationUndefinedError : public std::runtime_error {
public:
    explicit RelationUndefinedError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace frnn

#endif
