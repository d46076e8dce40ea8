#ifndef RICCATI_HJB_ERRORS_HPP
#define RICCATI_HJB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace riccati {

/// Malformed or inconsistent user input: CSV data, config documents, model parameters.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to deliver a result it is contractually bound to deliver.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace riccati

#endif
