#ifndef CSPIN_ERRORS_HPP
#define CSPIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cspin {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DuplicateCouplings : Error {
    using Error::Error;
};
struct NonPositiveCoupling : Error {
    using Error::Error;
};
struct UnsupportedShape : Error {
    using Error::Error;
};
struct ZeroField : Error {
    using Error::Error;
};
struct InvalidParams : Error {
    using Error::Error;
};

struct DegenerateSeed : Error {
    using Error::Error;
};
struct SingularJacobian : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    int iterations;
    double final_residual;
    NoConvergence(int iters, double res)
        : Error("Newton iteration failed to converge after " + std::to_string(iters) +
                " iterations (residual " + std::to_string(res) + ")"),
          iterations(iters), final_residual(res) {}
};

struct StepUnderflow : Error {
    double last_good_g;
    explicit StepUnderflow(double g)
        : Error("continuation step underflow near g = " + std::to_string(g) +
                " (suspected branch singularity or crossing)"),
          last_good_g(g) {}
};

struct ExtrapolationUnstable : Error {
    using Error::Error;
};

struct TooLarge : Error {
    using Error::Error;
};
struct InvalidDelta : Error {
    using Error::Error;
};
struct MatchFailure : Error {
    using Error::Error;
};

struct SchemaError : Error {
    using Error::Error;
};
struct ConfigValueError : Error {
    using Error::Error;
};

} // namespace cspin

#endif
