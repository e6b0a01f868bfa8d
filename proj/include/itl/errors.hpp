#pragma once

#include <stdexcept>
#include <string>

namespace itl {

// Stable failure codes; one per rejectable condition across the library.
enum class Errc {
    MissingColumn,
    UnknownCategory,
    NonNumericValue,
    EmptyFile,
    EmptyDataset,
    SchemaMismatch,
    DimensionMismatch,
    KTooLarge,
    EmptyData,
    SingleCluster,
    NoClusters,
    NonFiniteInput,
    TooFewInstances,
    ShapeMismatch,
    UntrainedNet,
    AllZeroWeights,
    SingularSystem,
    SingleClassData,
    LengthMismatch,
    ZeroPerturbation,
    InvalidSpec,
    InvalidConfig,
    IoError,
    StageFailure,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace itl
