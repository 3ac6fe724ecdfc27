#pragma once

#include <stdexcept>
#include <string>

namespace adelic {

// Domain error codes. The names double as the diagnostic identifiers the
// CLI prints and the C API exposes, so keep them stable.
enum class Errc {
    PlaceMismatch,
    DivisionByZeroToPrecision,
    PrecisionExhausted,
    NotASimpleRoot,
    NoRootInResidueField,
    ZeroResidue,
    InsufficientPrecision,
    NotPrime,
    ZeroElement,
    NonIntegralIdeal,
    UnsupportedField,
    FieldMismatch,
    NonPrincipalFinitePart,
    PlaceFieldMismatch,
    SingularToPrecision,
    ShapeMismatch,
    NotInvertible,
    UnsupportedPlace,
    SearchSpaceTooLarge,
    BudgetExceeded,
    ParseError,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::PlaceMismatch: return "PlaceMismatch";
        case Errc::DivisionByZeroToPrecision: return "DivisionByZeroToPrecision";
        case Errc::PrecisionExhausted: return "PrecisionExhausted";
        case Errc::NotASimpleRoot: return "NotASimpleRoot";
        case Errc::NoRootInResidueField: return "NoRootInResidueField";
        case Errc::ZeroResidue: return "ZeroResidue";
        case Errc::InsufficientPrecision: return "InsufficientPrecision";
        case Errc::NotPrime: return "NotPrime";
        case Errc::ZeroElement: return "ZeroElement";
        case Errc::NonIntegralIdeal: return "NonIntegralIdeal";
        case Errc::UnsupportedField: return "UnsupportedField";
        case Errc::FieldMismatch: return "FieldMismatch";
        case Errc::NonPrincipalFinitePart: return "NonPrincipalFinitePart";
        case Errc::PlaceFieldMismatch: return "PlaceFieldMismatch";
        case Errc::SingularToPrecision: return "SingularToPrecision";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::NotInvertible: return "NotInvertible";
        case Errc::UnsupportedPlace: return "UnsupportedPlace";
        case Errc::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
        case Errc::BudgetExceeded: return "BudgetExceeded";
        case Errc::ParseError: return "ParseError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

    Errc code() const { return code_; }
    const char* name() const { return errc_name(code_); }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& detail) {
    throw Error(code, detail);
}

} // namespace adelic
