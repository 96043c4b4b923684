#include "matchflow/error.hpp"

namespace matchflow {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::ImputationImpossible: return "imputation-impossible";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::DegenerateLabels: return "degenerate-labels";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::UndefinedRoc: return "undefined-roc";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Conflict: return "conflict";
    case ErrorKind::MissingRandomIndex: return "missing-random-index";
    case ErrorKind::UndefinedSimilarity: return "undefined-similarity";
    case ErrorKind::SingularDesign: return "singular-design";
    case ErrorKind::UnknownName: return "unknown-name";
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::Config: return "config";
    }
    return "unknown";
}

} // namespace matchflow
