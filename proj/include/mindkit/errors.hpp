#pragma once

#include <stdexcept>
#include <string>

namespace mindkit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// core
struct MalformedSequence : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct NotFound : Error { using Error::Error; };

// synthgen
struct InfeasibleConfig : Error { using Error::Error; };
struct CorpusTooSmall : Error { using Error::Error; };

// render
struct EngineFailure : Error { using Error::Error; };
struct EngineTimeout : Error { using Error::Error; };
struct OutOfBounds : Error { using Error::Error; };

// ingest
struct NoRootTopic : Error { using Error::Error; };
struct StructureError : Error { using Error::Error; };

// taskgen
struct NoEligibleNode : Error { using Error::Error; };
struct MissingGeometry : Error { using Error::Error; };
struct InsufficientMaps : Error { using Error::Error; };

// eval
struct UnknownId : Error { using Error::Error; };

struct IoError : Error { using Error::Error; };

} // namespace mindkit
