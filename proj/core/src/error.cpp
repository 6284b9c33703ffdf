#include "fyi/error.hpp"

namespace fyi {

const char* errc_name(errc code) {
    switch (code) {
    case errc::non_finite: return "NonFinite";
    case errc::non_positive_scale: return "NonPositiveScale";
    case errc::behind_camera: return "BehindCamera";
    case errc::fully_behind_camera: return "FullyBehindCamera";
    case errc::empty_text: return "EmptyText";
    case errc::empty_repository: return "EmptyRepository";
    case errc::unresolvable_asset: return "UnresolvableAsset";
    case errc::out_of_extent: return "OutOfExtent";
    case errc::no_free_region: return "NoFreeRegion";
    case errc::unknown_instance: return "UnknownInstance";
    case errc::unknown_actor: return "UnknownActor";
    case errc::unknown_role: return "UnknownRole";
    case errc::no_verdicts: return "NoVerdicts";
    case errc::too_few_frames: return "TooFewFrames";
    case errc::too_many_instances: return "TooManyInstances";
    case errc::schema_error: return "SchemaError";
    case errc::transport_error: return "TransportError";
    case errc::timeout: return "Timeout";
    case errc::budget_exhausted: return "BudgetExhausted";
    case errc::config_error: return "ConfigError";
    }
    return "UnknownError";
}

} // namespace fyi
