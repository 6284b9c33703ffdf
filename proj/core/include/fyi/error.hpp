#pragma once

#include <stdexcept>
#include <string>

namespace fyi {

// Every failure the engine can raise, one code per contract violation.
enum class errc {
    non_finite,
    non_positive_scale,
    behind_camera,
    fully_behind_camera,
    empty_text,
    empty_repository,
    unresolvable_asset,
    out_of_extent,
    no_free_region,
    unknown_instance,
    unknown_actor,
    unknown_role,
    no_verdicts,
    too_few_frames,
    too_many_instances,
    schema_error,
    transport_error,
    timeout,
    budget_exhausted,
    config_error,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    errc code() const { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) {
    throw Error(code, std::string(errc_name(code)) + ": " + what);
}

} // namespace fyi
