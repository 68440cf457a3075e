#include "wassinc/errors.hpp"

#include <fmt/format.h>

namespace wassinc {

BlowUpError::BlowUpError(std::size_t step, double time)
    : std::runtime_error(fmt::format(
          "non-finite particle coordinate produced at step {} (t = {})", step,
          time)),
      step_(step),
      time_(time) {}

}  // namespace wassinc
