#pragma once

#include <iosfwd>

#include "icltemp/attention.hpp"

namespace icltemp {

// Plain-text format, one block per field:
//   d <dim>
//   tau <value>
//   v22 <value>
//   M11 <rows> <cols>
//   <row-major values, one row per line>
//   m21 <len>
//   <values on one line>
//   v21 <len>
//   <values on one line>
// Values are written with shortest round-trip precision.
void write_params_text(const AttentionParams& params, std::ostream& out);

AttentionParams read_params_text(std::istream& in);

}  // namespace icltemp
