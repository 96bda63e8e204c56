#pragma once

#include <iosfwd>
#include <string>

#include "dsfm/submodular.hpp"

namespace dsfm {

// Line-oriented text format for instances:
//
//   dsfm-instance 1
//   n <ground set size>
//   r <potential count>
//   unary <id> <delta>
//   edge <u> <v> <weight>
//   square <p00> <p01> <p10> <p11> <scale>
//   region <k> <id...>
//   table <k> <id...> <value for each of the 2^k support masks>
//
// Exactly r record lines follow the header; blank lines and lines starting
// with '#' are skipped anywhere. Table values are indexed by bitmask over
// the ids as listed (bit j <-> j-th id). Floats carry 17 significant digits
// so the canonical form round-trips bit-exactly: read(write(inst)) equals
// inst and serializes to the same bytes.
//
// Reading validates ids and rejects non-submodular tables of arity <= 12
// with an explicit witness pair. Parse errors name the offending line.

DecomposableInstance read_instance(std::istream& in);
DecomposableInstance load_instance(const std::string& path);

// Fails with a capability error on opaque function potentials; every other
// kind has a record form.
void write_instance(std::ostream& out, const DecomposableInstance& inst);
void save_instance(const std::string& path, const DecomposableInstance& inst);

// 17 significant digits (trailing zeros stripped); parses back to the same
// double.
std::string format_float(double x);

}  // namespace dsfm
