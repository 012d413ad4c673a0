#pragma once

#include <iosfwd>
#include <string>
#include <utility>

#include "tvbound/product.hpp"

namespace tvbound {

/// Plain-text kernel table format (one chain per file):
///
///   states K
///   initial p_0 ... p_{K-1}
///   step 1 markov
///   <K lines of K probabilities each>
///   step 2 full
///   <one line of K probabilities per history tuple, row-major order>
///   ...
///
/// Steps must appear as 1, 2, ... in order; markov blocks have one line per
/// state, full blocks one line per history (x_0, ..., x_{i-1}) enumerated
/// row-major over the canonical atom orders. Blank lines and lines starting
/// with '#' are ignored. A horizon-0 file stops after the initial line.
///
/// Parse errors carry the file name (or stream label) and line number, and
/// name the offending step and row.
KernelSequence load_kernel_sequence(const std::string& path);
KernelSequence load_kernel_sequence(std::istream& in, const std::string& label);

/// Loads the nominal and perturbed chains of one experiment and checks that
/// they are comparable (same state count and horizon).
std::pair<KernelSequence, KernelSequence> load_table_chain(
    const std::string& nominal_path, const std::string& perturbed_path);

/// Writes a sequence in the table format (17 significant digits, lossless).
void save_kernel_sequence(const KernelSequence& sequence,
                          const std::string& path);

}  // namespace tvbound
