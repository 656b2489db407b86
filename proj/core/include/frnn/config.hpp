#ifndef FRNN_CONFIG_HPP
#define FRNN_CONFIG_HPP

#include <map>
#include <string>

#include "frnn/tuning.hpp"

namespace frnn {

/// Flat key-value config text: one `key = value` pair per line, `#` starts a
/// comment, blank lines ignored. Keys use section prefixes (gd., combo.).
/// Throws ParseError on malformed lines or duplicate keys.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Applies recognised keys onto the tuning configs:
///   gd.initial_gamma, gd.batch_size, gd.learning_rate, gd.max_iterations,
///   gd.precision, gd.seed, combo.folds, combo.candidates (comma-separated),
///   combo.seed.
/// Unknown keys and unparseable values throw ParseError.
void apply_config(const std::map<std::string, std::string>& config, GradientDescentConfig& gd,
                  ComboConfig& combo);

} // namespace frnn

#endif
