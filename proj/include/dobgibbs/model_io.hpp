#pragma once
#include <string>

#include "dobgibbs/models.hpp"

namespace dobgibbs {

// Line-oriented model grammar: one `key value...` pair per line, `#` starts a
// comment.  Keys: kind, n_sites, beta, edges, field, A, sigma, alphabet,
// potential_table.  Unknown, duplicate, missing, or malformed keys raise
// ConfigError naming the offending key.
//
//   kind ising|gaussian|free|potential
//   edges            flat triples "i j J" with 1-based sites (ising)
//   field            N reals: ising external field / gaussian offsets;
//                    arity 1 for a free gaussian site law (its mean)
//   A                N*N row-major mean coefficients (gaussian)
//   sigma            N reals (gaussian); arity 1 for a free gaussian law
//   alphabet         symbols per site (potential, free finite)
//   potential_table  A^N energies, site 1 most significant (potential);
//                    A single-site energies for a free finite law
ConditionalModel parse_model_text(const std::string& text);
ConditionalModel parse_model_file(const std::string& path);

// Canonical text round-trip of a model (17-digit numerics).
std::string serialize_model(const ConditionalModel& m);

}  // namespace dobgibbs
