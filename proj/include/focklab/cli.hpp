#pragma once

#include <string>
#include <vector>

#include "focklab/fock.hpp"

namespace focklab::cli {

/// Entry point behind the focklab binary. args excludes the program name.
/// Exit codes: 0 success, 2 argument/validation errors, 1 runtime failures.
int run(const std::vector<std::string>& args);

/// Symbol mini-grammar, ';'-joined items:
///   delta@RE[+IMi][*COEFF]        point mass (weighted convention)
///   ddelta[a,b]@RE[+IMi][*COEFF]  derivative atom d_z^a d_zbar^b
///   polygauss:A,B,S,COEFF         COEFF z^A zbar^B e^{-S|z|^2} (shared S)
///   radial:gauss:S                radial profile e^{-S r^2}
///   dbar-of:polygauss:...         Wirtinger dbar of the given function
///   zero                          the zero symbol
/// COEFF and the point are complex literals: RE, REiIM forms like 1.5,
/// -0.3+0.25i, 2i.
Symbol parse_symbol(const std::string& spec, bool weighted = true);

/// Round-trippable grammar rendering of closed-form symbols.
std::string format_symbol(const Symbol& symbol);

cplx parse_complex(const std::string& text);

} // namespace focklab::cli
