#ifndef CSTSSOS_CSTSSOS_HPP
#define CSTSSOS_CSTSSOS_HPP

#include "cstssos/exponent.hpp"
#include "cstssos/polynomial.hpp"
#include "cstssos/pop.hpp"
#include "cstssos/chordal.hpp"
#include "cstssos/sign_symmetry.hpp"
#include "cstssos/sparsity.hpp"
#include "cstssos/relax.hpp"
#include "cstssos/sdp.hpp"
#include "cstssos/sdpa.hpp"
#include "cstssos/certificate.hpp"
#include "cstssos/extract.hpp"
#include "cstssos/bench.hpp"

#endif  // CSTSSOS_CSTSSOS_HPP
