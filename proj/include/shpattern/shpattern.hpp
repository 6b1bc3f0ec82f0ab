//==============================================================================
// shpattern.hpp
// Convenience umbrella: pulls in the whole library.
//==============================================================================
#pragma once

#include "shpattern/ansatz.hpp"
#include "shpattern/config.hpp"
#include "shpattern/errors.hpp"
#include "shpattern/gl_solver.hpp"
#include "shpattern/grid.hpp"
#include "shpattern/harness.hpp"
#include "shpattern/io.hpp"
#include "shpattern/noise.hpp"
#include "shpattern/ou_process.hpp"
#include "shpattern/rng.hpp"
#include "shpattern/sh_solver.hpp"
#include "shpattern/spectral.hpp"
