#ifndef CSPIN_CSPIN_HPP
#define CSPIN_CSPIN_HPP

#include "errors.hpp"
#include "model.hpp"
#include "quad.hpp"
#include "observables.hpp"
#include "ed.hpp"
#include "io.hpp"
#include "svg.hpp"
#include "sweep.hpp"

#endif
