#ifndef FRACLAP_FRACLAP_HPP
#define FRACLAP_FRACLAP_HPP

#include "fraclap/barrier.hpp"
#include "fraclap/baselines.hpp"
#include "fraclap/bilevel.hpp"
#include "fraclap/decompose.hpp"
#include "fraclap/denoise.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/fft.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/metrics.hpp"
#include "fraclap/pgm.hpp"
#include "fraclap/spectral.hpp"

#endif  // FRACLAP_FRACLAP_HPP
