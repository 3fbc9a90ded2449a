#pragma once

#include "geonet/any_manifold.hpp"
#include "geonet/cycle.hpp"
#include "geonet/deformation.hpp"
#include "geonet/errors.hpp"
#include "geonet/experiment.hpp"
#include "geonet/geodesic.hpp"
#include "geonet/manifold.hpp"
#include "geonet/net.hpp"
#include "geonet/random.hpp"
#include "geonet/serialize.hpp"
#include "geonet/shorten.hpp"
#include "geonet/svg.hpp"
#include "geonet/sweepout.hpp"
