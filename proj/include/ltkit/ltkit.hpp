#pragma once

#include <ltkit/errors.hpp>
#include <ltkit/padic.hpp>
#include <ltkit/series.hpp>
#include <ltkit/lubin_tate.hpp>
#include <ltkit/tower.hpp>
#include <ltkit/characters.hpp>
#include <ltkit/coates_wiles.hpp>
#include <ltkit/anticyclo.hpp>
#include <ltkit/hecke_lattices.hpp>
#include <ltkit/traces.hpp>
#include <ltkit/cohomology.hpp>
#include <ltkit/finite_ec.hpp>
#include <ltkit/modular.hpp>
