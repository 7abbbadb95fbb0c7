#pragma once

#include "pogc/checks.hpp"
#include "pogc/error.hpp"
#include "pogc/model_json.hpp"
#include "pogc/models.hpp"
#include "pogc/netlist.hpp"
#include "pogc/pipeline.hpp"
#include "pogc/pogir.hpp"
#include "pogc/random_netlist.hpp"
#include "pogc/reduce.hpp"
#include "pogc/render.hpp"
#include "pogc/sim.hpp"
#include "pogc/statespace.hpp"
#include "pogc/sym.hpp"
#include "pogc/topology.hpp"
