#pragma once

#include "xshred/bench.hpp"
#include "xshred/dom.hpp"
#include "xshred/dtd.hpp"
#include "xshred/dtd_graph.hpp"
#include "xshred/emit.hpp"
#include "xshred/errors.hpp"
#include "xshred/generator.hpp"
#include "xshred/schema.hpp"
#include "xshred/shred.hpp"
