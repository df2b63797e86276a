#pragma once

#include "ama.hpp"
#include "ansatz.hpp"
#include "bench.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "graphs.hpp"
#include "optimizer.hpp"
#include "random.hpp"
#include "serialize.hpp"
#include "statevector.hpp"
