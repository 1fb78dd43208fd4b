#pragma once

#include "schurcut/error.hpp"
#include "schurcut/generators.hpp"
#include "schurcut/graph.hpp"
#include "schurcut/io.hpp"
#include "schurcut/oracle.hpp"
#include "schurcut/schur.hpp"
#include "schurcut/spectral.hpp"
#include "schurcut/sweepcut.hpp"
