#pragma once

#include "sonc/banana.hpp"
#include "sonc/certificate.hpp"
#include "sonc/circuit.hpp"
#include "sonc/critical.hpp"
#include "sonc/decompose.hpp"
#include "sonc/error.hpp"
#include "sonc/json_io.hpp"
#include "sonc/lp.hpp"
#include "sonc/mediated.hpp"
#include "sonc/necessary.hpp"
#include "sonc/poly.hpp"
#include "sonc/polytope.hpp"
#include "sonc/verify.hpp"
