#ifndef ALEFEM_ALEFEM_HPP
#define ALEFEM_ALEFEM_HPP

#include "alefem/vec2.hpp"
#include "alefem/predicates.hpp"
#include "alefem/curve.hpp"
#include "alefem/triangulation.hpp"
#include "alefem/mesh.hpp"
#include "alefem/quadrature.hpp"
#include "alefem/fem.hpp"
#include "alefem/ale.hpp"
#include "alefem/assembly.hpp"
#include "alefem/sparse.hpp"
#include "alefem/saddle.hpp"
#include "alefem/schemes.hpp"
#include "alefem/benchmarks.hpp"
#include "alefem/io.hpp"
#include "alefem/config.hpp"
#include "alefem/runner.hpp"

#endif
