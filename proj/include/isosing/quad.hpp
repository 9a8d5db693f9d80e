#pragma once

// Quadruple precision scalar used to verify externally supplied graph jets,
// where the terms of the equation can exceed the residual by 20 orders.

#include <quadmath.h>

namespace isosing {

using Quad = __float128;

inline Quad exp(Quad a) { return expq(a); }
inline Quad log(Quad a) { return logq(a); }
inline Quad sin(Quad a) { return sinq(a); }
inline Quad cos(Quad a) { return cosq(a); }
inline Quad sinh(Quad a) { return sinhq(a); }
inline Quad cosh(Quad a) { return coshq(a); }
inline Quad sqrt(Quad a) { return sqrtq(a); }
inline Quad pow(Quad a, Quad b) { return powq(a, b); }
inline Quad floor(Quad a) { return floorq(a); }
inline Quad abs(Quad a) { return fabsq(a); }

inline Quad constant_like(Quad, double value) { return value; }
inline Quad min_leading(Quad a) { return a; }
inline bool any_zero_leading(Quad a) { return a == 0; }

}  // namespace isosing
