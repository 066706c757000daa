#pragma once

#include "matplane/lattice.hpp"
#include "matplane/parallel.hpp"

namespace matplane {

template <class Fn>
RealField sample_field(const LatticeGeometry& g, Fn&& fn) {
  RealField out(g);
  parallel_for(g.size(), [&](std::size_t i) {
    Mat x(g.n(), g.m());
    g.point_into(i, x);
    out.data[i] = fn(x);
  });
  return out;
}

}  // namespace matplane
