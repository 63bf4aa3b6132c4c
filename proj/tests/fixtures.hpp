#pragma once

// Reference specs shared by the test suite.  The 4-color spec was crafted so
// that the normalized spectrum is {1, 1/2, 1/2, -1/4} with the two 1/2's in
// a single chained block: det(xI - R) = (x-4)(x-2)^2(x+1), rank(R/4 - I/2)=3.

#include <urnlab/urn.hpp>

#include <initializer_list>

namespace urnlab::testing {

inline UrnSpec make_spec(std::initializer_list<std::initializer_list<double>> rows,
                         std::initializer_list<double> x0, const char* name = "") {
  UrnSpec u;
  u.initial = Vec<double>(x0);
  int s = u.colors();
  u.replacement = Mat<double>(s, s);
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) u.replacement(i, j++) = v;
    ++i;
  }
  u.name = name;
  return u;
}

inline UrnSpec strictly_small2() { return make_spec({{2, 1}, {1, 2}}, {1, 1}, "strictly_small2"); }
inline UrnSpec critically_small2() { return make_spec({{3, 1}, {1, 3}}, {1, 1}, "critically_small2"); }
inline UrnSpec large2() { return make_spec({{4, 1}, {1, 4}}, {1, 1}, "large2"); }
inline UrnSpec negdiag2() { return make_spec({{-1, 2}, {1, 0}}, {2, 1}, "negdiag2"); }
inline UrnSpec critical_jordan4() {
  return make_spec({{0, 0, 1, 3}, {1, 2, 1, 0}, {1, 0, 3, 0}, {1, 1, 0, 2}}, {1, 1, 1, 1},
                   "critical_jordan4");
}

}  // namespace urnlab::testing
