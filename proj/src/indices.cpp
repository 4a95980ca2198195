#include "oscme/indices.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace oscme {

int QuantumTriple::operator[](int axis) const {
  switch (axis) {
  case 0:
    return nx;
  case 1:
    return ny;
  case 2:
    return nz;
  default:
    throw std::out_of_range("QuantumTriple: axis must be 0, 1 or 2");
  }
}

int &QuantumTriple::operator[](int axis) {
  switch (axis) {
  case 0:
    return nx;
  case 1:
    return ny;
  case 2:
    return nz;
  default:
    throw std::out_of_range("QuantumTriple: axis must be 0, 1 or 2");
  }
}

std::array<int, 12> ElementKey::flat() const {
  std::array<int, 12> v{};
  for (int p = 0; p < 4; ++p)
    for (int ax = 0; ax < 3; ++ax)
      v[static_cast<std::size_t>(3 * p + ax)] = orbital[static_cast<std::size_t>(p)][ax];
  return v;
}

ElementKey ElementKey::from_flat(const std::array<int, 12> &v) {
  ElementKey k;
  for (int p = 0; p < 4; ++p)
    for (int ax = 0; ax < 3; ++ax)
      k.orbital[static_cast<std::size_t>(p)][ax] = v[static_cast<std::size_t>(3 * p + ax)];
  return k;
}

int ElementKey::max_index() const {
  int m = 0;
  for (const auto &t : orbital)
    m = std::max({m, t.nx, t.ny, t.nz});
  return m;
}

std::string ElementKey::str() const {
  std::ostringstream os;
  for (const auto &t : orbital)
    os << '(' << t.nx << ',' << t.ny << ',' << t.nz << ')';
  return os.str();
}

AxisPair axis_pair(int a, int b) {
  if (a < 0 || b < 0)
    throw std::invalid_argument("axis_pair: quantum numbers must be non-negative");
  return {std::min(a, b), std::max(a, b)};
}

AxisPair axis_pair(const ElementKey &key, Axis axis, ParticlePair pair) {
  const int ax = static_cast<int>(axis);
  if (pair == ParticlePair::P14)
    return axis_pair(key[0][ax], key[3][ax]);
  return axis_pair(key[1][ax], key[2][ax]);
}

int SelectionResult::s_total() const {
  if (!pass())
    throw std::logic_error("SelectionResult: s_total undefined when the rule fails");
  return *s[0] + *s[1] + *s[2];
}

std::string SelectionResult::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < 3; ++i) {
    if (i)
      os << ',';
    if (s[static_cast<std::size_t>(i)])
      os << *s[static_cast<std::size_t>(i)];
    else
      os << '-';
  }
  os << ')';
  return os.str();
}

SelectionResult selection_rule(const ElementKey &key) {
  SelectionResult r;
  for (int ax = 0; ax < 3; ++ax) {
    const AxisPair p14 = axis_pair(key, static_cast<Axis>(ax), ParticlePair::P14);
    const AxisPair p23 = axis_pair(key, static_cast<Axis>(ax), ParticlePair::P23);
    const int d = p14.diff() + p23.diff();
    if (d % 2 == 0)
      r.s[static_cast<std::size_t>(ax)] = d / 2;
  }
  return r;
}

std::array<ElementKey, 8> symmetry_images(const ElementKey &key) {
  const auto img = [&key](bool swap14, bool swap23, bool exch) {
    ElementKey k = key;
    if (swap14)
      std::swap(k.orbital[0], k.orbital[3]);
    if (swap23)
      std::swap(k.orbital[1], k.orbital[2]);
    if (exch) {
      // (1,2,3,4) -> (2,1,4,3): relabel which particle each orbital acts on.
      ElementKey e;
      e.orbital = {k.orbital[1], k.orbital[0], k.orbital[3], k.orbital[2]};
      k = e;
    }
    return k;
  };
  return {img(false, false, false), img(true, false, false),
          img(false, true, false),  img(true, true, false),
          img(false, false, true),  img(true, false, true),
          img(false, true, true),   img(true, true, true)};
}

CanonicalKey canonical_key(const ElementKey &key) {
  const auto images = symmetry_images(key);
  ElementKey best = images[0];
  for (const auto &k : images)
    best = std::min(best, k);
  int distinct = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < i; ++j)
      if (images[j] == images[i]) {
        seen = true;
        break;
      }
    if (!seen)
      ++distinct;
  }
  return {best, distinct};
}

} // namespace oscme
