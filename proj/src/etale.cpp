#include "massey4/etale.hpp"

#include <sstream>

namespace massey4 {

namespace {

Int product_of(const std::vector<SquareClass>& gens, unsigned mask) {
  Int p = 1;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (mask >> i & 1u) p *= gens[i].rep();
  }
  return p;
}

struct MonomialImage {
  Rat coefficient;
  unsigned mask;
};

}  // namespace

struct EtaleAlgebra::Data {
  std::vector<SquareClass> generators;
  std::vector<Int> structure;  // dim * dim
  std::vector<EtaleComponent> components;
  std::vector<std::vector<MonomialImage>> component_images;  // [c][monomial]
  std::vector<EtaleAlgebra> component_fields;                 // empty when a field
};

EtaleAlgebra::EtaleAlgebra() : EtaleAlgebra(std::vector<SquareClass>{}) {}

EtaleAlgebra::EtaleAlgebra(std::vector<SquareClass> generators) {
  if (generators.size() > static_cast<std::size_t>(kMaxGenerators)) {
    throw MathError(ErrorKind::GeneratorLimitExceeded,
                    "at most " + std::to_string(kMaxGenerators) + " generators supported");
  }
  auto data = std::make_shared<Data>();
  data->generators = std::move(generators);
  const auto& gens = data->generators;
  const unsigned n = static_cast<unsigned>(gens.size());
  const unsigned dim = 1u << n;

  data->structure.resize(std::size_t{dim} * dim);
  for (unsigned i = 0; i < dim; ++i) {
    for (unsigned j = 0; j < dim; ++j) data->structure[i * dim + j] = product_of(gens, i & j);
  }

  // Pivot decomposition: a generator is dependent when its class is a product of earlier pivots.
  std::vector<int> pivots, dependents;
  std::vector<unsigned> dep_masks;
  std::vector<Rat> dep_scales;
  std::vector<SquareClass> pivot_classes;
  for (unsigned j = 0; j < n; ++j) {
    bool found = false;
    for (unsigned m = 0; m < (1u << pivots.size()) && !found; ++m) {
      SquareClass cls;
      for (std::size_t k = 0; k < pivots.size(); ++k) {
        if (m >> k & 1u) cls = cls * pivot_classes[k];
      }
      if (cls == gens[j]) {
        Int prod = 1;
        for (std::size_t k = 0; k < pivots.size(); ++k) {
          if (m >> k & 1u) prod *= pivot_classes[k].rep();
        }
        Rat ratio(gens[j].rep(), prod);
        ratio.canonicalize();
        dependents.push_back(static_cast<int>(j));
        dep_masks.push_back(m);
        dep_scales.push_back(*rational_sqrt(ratio));
        found = true;
      }
    }
    if (!found) {
      pivots.push_back(static_cast<int>(j));
      pivot_classes.push_back(gens[j]);
    }
  }

  const std::size_t ncomp = std::size_t{1} << dependents.size();
  for (std::size_t c = 0; c < ncomp; ++c) {
    EtaleComponent comp;
    comp.pivots = pivots;
    comp.dependents = dependents;
    comp.dependent_masks = dep_masks;
    comp.dependent_scales = dep_scales;
    for (std::size_t k = 0; k < dependents.size(); ++k) comp.signs.push_back((c >> k & 1u) ? -1 : 1);

    // Image of each root, then of each monomial.
    std::vector<MonomialImage> root_images(n);
    for (std::size_t k = 0; k < pivots.size(); ++k) root_images[pivots[k]] = {Rat(1), 1u << k};
    for (std::size_t k = 0; k < dependents.size(); ++k) {
      root_images[dependents[k]] = {Rat(comp.signs[k]) * dep_scales[k], dep_masks[k]};
    }
    std::vector<MonomialImage> images(dim);
    for (unsigned m = 0; m < dim; ++m) {
      MonomialImage acc{Rat(1), 0};
      for (unsigned i = 0; i < n; ++i) {
        if (!(m >> i & 1u)) continue;
        const auto& r = root_images[i];
        Int common = product_of(pivot_classes, acc.mask & r.mask);
        acc.coefficient *= r.coefficient * Rat(common);
        acc.mask ^= r.mask;
      }
      images[m] = acc;
    }
    data->components.push_back(std::move(comp));
    data->component_images.push_back(std::move(images));
  }
  if (ncomp > 1 || !dependents.empty()) {
    for (std::size_t c = 0; c < ncomp; ++c) data->component_fields.emplace_back(pivot_classes);
  }
  data_ = std::move(data);
}

int EtaleAlgebra::num_generators() const { return static_cast<int>(data_->generators.size()); }
const std::vector<SquareClass>& EtaleAlgebra::generators() const { return data_->generators; }
const SquareClass& EtaleAlgebra::generator(int i) const { return data_->generators.at(i); }

EtaleAlgebra EtaleAlgebra::prefix(int k) const {
  return EtaleAlgebra(std::vector<SquareClass>(data_->generators.begin(),
                                               data_->generators.begin() + k));
}

EtaleAlgebra EtaleAlgebra::adjoin(const SquareClass& t) const {
  auto gens = data_->generators;
  gens.push_back(t);
  return EtaleAlgebra(std::move(gens));
}

const Int& EtaleAlgebra::structure_coefficient(unsigned i, unsigned j) const {
  return data_->structure[i * dim() + j];
}

std::size_t EtaleAlgebra::num_components() const { return data_->components.size(); }
const EtaleComponent& EtaleAlgebra::component(std::size_t c) const { return data_->components.at(c); }

EtaleAlgebra EtaleAlgebra::component_field(std::size_t c) const {
  if (data_->component_fields.empty()) return *this;
  return data_->component_fields.at(c);
}

EtaleElement EtaleAlgebra::zero() const { return EtaleElement(*this, std::vector<Rat>(dim())); }
EtaleElement EtaleAlgebra::one() const { return scalar(1); }
EtaleElement EtaleAlgebra::scalar(const Rat& q) const { return monomial(0, q); }
EtaleElement EtaleAlgebra::root(int i) const { return monomial(1u << i, 1); }
EtaleElement EtaleAlgebra::monomial(unsigned mask, const Rat& coefficient) const {
  std::vector<Rat> c(dim());
  c.at(mask) = coefficient;
  return EtaleElement(*this, std::move(c));
}
EtaleElement EtaleAlgebra::from_coords(std::vector<Rat> coords) const {
  return EtaleElement(*this, std::move(coords));
}

std::string EtaleAlgebra::describe() const {
  std::ostringstream os;
  for (std::size_t c = 0; c < num_components(); ++c) {
    if (c) os << " x ";
    const auto& comp = component(c);
    if (comp.pivots.empty()) {
      os << "Q";
      continue;
    }
    os << "Q(";
    for (std::size_t k = 0; k < comp.pivots.size(); ++k) {
      if (k) os << ",";
      os << "sqrt(" << generator(comp.pivots[k]).str() << ")";
    }
    os << ")";
  }
  return os.str();
}

bool operator==(const EtaleAlgebra& a, const EtaleAlgebra& b) {
  return a.data_ == b.data_ || a.data_->generators == b.data_->generators;
}

// ---------------------------------------------------------------------------

EtaleElement::EtaleElement(EtaleAlgebra algebra, std::vector<Rat> coords)
    : algebra_(std::move(algebra)), coords_(std::move(coords)) {
  if (coords_.size() != algebra_.dim()) {
    throw MathError(ErrorKind::AlgebraMismatch, "coordinate vector has wrong length");
  }
}

bool EtaleElement::is_zero() const {
  for (const auto& c : coords_) {
    if (c != 0) return false;
  }
  return true;
}

bool EtaleElement::is_rational() const {
  for (std::size_t i = 1; i < coords_.size(); ++i) {
    if (coords_[i] != 0) return false;
  }
  return true;
}

bool EtaleElement::is_unit() const {
  for (std::size_t c = 0; c < algebra_.num_components(); ++c) {
    if (to_component(c).is_zero()) return false;
  }
  return true;
}

int EtaleElement::top_generator() const {
  int top = -1;
  for (std::size_t m = 0; m < coords_.size(); ++m) {
    if (coords_[m] == 0) continue;
    for (int i = algebra_.num_generators() - 1; i > top; --i) {
      if (m >> i & 1u) {
        top = i;
        break;
      }
    }
  }
  return top;
}

namespace {
void require_same(const EtaleElement& a, const EtaleElement& b) {
  if (a.algebra() != b.algebra()) {
    throw MathError(ErrorKind::AlgebraMismatch,
                    "elements of " + a.algebra().describe() + " and " + b.algebra().describe());
  }
}
}  // namespace

EtaleElement EtaleElement::operator+(const EtaleElement& o) const {
  require_same(*this, o);
  std::vector<Rat> c(coords_);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.coords_[i];
  return EtaleElement(algebra_, std::move(c));
}

EtaleElement EtaleElement::operator-(const EtaleElement& o) const {
  require_same(*this, o);
  std::vector<Rat> c(coords_);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.coords_[i];
  return EtaleElement(algebra_, std::move(c));
}

EtaleElement EtaleElement::operator-() const {
  std::vector<Rat> c(coords_);
  for (auto& x : c) x = -x;
  return EtaleElement(algebra_, std::move(c));
}

EtaleElement EtaleElement::operator*(const EtaleElement& o) const {
  require_same(*this, o);
  const unsigned dim = static_cast<unsigned>(coords_.size());
  std::vector<Rat> c(dim);
  for (unsigned i = 0; i < dim; ++i) {
    if (coords_[i] == 0) continue;
    for (unsigned j = 0; j < dim; ++j) {
      if (o.coords_[j] == 0) continue;
      c[i ^ j] += coords_[i] * o.coords_[j] * Rat(algebra_.structure_coefficient(i, j));
    }
  }
  return EtaleElement(algebra_, std::move(c));
}

EtaleElement EtaleElement::operator*(const Rat& q) const {
  std::vector<Rat> c(coords_);
  for (auto& x : c) x *= q;
  return EtaleElement(algebra_, std::move(c));
}

EtaleElement operator*(const Rat& q, const EtaleElement& x) { return x * q; }

EtaleElement EtaleElement::conj(int i) const {
  std::vector<Rat> c(coords_);
  for (std::size_t m = 0; m < c.size(); ++m) {
    if (m >> i & 1u) c[m] = -c[m];
  }
  return EtaleElement(algebra_, std::move(c));
}

EtaleElement EtaleElement::inverse() const {
  EtaleElement acc = *this;
  EtaleElement cofactor = algebra_.one();
  for (int i = 0; i < algebra_.num_generators(); ++i) {
    EtaleElement c = acc.conj(i);
    cofactor *= c;
    acc *= c;
  }
  const Rat n = acc.coords_[0];
  if (n == 0) throw MathError(ErrorKind::NotAUnit, str() + " is not invertible");
  return cofactor * Rat(1 / n);
}

EtaleElement EtaleElement::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  EtaleElement result = algebra_.one(), base = *this;
  while (e) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

EtaleElement EtaleElement::to_component(std::size_t c) const {
  const auto& images = algebra_.data_->component_images.at(c);
  EtaleAlgebra field = algebra_.component_field(c);
  std::vector<Rat> out(field.dim());
  for (std::size_t m = 0; m < coords_.size(); ++m) {
    if (coords_[m] == 0) continue;
    out[images[m].mask] += coords_[m] * images[m].coefficient;
  }
  return EtaleElement(field, std::move(out));
}

std::string EtaleElement::str() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t m = 0; m < coords_.size(); ++m) {
    if (coords_[m] == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << to_string(coords_[m]);
    for (int i = 0; i < algebra_.num_generators(); ++i) {
      if (m >> i & 1u) os << "*sqrt(" << algebra_.generator(i).str() << ")";
    }
  }
  if (first) os << "0";
  return os.str();
}

bool operator==(const EtaleElement& a, const EtaleElement& b) {
  return a.algebra_ == b.algebra_ && a.coords_ == b.coords_;
}

EtaleElement from_components(const EtaleAlgebra& algebra, const std::vector<EtaleElement>& parts) {
  if (parts.size() != algebra.num_components()) {
    throw MathError(ErrorKind::AlgebraMismatch, "wrong number of component parts");
  }
  EtaleElement result = algebra.zero();
  for (std::size_t c = 0; c < parts.size(); ++c) {
    const auto& comp = algebra.component(c);
    // lift the component coordinates along the pivot monomials
    std::vector<Rat> lifted(algebra.dim());
    for (std::size_t m = 0; m < parts[c].coords().size(); ++m) {
      unsigned big = 0;
      for (std::size_t k = 0; k < comp.pivots.size(); ++k) {
        if (m >> k & 1u) big |= 1u << comp.pivots[k];
      }
      lifted[big] = parts[c].coords()[m];
    }
    EtaleElement idem = algebra.one();
    for (std::size_t k = 0; k < comp.dependents.size(); ++k) {
      unsigned big_mask = 0;
      for (std::size_t q = 0; q < comp.pivots.size(); ++q) {
        if (comp.dependent_masks[k] >> q & 1u) big_mask |= 1u << comp.pivots[q];
      }
      // (s * x_mask)^{-1} = x_mask / (s * prod t_mask)
      Rat denom = comp.dependent_scales[k] * Rat(algebra.structure_coefficient(big_mask, big_mask));
      EtaleElement inv_mask = algebra.monomial(big_mask, Rat(1) / denom);
      EtaleElement term = algebra.root(comp.dependents[k]) * inv_mask * Rat(comp.signs[k]);
      idem *= (algebra.one() + term) * Rat(1, 2);
    }
    result += idem * EtaleElement(algebra, std::move(lifted));
  }
  return result;
}

EtaleElement restrict_to_prefix(const EtaleElement& x, int k) {
  EtaleAlgebra small = x.algebra().prefix(k);
  std::vector<Rat> c(small.dim());
  for (std::size_t m = 0; m < x.coords().size(); ++m) {
    if (m < c.size()) {
      c[m] = x.coords()[m];
    } else if (x.coords()[m] != 0) {
      throw MathError(ErrorKind::AlgebraMismatch, "element does not lie in the prefix subalgebra");
    }
  }
  return EtaleElement(small, std::move(c));
}

EtaleElement extend_from_prefix(const EtaleElement& x, const EtaleAlgebra& big) {
  const auto& g = x.algebra().generators();
  if (g.size() > big.generators().size() ||
      !std::equal(g.begin(), g.end(), big.generators().begin())) {
    throw MathError(ErrorKind::AlgebraMismatch, "not a prefix subalgebra");
  }
  std::vector<Rat> c(big.dim());
  std::copy(x.coords().begin(), x.coords().end(), c.begin());
  return EtaleElement(big, std::move(c));
}

EtaleElement norm(const EtaleElement& x, int k) {
  EtaleElement acc = x;
  for (int i = x.algebra().num_generators() - 1; i >= k; --i) acc = acc * acc.conj(i);
  return restrict_to_prefix(acc, k);
}

EtaleElement trace(const EtaleElement& x, int k) {
  EtaleElement acc = x;
  for (int i = x.algebra().num_generators() - 1; i >= k; --i) acc = acc + acc.conj(i);
  return restrict_to_prefix(acc, k);
}

Rat norm_to_q(const EtaleElement& x) { return norm(x, 0).coord(0); }

namespace {

// Square root inside a field given as a tower over its generators.
std::optional<EtaleElement> field_sqrt(const EtaleElement& x) {
  const EtaleAlgebra& alg = x.algebra();
  const int n = alg.num_generators();
  if (n == 0) {
    auto r = rational_sqrt(x.coord(0));
    if (!r) return std::nullopt;
    return alg.scalar(*r);
  }
  if (x.is_zero()) return alg.zero();
  const unsigned half = 1u << (n - 1);
  EtaleAlgebra lower = alg.prefix(n - 1);
  std::vector<Rat> cx(x.coords().begin(), x.coords().begin() + half);
  std::vector<Rat> cy(x.coords().begin() + half, x.coords().end());
  EtaleElement X(lower, cx), Y(lower, cy);
  const Rat t(alg.generator(n - 1).rep());
  auto combine = [&](const EtaleElement& u, const EtaleElement& v) {
    std::vector<Rat> c(u.coords());
    c.insert(c.end(), v.coords().begin(), v.coords().end());
    return EtaleElement(alg, std::move(c));
  };
  if (Y.is_zero()) {
    if (auto r = field_sqrt(X)) return combine(*r, lower.zero());
    if (auto r = field_sqrt(X * Rat(1 / t))) return combine(lower.zero(), *r);
    return std::nullopt;
  }
  auto n_root = field_sqrt(X * X - Y * Y * t);
  if (!n_root) return std::nullopt;
  for (int sign : {1, -1}) {
    EtaleElement u2 = (X + *n_root * Rat(sign)) * Rat(1, 2);
    if (u2.is_zero()) continue;
    auto u = field_sqrt(u2);
    if (!u) continue;
    EtaleElement v = Y * (*u * Rat(2)).inverse();
    EtaleElement cand = combine(*u, v);
    if (cand * cand == x) return cand;
  }
  return std::nullopt;
}

}  // namespace

SquareRootResult is_square_with_witness(const EtaleElement& x) {
  SquareRootResult out;
  out.is_square = true;
  std::vector<EtaleElement> parts;
  for (std::size_t c = 0; c < x.algebra().num_components(); ++c) {
    EtaleElement xc = x.to_component(c);
    if (xc.is_zero()) throw MathError(ErrorKind::NotAUnit, "square test needs a unit");
    auto r = field_sqrt(xc);
    out.component_is_square.push_back(r.has_value());
    out.component_roots.push_back(r);
    if (r) {
      parts.push_back(*r);
    } else {
      out.is_square = false;
    }
  }
  if (out.is_square) out.root = from_components(x.algebra(), parts);
  return out;
}

// ---------------------------------------------------------------------------

AlgebraMap::AlgebraMap(EtaleAlgebra source, EtaleAlgebra target, std::vector<Image> images)
    : source_(std::move(source)), target_(std::move(target)) {
  const int n = source_.num_generators();
  if (static_cast<int>(images.size()) != n) {
    throw MathError(ErrorKind::AlgebraMismatch, "one image per generator required");
  }
  for (int i = 0; i < n; ++i) {
    const Rat sq = images[i].coefficient * images[i].coefficient *
                   Rat(target_.structure_coefficient(images[i].mask, images[i].mask));
    if (sq != Rat(source_.generator(i).rep())) {
      throw MathError(ErrorKind::AlgebraMismatch, "image of a root does not square correctly");
    }
  }
  monomial_images_.resize(source_.dim());
  for (unsigned m = 0; m < source_.dim(); ++m) {
    Image acc{Rat(1), 0};
    for (int i = 0; i < n; ++i) {
      if (!(m >> i & 1u)) continue;
      acc.coefficient *= images[i].coefficient *
                         Rat(target_.structure_coefficient(acc.mask, images[i].mask));
      acc.mask ^= images[i].mask;
    }
    monomial_images_[m] = acc;
  }
}

AlgebraMap AlgebraMap::canonical(const EtaleAlgebra& source, const EtaleAlgebra& target) {
  std::vector<Image> images;
  for (int i = 0; i < source.num_generators(); ++i) {
    bool found = false;
    for (unsigned m = 0; m < target.dim() && !found; ++m) {
      const Int prod = target.structure_coefficient(m, m);
      if (squarefree_class(Rat(prod)) == source.generator(i)) {
        Rat ratio(source.generator(i).rep(), prod);
        ratio.canonicalize();
        images.push_back({*rational_sqrt(ratio), m});
        found = true;
      }
    }
    if (!found) {
      throw MathError(ErrorKind::AlgebraMismatch,
                      "generator " + source.generator(i).str() + " has no image in " +
                          target.describe());
    }
  }
  return AlgebraMap(source, target, std::move(images));
}

EtaleElement AlgebraMap::operator()(const EtaleElement& x) const {
  if (x.algebra() != source_) throw MathError(ErrorKind::AlgebraMismatch, "map source mismatch");
  std::vector<Rat> c(target_.dim());
  for (std::size_t m = 0; m < x.coords().size(); ++m) {
    if (x.coords()[m] == 0) continue;
    c[monomial_images_[m].mask] += x.coords()[m] * monomial_images_[m].coefficient;
  }
  return EtaleElement(target_, std::move(c));
}

EtaleAlgebra quadratic_algebra(const SquareClass& a) { return EtaleAlgebra({a}); }
EtaleAlgebra biquadratic_algebra(const SquareClass& a, const SquareClass& d) {
  return EtaleAlgebra({a, d});
}

}  // namespace massey4
