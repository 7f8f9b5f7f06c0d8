#include "fiberscope/schrodinger.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fiberscope/errors.hpp"

namespace fiberscope {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGridSlack = 1e-9;

double dot(const std::vector<double>& u, const std::vector<double>& v) {
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) acc += u[k] * v[k];
  return acc;
}

void require_same_dim(const GroupElement& g, const GroupElement& h) {
  if (g.x.size() != h.x.size() || g.y.size() != h.y.size() || g.x.size() != g.y.size())
    throw ShapeError("group elements of different dimension");
}

}  // namespace

GroupElement GroupElement::identity(int d) {
  return {std::vector<double>(static_cast<std::size_t>(d), 0.0),
          std::vector<double>(static_cast<std::size_t>(d), 0.0), 0.0};
}

GroupElement GroupElement::central(int d, double w) {
  auto g = identity(d);
  g.w = w;
  return g;
}

GroupElement GroupElement::inverse() const {
  GroupElement out = *this;
  for (auto& v : out.x) v = -v;
  for (auto& v : out.y) v = -v;
  out.w = -w + dot(x, y);
  return out;
}

GroupElement group_multiply(const GroupElement& g, const GroupElement& h) {
  require_same_dim(g, h);
  GroupElement out = g;
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    out.x[k] += h.x[k];
    out.y[k] += h.y[k];
  }
  out.w = g.w + h.w + dot(g.x, h.y);
  return out;
}

RepGrid::RepGrid(int d, std::size_t points_per_axis, double window)
    : d_(d), points_per_axis_(points_per_axis), window_(window) {
  if (d < 1) throw InvalidConfig("representation grid needs d >= 1");
  if (points_per_axis == 0) throw InvalidConfig("representation grid needs M >= 1");
  if (!(window > 0.0) || !std::isfinite(window)) throw InvalidConfig("window length L must be positive");
  dimension_ = 1;
  for (int k = 0; k < d; ++k) dimension_ *= points_per_axis;
}

bool RepGrid::on_grid(double amount) const {
  const double ratio = amount / step();
  return std::abs(ratio - std::round(ratio)) <= kGridSlack * std::max(1.0, std::abs(ratio));
}

long RepGrid::shift_steps(double amount) const {
  if (!on_grid(amount))
    throw GridMismatch("translation " + std::to_string(amount) + " is not a multiple of the grid step " +
                       std::to_string(step()));
  return std::lround(amount / step());
}

RepOperator::RepOperator(double lambda, const GroupElement& g, const RepGrid& grid) {
  if (g.dim() != grid.d()) throw ShapeError("group element dimension does not match the grid");
  const std::size_t M = grid.points_per_axis();
  const auto Ml = static_cast<long>(M);
  std::vector<long> shift(static_cast<std::size_t>(grid.d()));
  for (int k = 0; k < grid.d(); ++k) shift[static_cast<std::size_t>(k)] = grid.shift_steps(g.x[static_cast<std::size_t>(k)]);

  const std::size_t dim = grid.dimension();
  phase_.resize(dim);
  source_.resize(dim);
  const Complex central = std::polar(1.0, kTwoPi * lambda * g.w);
  // Multi-index with axis 0 most significant.
  for (std::size_t row = 0; row < dim; ++row) {
    std::size_t rest = row;
    std::size_t source = 0;
    std::size_t stride = 1;
    double angle = 0.0;
    for (int k = grid.d() - 1; k >= 0; --k) {
      const auto m = static_cast<long>(rest % M);
      rest /= M;
      angle += -kTwoPi * lambda * g.y[static_cast<std::size_t>(k)] * grid.sample(static_cast<std::size_t>(m));
      const long src = ((m - shift[static_cast<std::size_t>(k)]) % Ml + Ml) % Ml;
      source += static_cast<std::size_t>(src) * stride;
      stride *= M;
    }
    phase_[row] = central * std::polar(1.0, angle);
    source_[row] = source;
  }
}

CMatrix RepOperator::matrix() const {
  const auto dim = static_cast<Eigen::Index>(phase_.size());
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Eigen::Index row = 0; row < dim; ++row)
    out(row, static_cast<Eigen::Index>(source_[static_cast<std::size_t>(row)])) = phase_[static_cast<std::size_t>(row)];
  return out;
}

CMatrix RepOperator::apply_left(const CMatrix& block) const {
  if (static_cast<std::size_t>(block.rows()) != phase_.size())
    throw ShapeError("block row count does not match the representation dimension");
  CMatrix out(block.rows(), block.cols());
  for (std::size_t row = 0; row < phase_.size(); ++row)
    out.row(static_cast<Eigen::Index>(row)) =
        phase_[row] * block.row(static_cast<Eigen::Index>(source_[row]));
  return out;
}

CMatrix rep_matrix(double lambda, const GroupElement& g, const RepGrid& grid) {
  return RepOperator(lambda, g, grid).matrix();
}

double pfaffian_weight(double sigma, int d) {
  if (sigma == 0.0) throw CrossSectionViolation("Pfaffian weight requested at sigma = 0");
  if (d < 1) throw InvalidConfig("Heisenberg dimension d must be >= 1");
  return std::pow(std::abs(sigma), 0.5 * d);
}

GammaSet::GammaSet(double a, double b, std::vector<IndexPair> pairs)
    : a_(a), b_(b), pairs_(std::move(pairs)) {}

GammaSet GammaSet::trivial(int d) {
  return GammaSet(1.0, 1.0,
                  {{std::vector<int>(static_cast<std::size_t>(d), 0), std::vector<int>(static_cast<std::size_t>(d), 0)}});
}

int GammaSet::d() const { return pairs_.empty() ? 0 : static_cast<int>(pairs_.front().first.size()); }

GroupElement GammaSet::element(std::size_t i) const {
  const auto& [m, n] = pairs_.at(i);
  GroupElement g;
  g.x.reserve(m.size());
  g.y.reserve(n.size());
  for (const int v : m) g.x.push_back(a_ * v);
  for (const int v : n) g.y.push_back(b_ * v);
  return g;
}

std::vector<GroupElement> GammaSet::elements() const {
  std::vector<GroupElement> out;
  out.reserve(pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i) out.push_back(element(i));
  return out;
}

void GammaSet::validate() const {
  if (!(std::isfinite(a_) && std::isfinite(b_)) || a_ == 0.0 || b_ == 0.0)
    throw InvalidConfig("gamma scales a and b must be finite and nonzero");
  const double ab = a_ * b_;
  if (std::abs(ab - std::round(ab)) > 1e-9 * std::max(1.0, std::abs(ab))) throw InvalidConfig("a*b not integer");
  if (pairs_.empty()) throw InvalidConfig("gamma set is empty");
  const std::size_t dim = pairs_.front().first.size();
  bool has_identity = false;
  for (const auto& [m, n] : pairs_) {
    if (m.size() != dim || n.size() != dim || dim == 0)
      throw InvalidConfig("gamma index pairs have inconsistent dimension");
    bool zero = true;
    for (const int v : m) zero = zero && v == 0;
    for (const int v : n) zero = zero && v == 0;
    has_identity = has_identity || zero;
  }
  if (!has_identity) throw InvalidConfig("gamma set must contain the identity pair (0,0)");
}

void GammaSet::validate_against(const RepGrid& grid) const {
  validate();
  if (d() != grid.d()) throw InvalidConfig("gamma dimension does not match d");
  for (const auto& [m, n] : pairs_)
    for (const int v : m)
      if (!grid.on_grid(a_ * v))
        throw GridMismatch("translation a*m = " + std::to_string(a_ * v) + " is not a multiple of L/M");
}

}  // namespace fiberscope
