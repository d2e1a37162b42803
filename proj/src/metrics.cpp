#include "nilcurv/metrics.hpp"

#include <cmath>

#include "nilcurv/errors.hpp"

namespace nilcurv {

PolyMatrix::PolyMatrix(std::size_t rows, std::size_t nvars)
    : rows_(rows), data_(rows * rows, Polynomial(nvars)) {}

bool PolyMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = i + 1; j < rows_; ++j) {
      if (!((*this)(i, j) == (*this)(j, i))) return false;
    }
  }
  return true;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Psi: return "psi";
    case Family::Gradient: return "gradient";
    case Family::Affine: return "affine";
    case Family::Flat: return "flat";
    case Family::Product: return "product";
  }
  return "unknown";
}

MetricSpec MetricSpec::psi(std::size_t p, PolyMatrix psi) {
  if (p == 0) throw ConstructionError("psi metric: p must be positive");
  if (psi.size() != p) {
    throw ConstructionError("psi metric: psi must be " + std::to_string(p) + "x" +
                            std::to_string(p));
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (psi(i, j).nvars() != p) {
        throw ConstructionError("psi metric: psi(" + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + ") has nvars " +
                                std::to_string(psi(i, j).nvars()) + ", expected " +
                                std::to_string(p));
      }
    }
  }
  if (!psi.is_symmetric()) throw ConstructionError("psi metric: psi is not symmetric");
  MetricSpec s;
  s.family_ = Family::Psi;
  s.p_ = p;
  s.dimension_ = 2 * p;
  s.psi_ = std::make_shared<const PolyMatrix>(std::move(psi));
  s.build_components();
  return s;
}

MetricSpec MetricSpec::gradient(std::size_t p, Polynomial f) {
  if (p == 0) throw ConstructionError("gradient metric: p must be positive");
  if (f.nvars() != p) {
    throw ConstructionError("gradient metric: f has nvars " + std::to_string(f.nvars()) +
                            ", expected " + std::to_string(p));
  }
  std::vector<Polynomial> df;
  for (std::size_t i = 0; i < p; ++i) df.push_back(f.diff(i));
  PolyMatrix psi(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      psi(i, j) = df[i] * df[j];
      psi(j, i) = psi(i, j);
    }
  }
  MetricSpec s;
  s.family_ = Family::Gradient;
  s.p_ = p;
  s.dimension_ = 2 * p;
  s.psi_ = std::make_shared<const PolyMatrix>(std::move(psi));
  s.potential_ = std::make_shared<const Polynomial>(std::move(f));
  s.build_components();
  return s;
}

MetricSpec MetricSpec::affine(std::size_t p, std::vector<Polynomial> gamma) {
  if (p == 0) throw ConstructionError("affine metric: p must be positive");
  if (gamma.size() != p * p * p) {
    throw ConstructionError("affine metric: expected " + std::to_string(p * p * p) +
                            " Christoffel symbols");
  }
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> const Polynomial& {
    return gamma[(i * p + j) * p + k];
  };
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = 0; k < p; ++k) {
        const auto label = std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                           std::to_string(k + 1);
        if (at(i, j, k).nvars() != p) {
          throw ConstructionError("affine metric: gamma(" + label + ") must be a polynomial in " +
                                  std::to_string(p) + " variables");
        }
        if (!(at(i, j, k) == at(j, i, k))) {
          throw ConstructionError("affine metric: connection has torsion at gamma(" + label +
                                  ")");
        }
      }
    }
  }
  MetricSpec s;
  s.family_ = Family::Affine;
  s.p_ = p;
  s.dimension_ = 2 * p;
  s.gamma_ = std::make_shared<const std::vector<Polynomial>>(std::move(gamma));
  s.build_components();
  return s;
}

MetricSpec MetricSpec::flat(std::size_t negative, std::size_t positive) {
  if (negative + positive == 0) throw ConstructionError("flat metric: dimension must be positive");
  MetricSpec s;
  s.family_ = Family::Flat;
  s.dimension_ = negative + positive;
  s.flat_neg_ = negative;
  s.flat_pos_ = positive;
  s.build_components();
  return s;
}

MetricSpec MetricSpec::product(const MetricSpec& base, std::size_t negative,
                               std::size_t positive) {
  if (base.family() == Family::Product || base.family() == Family::Flat) {
    throw ConstructionError("product metric: base must be psi, gradient or affine");
  }
  if (negative + positive == 0) {
    throw ConstructionError("product metric: flat factor must have positive dimension");
  }
  MetricSpec s;
  s.family_ = Family::Product;
  s.p_ = base.p();
  s.dimension_ = base.dimension() + negative + positive;
  s.flat_neg_ = negative;
  s.flat_pos_ = positive;
  s.base_ = std::make_shared<const MetricSpec>(base);
  s.build_components();
  return s;
}

Family MetricSpec::core_family() const {
  return family_ == Family::Product ? base_->family() : family_;
}

const PolyMatrix& MetricSpec::psi() const {
  if (family_ == Family::Product) return base_->psi();
  if (!psi_) throw InputError("metric family " + family_name(family_) + " has no psi");
  return *psi_;
}

const Polynomial& MetricSpec::potential() const {
  if (family_ == Family::Product) return base_->potential();
  if (!potential_) throw InputError("metric family " + family_name(family_) + " has no potential f");
  return *potential_;
}

const Polynomial& MetricSpec::gamma(std::size_t i, std::size_t j, std::size_t k) const {
  if (family_ == Family::Product) return base_->gamma(i, j, k);
  if (!gamma_) throw InputError("metric family " + family_name(family_) + " has no connection");
  if (i >= p_ || j >= p_ || k >= p_) throw InputError("gamma: index out of range");
  return (*gamma_)[(i * p_ + j) * p_ + k];
}

const MetricSpec& MetricSpec::base() const {
  if (!base_) throw InputError("metric family " + family_name(family_) + " has no base");
  return *base_;
}

Signature MetricSpec::expected_signature() const {
  return Signature{static_cast<int>(p_ + flat_neg_), static_cast<int>(p_ + flat_pos_)};
}

MetricSpec MetricSpec::as_psi() const {
  if (family_ == Family::Gradient) return psi(p_, *psi_);
  if (family_ == Family::Product && base_->family() == Family::Gradient) {
    return product(base_->as_psi(), flat_neg_, flat_pos_);
  }
  return *this;
}

void MetricSpec::build_components() {
  const std::size_t n = dimension_;
  PolyMatrix g(n, n);
  const auto add_xy_block = [&](std::size_t p) {
    for (std::size_t i = 0; i < p; ++i) {
      g(i, p + i) = Polynomial::constant(n, 1.0);
      g(p + i, i) = Polynomial::constant(n, 1.0);
    }
  };
  const auto add_flat_block = [&](std::size_t offset) {
    for (std::size_t k = 0; k < flat_neg_ + flat_pos_; ++k) {
      g(offset + k, offset + k) = Polynomial::constant(n, k < flat_neg_ ? -1.0 : 1.0);
    }
  };

  switch (family_) {
    case Family::Psi:
    case Family::Gradient:
      add_xy_block(p_);
      for (std::size_t i = 0; i < p_; ++i) {
        for (std::size_t j = 0; j < p_; ++j) g(i, j) = (*psi_)(i, j).embed(n, 0);
      }
      break;
    case Family::Affine:
      add_xy_block(p_);
      for (std::size_t i = 0; i < p_; ++i) {
        for (std::size_t j = 0; j < p_; ++j) {
          Polynomial entry(n);
          for (std::size_t k = 0; k < p_; ++k) {
            const Polynomial yk = Polynomial::variable(n, p_ + k);
            entry += yk * gamma(i, j, k).embed(n, 0);
          }
          g(i, j) = entry * -2.0;
        }
      }
      break;
    case Family::Flat:
      add_flat_block(0);
      break;
    case Family::Product: {
      const PolyMatrix& bg = base_->components();
      const std::size_t m = base_->dimension();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) g(i, j) = bg(i, j).embed(n, 0);
      }
      add_flat_block(m);
      break;
    }
  }
  components_ = std::make_shared<const PolyMatrix>(std::move(g));
}

MetricAtPoint metric_at(const MetricSpec& spec, const PointChart& point) {
  const std::size_t n = spec.dimension();
  if (point.size() != n) {
    throw InputError("metric_at: point has " + std::to_string(point.size()) +
                     " coordinates, metric dimension is " + std::to_string(n));
  }
  const std::span<const double> x(point.coords.data(), n);
  MetricAtPoint out;
  out.g.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const PolyMatrix& comp = spec.components();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = comp(i, j).eval(x);
    }
  }
  Eigen::FullPivLU<Matrix> lu(out.g);
  if (!lu.isInvertible()) throw NumericalError("metric_at: metric is singular");
  out.g_inv = lu.inverse();
  const Matrix residual = out.g * out.g_inv - Matrix::Identity(out.g.rows(), out.g.cols());
  if (residual.cwiseAbs().maxCoeff() > 1e-10 * (1.0 + out.g.cwiseAbs().maxCoeff())) {
    throw NumericalError("metric_at: inverse check failed");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.g, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("metric_at: eigensolver failed");
  for (const double lambda : eig.eigenvalues()) {
    if (lambda < 0) {
      ++out.signature.negative;
    } else {
      ++out.signature.positive;
    }
  }
  return out;
}

double inner(const MetricAtPoint& gp, const Vector& u, const Vector& v) {
  if (u.size() != gp.g.rows() || v.size() != gp.g.rows()) {
    throw InputError("inner: vector length does not match metric dimension " +
                     std::to_string(gp.g.rows()));
  }
  return u.dot(gp.g * v);
}

Vector basis_vector(std::size_t n, std::size_t i) {
  if (i >= n) throw InputError("basis_vector: index out of range");
  Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
  e(static_cast<Eigen::Index>(i)) = 1.0;
  return e;
}

}  // namespace nilcurv
