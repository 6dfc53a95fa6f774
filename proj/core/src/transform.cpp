#include "tscaledgd/transform.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace tsgd {

struct Transform::State {
  TransformKind kind = TransformKind::kCustom;
  Index n3 = 0;
  double ell = 1.0;
  Eigen::MatrixXcd phi;
  Eigen::MatrixXcd phi_inv;
  // Transposed real and imaginary parts, laid out for (n1 n2) x n3 GEMMs.
  Eigen::MatrixXd fwd_re_t, fwd_im_t, inv_re_t, inv_im_t;
  bool fwd_real = false;
  bool inv_real = false;
  std::vector<Index> partner;
  bool real_preserving = false;
};

const char* to_string(TransformKind kind) noexcept {
  switch (kind) {
    case TransformKind::kDft: return "dft";
    case TransformKind::kDct: return "dct";
    case TransformKind::kCustom: return "custom";
  }
  return "unknown";
}

TransformKind parse_transform_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "dft" || lower == "fft") return TransformKind::kDft;
  if (lower == "dct") return TransformKind::kDct;
  throw Error(Errc::kUnknownKind, "transform '" + std::string(name) + "' (expected dft or dct)");
}

namespace {

Eigen::MatrixXcd dft_matrix(Index n) {
  Eigen::MatrixXcd phi(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      // Reduce j*k modulo n before scaling so large products keep full accuracy.
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((j * k) % n) /
                           static_cast<double>(n);
      double c = std::cos(angle);
      double sn = std::sin(angle);
      // Exact zeros at multiples of pi/2 keep small transforms (n3 <= 2) real.
      if (std::abs(c) < 1e-15) c = 0.0;
      if (std::abs(sn) < 1e-15) sn = 0.0;
      phi(j, k) = Complex(c, sn);
    }
  }
  return phi;
}

Eigen::MatrixXcd dct_matrix(Index n) {
  Eigen::MatrixXcd phi(n, n);
  const double nd = static_cast<double>(n);
  for (Index k = 0; k < n; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
    for (Index j = 0; j < n; ++j) {
      phi(k, j) = scale * std::cos(std::numbers::pi * (2.0 * static_cast<double>(j) + 1.0) *
                                   static_cast<double>(k) / (2.0 * nd));
    }
  }
  return phi;
}

double max_abs(const Eigen::MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

std::vector<Index> find_partners(const Eigen::MatrixXcd& phi) {
  const Index n = phi.rows();
  const double tol = 1e-10 * std::max(1.0, max_abs(phi));
  std::vector<Index> partner(static_cast<std::size_t>(n), -1);
  for (Index k = 0; k < n; ++k) {
    const Eigen::RowVectorXcd target = phi.row(k).conjugate();
    for (Index j = 0; j < n; ++j) {
      if ((phi.row(j) - target).cwiseAbs().maxCoeff() <= tol) {
        partner[static_cast<std::size_t>(k)] = j;
        break;
      }
    }
  }
  return partner;
}

}  // namespace

Transform Transform::make(TransformKind kind, Index n3) {
  if (n3 < 1) throw Error(Errc::kInvalidArgument, "n3 must be >= 1");
  auto state = std::make_shared<State>();
  state->kind = kind;
  state->n3 = n3;
  switch (kind) {
    case TransformKind::kDft:
      state->phi = dft_matrix(n3);
      state->ell = static_cast<double>(n3);
      state->partner.resize(static_cast<std::size_t>(n3));
      for (Index k = 0; k < n3; ++k) state->partner[static_cast<std::size_t>(k)] = (n3 - k) % n3;
      break;
    case TransformKind::kDct:
      state->phi = dct_matrix(n3);
      state->ell = 1.0;
      state->partner.resize(static_cast<std::size_t>(n3));
      for (Index k = 0; k < n3; ++k) state->partner[static_cast<std::size_t>(k)] = k;
      break;
    case TransformKind::kCustom:
      throw Error(Errc::kInvalidArgument, "use Transform::custom for a user-supplied Phi");
  }
  state->phi_inv = state->phi.adjoint() / state->ell;
  state->fwd_re_t = state->phi.real().transpose();
  state->fwd_im_t = state->phi.imag().transpose();
  state->inv_re_t = state->phi_inv.real().transpose();
  state->inv_im_t = state->phi_inv.imag().transpose();
  state->fwd_real = state->phi.imag().cwiseAbs().maxCoeff() == 0.0;
  state->inv_real = state->fwd_real;
  state->real_preserving = true;
  return Transform(std::move(state));
}

Transform Transform::custom(const Eigen::MatrixXcd& phi) {
  if (phi.rows() != phi.cols() || phi.rows() < 1) {
    throw Error(Errc::kDimensionMismatch, "Phi must be a non-empty square matrix");
  }
  const Index n = phi.rows();
  const Eigen::MatrixXcd outer = phi * phi.adjoint();
  const Eigen::MatrixXcd inner = phi.adjoint() * phi;
  const double ell = outer.diagonal().real().mean();
  if (!(ell > 0.0) || !std::isfinite(ell)) {
    throw Error(Errc::kNotOrthogonalUpToScale, "mean of diag(Phi Phi^H) is not positive");
  }
  const Eigen::MatrixXcd scaled_identity = ell * Eigen::MatrixXcd::Identity(n, n);
  const double dev = std::max(max_abs(outer - scaled_identity), max_abs(inner - scaled_identity));
  if (dev > 1e-8 * ell) {
    throw Error(Errc::kNotOrthogonalUpToScale,
                "max deviation of Phi Phi^H from ell I is " + std::to_string(dev) +
                    " (ell = " + std::to_string(ell) + ")",
                std::nullopt, dev);
  }
  auto state = std::make_shared<State>();
  state->kind = TransformKind::kCustom;
  state->n3 = n;
  state->ell = ell;
  state->phi = phi;
  state->phi_inv = phi.adjoint() / ell;
  state->fwd_re_t = phi.real().transpose();
  state->fwd_im_t = phi.imag().transpose();
  state->inv_re_t = state->phi_inv.real().transpose();
  state->inv_im_t = state->phi_inv.imag().transpose();
  state->fwd_real = phi.imag().cwiseAbs().maxCoeff() == 0.0;
  state->inv_real = state->fwd_real;
  state->partner = find_partners(phi);
  state->real_preserving =
      std::all_of(state->partner.begin(), state->partner.end(), [](Index p) { return p >= 0; });
  return Transform(std::move(state));
}

TransformKind Transform::kind() const noexcept { return state_->kind; }
Index Transform::n3() const noexcept { return state_->n3; }
double Transform::ell() const noexcept { return state_->ell; }
const Eigen::MatrixXcd& Transform::phi() const noexcept { return state_->phi; }
const Eigen::MatrixXcd& Transform::phi_inverse() const noexcept { return state_->phi_inv; }

Index Transform::conjugate_partner(Index k) const {
  if (k < 0 || k >= state_->n3) throw Error(Errc::kInvalidArgument, "slice index out of range");
  return state_->partner[static_cast<std::size_t>(k)];
}

bool Transform::real_preserving() const noexcept { return state_->real_preserving; }

SpectralTensor Transform::forward(const Tensor3& a) const {
  const State& s = *state_;
  if (a.n3() != s.n3) {
    throw Error(Errc::kDimensionMismatch, "tensor has n3 = " + std::to_string(a.n3()) +
                                              ", transform expects " + std::to_string(s.n3));
  }
  SpectralTensor out(a.n1(), a.n2(), a.n3());
  if (a.size() == 0) return out;
  const auto m = a.unfolded();
  const Eigen::MatrixXd re = m * s.fwd_re_t;
  auto dst = out.data();
  if (s.fwd_real) {
    for (Index i = 0; i < re.size(); ++i) dst[static_cast<std::size_t>(i)] = Complex(re.data()[i], 0.0);
  } else {
    const Eigen::MatrixXd im = m * s.fwd_im_t;
    for (Index i = 0; i < re.size(); ++i) {
      dst[static_cast<std::size_t>(i)] = Complex(re.data()[i], im.data()[i]);
    }
  }
  return out;
}

Tensor3 Transform::inverse(const SpectralTensor& abar, ResidueCheck check) const {
  const State& s = *state_;
  if (abar.n3() != s.n3) {
    throw Error(Errc::kDimensionMismatch, "spectral tensor has n3 = " + std::to_string(abar.n3()) +
                                              ", transform expects " + std::to_string(s.n3));
  }
  Tensor3 out(abar.n1(), abar.n2(), abar.n3());
  if (abar.size() == 0) return out;
  const auto m = abar.unfolded();
  const Eigen::MatrixXd are = m.real();
  const Eigen::MatrixXd aim = m.imag();
  const bool input_real = aim.cwiseAbs().maxCoeff() == 0.0;

  auto result = out.unfolded();
  result.noalias() = are * s.inv_re_t;
  if (!s.inv_real && !input_real) result.noalias() -= aim * s.inv_im_t;

  if (check == ResidueCheck::kEnforce) {
    double residue = 0.0;
    if (s.inv_real) {
      if (!input_real) residue = (aim * s.inv_re_t).cwiseAbs().maxCoeff();
    } else {
      Eigen::MatrixXd im = are * s.inv_im_t;
      if (!input_real) im.noalias() += aim * s.inv_re_t;
      residue = im.cwiseAbs().maxCoeff();
    }
    const double bound = 1e-9 * (1.0 + out.flat().norm());
    if (!(residue <= bound)) {
      throw Error(Errc::kImaginaryResidueTooLarge,
                  "max imaginary part " + std::to_string(residue) + " exceeds " + std::to_string(bound),
                  std::nullopt, residue);
    }
  }
  return out;
}

Transform make_transform(TransformKind kind, Index n3) { return Transform::make(kind, n3); }
Transform make_custom_transform(const Eigen::MatrixXcd& phi) { return Transform::custom(phi); }

}  // namespace tsgd
