#include "starcov/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

namespace starcov {

int SdpProblem::add_variable(int dim) {
  if (dim < 1) throw std::invalid_argument("SdpProblem::add_variable: dim < 1");
  dims.push_back(dim);
  return static_cast<int>(dims.size()) - 1;
}

void SdpProblem::add_objective_term(int var, MatrixXcd coeff) {
  if (var < 0 || var >= static_cast<int>(dims.size()))
    throw std::invalid_argument("SdpProblem: objective term references unknown variable");
  if (coeff.rows() != dims[var] || coeff.cols() != dims[var])
    throw std::invalid_argument("SdpProblem: objective coefficient dimension mismatch");
  objective.push_back({var, std::move(coeff)});
}

void SdpProblem::add_constraint(std::vector<SdpTerm> terms, Relation rel, double bound) {
  for (const SdpTerm& t : terms) {
    if (t.var < 0 || t.var >= static_cast<int>(dims.size()))
      throw std::invalid_argument("SdpProblem: constraint references unknown variable");
    if (t.coeff.rows() != dims[t.var] || t.coeff.cols() != dims[t.var])
      throw std::invalid_argument("SdpProblem: constraint coefficient dimension mismatch");
  }
  constraints.push_back({std::move(terms), rel, bound});
}

void SdpProblem::pin_diagonal(int var, const VectorXd& values) {
  if (var < 0 || var >= static_cast<int>(dims.size()))
    throw std::invalid_argument("SdpProblem::pin_diagonal: unknown variable");
  if (values.size() != dims[var])
    throw std::invalid_argument("SdpProblem::pin_diagonal: size mismatch");
  for (int n = 0; n < dims[var]; ++n) {
    MatrixXcd e = MatrixXcd::Zero(dims[var], dims[var]);
    e(n, n) = 1.0;
    add_constraint({{var, std::move(e)}}, Relation::Equal, values[n]);
  }
}

namespace {

void append_matrix(std::string& out, const MatrixXcd& a) {
  char buf[64];
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g%+.17gi ", a(r, c).real(), a(r, c).imag());
      out += buf;
    }
    out += '\n';
  }
}

}  // namespace

std::string SdpProblem::debug_dump() const {
  std::string out = "sdp-problem/1\n";
  char buf[96];
  out += maximize ? "sense maximize\n" : "sense minimize\n";
  std::snprintf(buf, sizeof buf, "objective-constant %.17g\n", objective_constant);
  out += buf;
  std::snprintf(buf, sizeof buf, "variables %zu\n", dims.size());
  out += buf;
  for (size_t v = 0; v < dims.size(); ++v) {
    std::snprintf(buf, sizeof buf, "var %zu dim %d\n", v, dims[v]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "objective-terms %zu\n", objective.size());
  out += buf;
  for (const SdpTerm& t : objective) {
    std::snprintf(buf, sizeof buf, "term var %d\n", t.var);
    out += buf;
    append_matrix(out, t.coeff);
  }
  std::snprintf(buf, sizeof buf, "constraints %zu\n", constraints.size());
  out += buf;
  for (size_t i = 0; i < constraints.size(); ++i) {
    const SdpConstraint& c = constraints[i];
    const char* rel = c.rel == Relation::LessEq ? "<=" : c.rel == Relation::GreaterEq ? ">=" : "==";
    std::snprintf(buf, sizeof buf, "constraint %zu rel %s bound %.17g terms %zu\n", i, rel,
                  c.bound, c.terms.size());
    out += buf;
    for (const SdpTerm& t : c.terms) {
      std::snprintf(buf, sizeof buf, "term var %d\n", t.var);
      out += buf;
      append_matrix(out, t.coeff);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Interior-point solver internals
// ---------------------------------------------------------------------------

namespace {

using Eigen::MatrixXd;

MatrixXcd hermitize(const MatrixXcd& a) { return 0.5 * (a + a.adjoint()); }

double inner(const MatrixXcd& a, const MatrixXcd& x) {
  // Re Tr(a x) for Hermitian a, x.
  return a.cwiseProduct(x.conjugate()).sum().real();
}

/// One coefficient of a constraint/objective on a dense Hermitian block.
/// Diagonal coefficients are stored as real vectors so the Schur assembly can
/// take the cheap |W|^2 path.
struct Coeff {
  int var;
  bool is_diag;
  VectorXd d;    // when is_diag
  MatrixXcd a;   // otherwise
  double norm() const { return is_diag ? d.norm() : a.norm(); }
};

Coeff classify(int var, const MatrixXcd& raw) {
  const MatrixXcd a = hermitize(raw);
  const double scale = a.cwiseAbs().maxCoeff();
  double offdiag = 0.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      if (r != c) offdiag = std::max(offdiag, std::abs(a(r, c)));
  // Relative test only: physical coefficient matrices can be uniformly tiny,
  // and an absolute floor here would misclassify them as diagonal.
  if (offdiag <= 1e-14 * scale) {
    return {var, true, a.diagonal().real(), {}};
  }
  return {var, false, {}, a};
}

/// A point in the product cone: one dense Hermitian matrix per variable plus
/// the diagonal slack block.
struct Iterate {
  std::vector<MatrixXcd> blk;
  VectorXd slk;

  static Iterate zero(const std::vector<int>& dims, int n_slack) {
    Iterate it;
    it.blk.reserve(dims.size());
    for (int n : dims) it.blk.push_back(MatrixXcd::Zero(n, n));
    it.slk = VectorXd::Zero(n_slack);
    return it;
  }
  static Iterate identity(const std::vector<int>& dims, int n_slack, double s) {
    Iterate it = zero(dims, n_slack);
    for (auto& b : it.blk) b.diagonal().setConstant(s);
    it.slk.setConstant(s);
    return it;
  }
  void axpy(double a, const Iterate& o) {
    for (size_t v = 0; v < blk.size(); ++v) blk[v] += a * o.blk[v];
    slk += a * o.slk;
  }
};

double dot(const Iterate& a, const Iterate& b) {
  double s = a.slk.dot(b.slk);
  for (size_t v = 0; v < a.blk.size(); ++v) s += inner(a.blk[v], b.blk[v]);
  return s;
}

struct ScaledConstraint {
  std::vector<Coeff> coeffs;
  double b;
  int slack = -1;      // index into the slack block, -1 for equalities
  double slack_sign = 0.0;
};

struct Internal {
  std::vector<int> dims;
  int n_slack = 0;
  std::vector<ScaledConstraint> cons;
  std::vector<Coeff> obj;  // minimization sense
  double nu = 0.0;         // total cone dimension
};

VectorXd apply_A(const Internal& in, const Iterate& x) {
  VectorXd out(in.cons.size());
  for (size_t i = 0; i < in.cons.size(); ++i) {
    const ScaledConstraint& c = in.cons[i];
    double v = 0.0;
    for (const Coeff& t : c.coeffs)
      v += t.is_diag ? t.d.dot(x.blk[t.var].diagonal().real()) : inner(t.a, x.blk[t.var]);
    if (c.slack >= 0) v += c.slack_sign * x.slk[c.slack];
    out[i] = v;
  }
  return out;
}

Iterate apply_AT(const Internal& in, const VectorXd& y) {
  Iterate out = Iterate::zero(in.dims, in.n_slack);
  for (size_t i = 0; i < in.cons.size(); ++i) {
    const ScaledConstraint& c = in.cons[i];
    for (const Coeff& t : c.coeffs) {
      if (t.is_diag)
        out.blk[t.var].diagonal() += (y[i] * t.d).cast<Complex>();
      else
        out.blk[t.var] += y[i] * t.a;
    }
    if (c.slack >= 0) out.slk[c.slack] += c.slack_sign * y[i];
  }
  return out;
}

/// Nesterov-Todd scaling data per block.
struct Scaling {
  std::vector<MatrixXcd> w;     // dense W with W Z W = X
  std::vector<MatrixXd> kw;     // |W|^2 elementwise, for diag-diag Schur entries
  std::vector<MatrixXcd> lx;    // Cholesky factor of each X block (reused below)
  std::vector<MatrixXcd> lz;    // Cholesky factor of each Z block
  VectorXd w_slk;               // sqrt(x/z)
};

/// Computes W with W Z W = X. The eigendecomposition route factors
/// Lx^H Z Lx, which squares the conditioning of X Z; it is cheap and fine
/// while the iterate is well centered, but the endgame needs the SVD route
/// (singular values of Lz^H Lx), which works at the square root.
bool compute_nt(const Iterate& x, const Iterate& z, Scaling& s, bool accurate) {
  s.w.resize(x.blk.size());
  s.kw.resize(x.blk.size());
  s.lx.resize(x.blk.size());
  s.lz.resize(x.blk.size());
  for (size_t v = 0; v < x.blk.size(); ++v) {
    Eigen::LLT<MatrixXcd> lx(x.blk[v]), lz(z.blk[v]);
    if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    s.lx[v] = lx.matrixL();
    s.lz[v] = lz.matrixL();
    MatrixXcd g;
    if (accurate) {
      Eigen::JacobiSVD<MatrixXcd> svd(s.lz[v].adjoint() * s.lx[v], Eigen::ComputeThinV);
      const VectorXd sv = svd.singularValues();
      if (sv.minCoeff() <= 0.0) return false;
      g = s.lx[v] * svd.matrixV() * sv.cwiseSqrt().cwiseInverse().asDiagonal();
    } else {
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(
          hermitize(s.lx[v].adjoint() * z.blk[v] * s.lx[v]));
      if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) return false;
      g = s.lx[v] * es.eigenvectors() *
          es.eigenvalues().cwiseSqrt().cwiseSqrt().cwiseInverse().asDiagonal();
    }
    s.w[v] = hermitize(g * g.adjoint());
    s.kw[v] = s.w[v].cwiseAbs2();
  }
  s.w_slk = (x.slk.array() / z.slk.array()).sqrt().matrix();
  return s.w_slk.allFinite();
}

/// A(W . W) applied to the NT scaling of an iterate argument.
Iterate scale_wxw(const Scaling& s, const Iterate& u) {
  Iterate out = u;
  for (size_t v = 0; v < u.blk.size(); ++v)
    out.blk[v] = hermitize(s.w[v] * u.blk[v] * s.w[v]);
  out.slk = s.w_slk.cwiseAbs2().cwiseProduct(u.slk);
  return out;
}

/// Schur complement M_ij = sum_blocks <A_i, W A_j W>, exploiting diagonal
/// coefficients (d_i^T |W|^2 d_j) so the diag-pinning constraints stay cheap.
MatrixXd build_schur(const Internal& in, const Scaling& s) {
  const int m = static_cast<int>(in.cons.size());
  MatrixXd M = MatrixXd::Zero(m, m);

  // Group constraint coefficients by block.
  struct Touch {
    int con;
    const Coeff* coeff;
  };
  std::vector<std::vector<Touch>> per_block(in.dims.size());
  for (int i = 0; i < m; ++i)
    for (const Coeff& t : in.cons[i].coeffs) per_block[t.var].push_back({i, &t});

  for (size_t v = 0; v < in.dims.size(); ++v) {
    const auto& touch = per_block[v];
    if (touch.empty()) continue;
    // Dense coefficients get W A W precomputed once; diagonal ones get |W|^2 d.
    std::vector<MatrixXcd> waw(touch.size());
    std::vector<VectorXd> kd(touch.size());
    for (size_t a = 0; a < touch.size(); ++a) {
      if (touch[a].coeff->is_diag) kd[a] = s.kw[v] * touch[a].coeff->d;
      else waw[a] = s.w[v] * touch[a].coeff->a * s.w[v];
    }
    for (size_t a = 0; a < touch.size(); ++a) {
      for (size_t b = a; b < touch.size(); ++b) {
        const Coeff& ca = *touch[a].coeff;
        const Coeff& cb = *touch[b].coeff;
        double val;
        if (ca.is_diag && cb.is_diag) {
          val = ca.d.dot(kd[b]);
        } else if (cb.is_diag) {  // <Diag(d_b), W A_a W>
          val = cb.d.dot(waw[a].diagonal().real());
        } else if (ca.is_diag) {
          val = ca.d.dot(waw[b].diagonal().real());
        } else {
          val = inner(ca.a, waw[b]);
        }
        M(touch[a].con, touch[b].con) += val;
        if (touch[a].con != touch[b].con) M(touch[b].con, touch[a].con) += val;
      }
    }
  }
  for (int i = 0; i < m; ++i)
    if (in.cons[i].slack >= 0) {
      const double w = s.w_slk[in.cons[i].slack];
      M(i, i) += w * w;
    }
  return M;
}

/// Largest step alpha with x + alpha dx staying in the cone (capped at 1).
/// `lfac` optionally supplies precomputed Cholesky factors of x's blocks.
double max_step(const Iterate& x, const Iterate& dx,
                const std::vector<MatrixXcd>* lfac = nullptr) {
  double alpha = 1.0;
  for (size_t v = 0; v < x.blk.size(); ++v) {
    MatrixXcd L;
    if (lfac) {
      L = (*lfac)[v];
    } else {
      Eigen::LLT<MatrixXcd> llt(x.blk[v]);
      if (llt.info() != Eigen::Success) return 0.0;
      L = llt.matrixL();
    }
    const MatrixXcd B = L.triangularView<Eigen::Lower>().solve(
        MatrixXcd(L.triangularView<Eigen::Lower>().solve(dx.blk[v]).adjoint()));
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(B), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  for (Eigen::Index i = 0; i < x.slk.size(); ++i)
    if (dx.slk[i] < 0.0) alpha = std::min(alpha, -x.slk[i] / dx.slk[i]);
  return alpha;
}

/// Smallest complementarity product relative to the average: min lambda(XZ)/mu
/// over all blocks and slack entries. Near 1 on the central path, tiny when an
/// iterate degenerates. `lzfac` optionally supplies z's Cholesky factors.
double prox_ratio(const Iterate& x, const Iterate& z, double nu,
                  const std::vector<MatrixXcd>* lzfac = nullptr) {
  const double mu = dot(x, z) / nu;
  if (!(mu > 0.0)) return -1.0;
  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.slk.size(); ++i) lo = std::min(lo, x.slk[i] * z.slk[i]);
  for (size_t v = 0; v < x.blk.size(); ++v) {
    MatrixXcd L;
    if (lzfac) {
      L = (*lzfac)[v];
    } else {
      Eigen::LLT<MatrixXcd> lz(z.blk[v]);
      if (lz.info() != Eigen::Success) return -1.0;
      L = lz.matrixL();
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(L.adjoint() * x.blk[v] * L),
                                                Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo / mu;
}

double block_norm(const Iterate& it) {
  double s = it.slk.size() ? it.slk.cwiseAbs().maxCoeff() : 0.0;
  for (const auto& b : it.blk) if (b.size()) s = std::max(s, b.cwiseAbs().maxCoeff());
  return s;
}

double min_eig(const MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, double tol) {
  SdpSolution sol;
  sol.values.reserve(p.dims.size());
  for (int n : p.dims) sol.values.push_back(MatrixXcd::Zero(n, n));

  // --- assemble the scaled internal minimization problem -------------------
  Internal in;
  in.dims = p.dims;
  for (int n : p.dims) in.nu += n;

  const double obj_sign = p.maximize ? -1.0 : 1.0;
  std::vector<MatrixXcd> cdense(p.dims.size());
  for (size_t v = 0; v < p.dims.size(); ++v) cdense[v] = MatrixXcd::Zero(p.dims[v], p.dims[v]);
  for (const SdpTerm& t : p.objective) cdense[t.var] += obj_sign * hermitize(t.coeff);
  double c_norm = 0.0;
  for (const auto& c : cdense) c_norm = std::hypot(c_norm, c.norm());
  const double sC = std::max(c_norm, 1e-12);
  for (size_t v = 0; v < p.dims.size(); ++v)
    in.obj.push_back(classify(static_cast<int>(v), cdense[v] / sC));

  VectorXd b(p.constraints.size());
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    const SdpConstraint& c = p.constraints[i];
    ScaledConstraint sc;
    double nrm = 0.0;
    for (const SdpTerm& t : c.terms) {
      sc.coeffs.push_back(classify(t.var, t.coeff));
      nrm = std::hypot(nrm, sc.coeffs.back().norm());
    }
    // Equilibrate by the true row norm however small: physical-unit rows can
    // sit 17 orders below O(1) rows, and a floored scale would leave their
    // feasibility tolerance effectively absolute instead of relative.
    const double s = nrm > 0.0 ? nrm : 1.0;
    for (Coeff& t : sc.coeffs) {
      if (t.is_diag) t.d /= s;
      else t.a /= s;
    }
    sc.b = c.bound / s;
    if (c.rel != Relation::Equal) {
      sc.slack = in.n_slack++;
      sc.slack_sign = c.rel == Relation::LessEq ? 1.0 : -1.0;
    }
    b[static_cast<Eigen::Index>(i)] = sc.b;
    in.cons.push_back(std::move(sc));
  }
  in.nu += in.n_slack;
  const int m = static_cast<int>(in.cons.size());

  const double sb = std::max(1.0, m ? b.cwiseAbs().maxCoeff() : 0.0);
  b /= sb;
  for (auto& c : in.cons) c.b /= sb;

  auto finalize = [&](const Iterate& x) {
    for (size_t v = 0; v < p.dims.size(); ++v) sol.values[v] = sb * x.blk[v];
    double obj = 0.0;
    for (const SdpTerm& t : p.objective) obj += inner(hermitize(t.coeff), sol.values[t.var]);
    sol.objective = obj + p.objective_constant;
    double viol = 0.0;
    for (const SdpConstraint& c : p.constraints) {
      double v = 0.0;
      for (const SdpTerm& t : c.terms) v += inner(hermitize(t.coeff), sol.values[t.var]);
      if (c.rel == Relation::LessEq) viol = std::max(viol, v - c.bound);
      else if (c.rel == Relation::GreaterEq) viol = std::max(viol, c.bound - v);
      else viol = std::max(viol, std::abs(v - c.bound));
    }
    for (const auto& xv : sol.values) viol = std::max(viol, -std::min(0.0, min_eig(xv)));
    sol.max_violation = viol;
  };

  if (m == 0) {
    // No constraints: X = 0 is optimal iff the (minimization) objective is PSD.
    bool psd = true;
    for (const Coeff& c : in.obj) {
      if (c.is_diag ? c.d.minCoeff() < -1e-12 : min_eig(c.a) < -1e-12) psd = false;
    }
    Iterate x0 = Iterate::zero(in.dims, 0);
    finalize(x0);
    sol.status = psd ? SdpStatus::Optimal : SdpStatus::NumericFailure;
    sol.message = psd ? "unconstrained optimum at zero" : "unbounded objective";
    return sol;
  }

  // Objective as a dense iterate for residuals.
  Iterate C = Iterate::zero(in.dims, in.n_slack);
  for (const Coeff& c : in.obj) {
    if (c.is_diag) C.blk[c.var].diagonal() = c.d.cast<Complex>();
    else C.blk[c.var] = c.a;
  }

  // --- interior-point iterations -------------------------------------------
  const double s0 = 10.0;
  Iterate X = Iterate::identity(in.dims, in.n_slack, s0 * std::max(1.0, b.cwiseAbs().maxCoeff()));
  Iterate Z = Iterate::identity(in.dims, in.n_slack, s0);
  VectorXd y = VectorXd::Zero(m);

  const int max_iter = 100;
  const double b_ref = 1.0 + b.cwiseAbs().maxCoeff();
  const double c_ref = 1.0 + block_norm(C);
  const double mu0 = dot(X, Z) / in.nu;
  Scaling s;

  // Numeric dead ends (lost definiteness, collapsed steps, iteration cap)
  // still count as solved when the iterate meets a mildly loose tolerance.
  auto loose_ok = [&](const Iterate& x, const VectorXd& yv, const Iterate& z) {
    const VectorXd rp = b - apply_A(in, x);
    Iterate rd = C;
    rd.axpy(-1.0, apply_AT(in, yv));
    rd.axpy(-1.0, z);
    const double pres = rp.cwiseAbs().maxCoeff() / b_ref;
    const double dres = block_norm(rd) / c_ref;
    const double pobj = dot(C, x), dobj = b.dot(yv);
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    return pres <= 1e-6 && dres <= 1e-6 && relgap <= 1e-6;
  };
  auto numeric_exit = [&](const Iterate& x, const VectorXd& yv, const Iterate& z,
                          const char* what) {
    finalize(x);
    if (loose_ok(x, yv, z)) {
      sol.status = SdpStatus::Optimal;
      sol.message = "converged at reduced accuracy";
    } else {
      sol.status = SdpStatus::NumericFailure;
      sol.message = what;
    }
    return sol;
  };

  double gap_hist[8];
  std::fill(gap_hist, gap_hist + 8, std::numeric_limits<double>::infinity());
  for (int iter = 0; iter < max_iter; ++iter) {
    const VectorXd rp = b - apply_A(in, X);
    Iterate Rd = C;
    Rd.axpy(-1.0, apply_AT(in, y));
    Rd.axpy(-1.0, Z);
    const double mu = dot(X, Z) / in.nu;

    const double pobj = dot(C, X);
    const double dobj = b.dot(y);
    const double pres = rp.cwiseAbs().maxCoeff() / b_ref;
    const double dres = block_norm(Rd) / c_ref;
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    sol.iterations = iter;
    static const bool trace = std::getenv("STARCOV_SDP_TRACE") != nullptr;
    if (trace) {
      int worst = 0;
      rp.cwiseAbs().maxCoeff(&worst);
      double xmin = 1e300, xmax = 0.0;
      for (const auto& blk : X.blk) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(blk, Eigen::EigenvaluesOnly);
        xmin = std::min(xmin, es.eigenvalues().minCoeff());
        xmax = std::max(xmax, es.eigenvalues().maxCoeff());
      }
      std::fprintf(stderr,
                   "  sdp it=%2d mu=%.3e pres=%.3e(row %d) dres=%.3e gap=%.3e pobj=%.6e dobj=%.6e ynorm=%.3e Xev=[%.2e,%.2e] slk=[%.2e,%.2e]\n",
                   iter, mu, pres, worst, dres, relgap, pobj, dobj, y.cwiseAbs().maxCoeff(),
                   xmin, xmax, X.slk.size() ? X.slk.minCoeff() : 0.0,
                   X.slk.size() ? X.slk.maxCoeff() : 0.0);
    }
    if (pres <= tol && dres <= tol && relgap <= tol) {
      finalize(X);
      sol.status = SdpStatus::Optimal;
      sol.message = "converged";
      return sol;
    }

    // Stagnation guard: when eight iterations shrink the gap by less than
    // ~1.5x the step lengths have collapsed and the remaining iterations only
    // burn time; hand the (already high-quality) iterate to numeric_exit.
    gap_hist[iter % 8] = relgap;
    if (iter >= 8 && relgap > gap_hist[(iter + 1) % 8] / 1.5 && pres <= 1e-6)
      return numeric_exit(X, y, Z, "progress stalled");

    // Primal infeasibility certificate: y with A^T(y) in -PSD and b^T y > 0.
    const double ynorm = y.cwiseAbs().maxCoeff();
    if (ynorm > 1e6) {
      const VectorXd yn = y / ynorm;
      if (b.dot(yn) > 1e-8) {
        Iterate aty = apply_AT(in, yn);
        double lmax = aty.slk.size() ? aty.slk.maxCoeff() : -1.0;
        for (const auto& blk : aty.blk) lmax = std::max(lmax, -min_eig(-blk));
        if (lmax <= 1e-7) {
          finalize(X);
          sol.status = SdpStatus::Infeasible;
          sol.message = "primal infeasibility certificate";
          return sol;
        }
      }
    }

    // Cheap NT route while well inside the path, accurate route for the
    // endgame where X Z is badly conditioned.
    const bool accurate_nt = mu <= 1e-5 * mu0 || iter >= max_iter - 10;
    if (!compute_nt(X, Z, s, accurate_nt))
      return numeric_exit(X, y, Z, "NT scaling failed (iterate lost definiteness)");

    MatrixXd M = build_schur(in, s);
    const double reg0 = 1e-13 * std::max(1.0, M.diagonal().maxCoeff());
    Eigen::LLT<MatrixXd> chol;
    double reg = reg0;
    for (;;) {
      chol.compute(M + reg * MatrixXd::Identity(m, m));
      if (chol.info() == Eigen::Success) break;
      reg *= 100.0;
      if (reg > 1e-2 * std::max(1.0, M.diagonal().maxCoeff()))
        return numeric_exit(X, y, Z, "Schur complement not positive definite");
    }

    // Z^{-1} per block from the cached factors.
    Iterate Zi = Iterate::zero(in.dims, in.n_slack);
    for (size_t v = 0; v < in.dims.size(); ++v) {
      const MatrixXcd li = s.lz[v].triangularView<Eigen::Lower>().solve(
          MatrixXcd::Identity(in.dims[v], in.dims[v]));
      Zi.blk[v] = hermitize(li.adjoint() * li);
    }
    Zi.slk = Z.slk.cwiseInverse();

    const Iterate wrdw = scale_wxw(s, Rd);
    const VectorXd rhs_aff = rp + apply_A(in, X) + apply_A(in, wrdw);
    const VectorXd a_zi = apply_A(in, Zi);

    // Accurate Schur solves via iterative refinement; M is small but can be
    // severely ill-conditioned near degenerate optimal faces.
    auto refined_solve = [&](const VectorXd& rhs) {
      VectorXd v = chol.solve(rhs);
      for (int r = 0; r < 3; ++r) {
        const VectorXd res = rhs - M * v;
        if (!res.allFinite() || res.cwiseAbs().maxCoeff() <=
            1e-14 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) break;
        v += chol.solve(res);
      }
      return v;
    };

    // Predictor: pure Newton step to the boundary fixes the centering weight.
    const VectorXd dy_aff = refined_solve(rhs_aff);
    Iterate dZ_aff = Rd;
    dZ_aff.axpy(-1.0, apply_AT(in, dy_aff));
    Iterate dX_aff = scale_wxw(s, dZ_aff);
    dX_aff.axpy(1.0, X);
    for (auto& blk_ : dX_aff.blk) blk_ *= -1.0;
    dX_aff.slk *= -1.0;

    const double ap = max_step(X, dX_aff, &s.lx);
    const double ad = max_step(Z, dZ_aff, &s.lz);
    Iterate Xa = X, Za = Z;
    Xa.axpy(ap, dX_aff);
    Za.axpy(ad, dZ_aff);
    const double mu_aff = std::max(0.0, dot(Xa, Za) / in.nu);
    const double sigma =
        std::clamp(std::pow(mu_aff / std::max(mu, 1e-300), 3.0), 1e-3, 1.0);

    // Mehrotra second-order corrector (HKM-style): the affine cross term
    // Hsym(dXaff dZaff Z^{-1}) sharpens the complementarity target so full
    // steps survive near the central path.
    Iterate corr = Iterate::zero(in.dims, in.n_slack);
    for (size_t v = 0; v < in.dims.size(); ++v)
      corr.blk[v] = hermitize(dX_aff.blk[v] * dZ_aff.blk[v] * Zi.blk[v]);
    corr.slk = dX_aff.slk.cwiseProduct(dZ_aff.slk).cwiseProduct(Zi.slk);

    // Combined step with centering sigma*mu and the corrector.
    const VectorXd dy =
        refined_solve(VectorXd(rhs_aff - sigma * mu * a_zi + apply_A(in, corr)));
    Iterate dZ = Rd;
    dZ.axpy(-1.0, apply_AT(in, dy));
    Iterate dX = scale_wxw(s, dZ);
    dX.axpy(1.0, X);
    dX.axpy(1.0, corr);
    for (auto& blk_ : dX.blk) blk_ *= -1.0;
    dX.slk *= -1.0;
    dX.axpy(sigma * mu, Zi);

    double step_p = std::min(1.0, 0.98 * max_step(X, dX, &s.lx));
    double step_d = std::min(1.0, 0.98 * max_step(Z, dZ, &s.lz));

    // Central-path neighborhood safeguard: without a second-order corrector a
    // near-affine step can crush one complementarity product far below mu,
    // after which the fraction-to-boundary rule chokes all later steps.
    // Backtrack until the worst product stays within a fixed band of mu (never
    // demanding more than the current iterate already has).
    if (std::min(step_p, step_d) > 0.3) {
      const double ratio0 = prox_ratio(X, Z, in.nu, &s.lz);
      if (ratio0 > 0.0) {
        const double floor = std::min(1e-2, 0.5 * ratio0);
        for (int bt = 0; bt < 8; ++bt) {
          Iterate Xn = X, Zn = Z;
          Xn.axpy(step_p, dX);
          Zn.axpy(step_d, dZ);
          const double r = prox_ratio(Xn, Zn, in.nu);
          if (r >= floor) break;
          step_p *= 0.6;
          step_d *= 0.6;
        }
      }
    }

    if (std::getenv("STARCOV_SDP_TRACE"))
      std::fprintf(stderr, "      sigma=%.2e ap=%.2e ad=%.2e step_p=%.2e step_d=%.2e |dy|=%.2e\n",
                   sigma, ap, ad, step_p, step_d, dy.cwiseAbs().maxCoeff());
    if (step_p < 1e-10 && step_d < 1e-10)
      return numeric_exit(X, y, Z, "step length collapsed");
    X.axpy(step_p, dX);
    Z.axpy(step_d, dZ);
    y += step_d * dy;
    for (auto& blk_ : X.blk) blk_ = hermitize(blk_);
    for (auto& blk_ : Z.blk) blk_ = hermitize(blk_);
  }

  sol.iterations = max_iter;
  return numeric_exit(X, y, Z, "iteration cap reached");
}

}  // namespace starcov
