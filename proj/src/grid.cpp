#include "plate/grid.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <fstream>
#include <vector>

namespace plate {

void LinearOperator::factorize() const {
  if (!fac_) {
    fac_ = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
    fac_->compute(a_);
    if (fac_->info() != Eigen::Success)
      throw std::runtime_error("LinearOperator: factorization failed "
                               "(invalid boundary setup?)");
  }
}

Vec LinearOperator::solve(const Vec& rhs) const {
  factorize();
  return fac_->solve(rhs);
}

Mat LinearOperator::solve(const Mat& rhs) const {
  factorize();
  return fac_->solve(rhs);
}

Grid::Grid(int nx_, int ny_, double lx_, double ly_)
    : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
  if (nx < 5 || ny < 5)
    throw ConfigError("grid needs nx, ny >= 5 (biharmonic stencil)");
  if (lx <= 0.0 || ly <= 0.0) throw ConfigError("domain lengths must be positive");
  hx = lx / (nx - 1);
  hy = ly / (ny - 1);
  wnode_.resize(nodes());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) wnode_[node(i, j)] = weight(i, j);
  build_operators();
}

namespace {
using Trip = Eigen::Triplet<double>;
}

void Grid::build_operators() {
  const int n = nodes();
  const int m = interior();
  std::vector<Trip> tx, ty, txx, tyy, txy, tl;

  for (int j = 1; j < ny - 1; ++j) {
    for (int i = 1; i < nx - 1; ++i) {
      const int r = node(i, j);
      const int c = interior_index(i, j);
      // centered first differences; boundary neighbors hold zeros
      if (int cc = interior_index(i + 1, j); cc >= 0)
        tx.emplace_back(r, cc, 1.0 / (2.0 * hx));
      if (int cc = interior_index(i - 1, j); cc >= 0)
        tx.emplace_back(r, cc, -1.0 / (2.0 * hx));
      if (int cc = interior_index(i, j + 1); cc >= 0)
        ty.emplace_back(r, cc, 1.0 / (2.0 * hy));
      if (int cc = interior_index(i, j - 1); cc >= 0)
        ty.emplace_back(r, cc, -1.0 / (2.0 * hy));
      // second differences
      txx.emplace_back(r, c, -2.0 / (hx * hx));
      if (int cc = interior_index(i + 1, j); cc >= 0)
        txx.emplace_back(r, cc, 1.0 / (hx * hx));
      if (int cc = interior_index(i - 1, j); cc >= 0)
        txx.emplace_back(r, cc, 1.0 / (hx * hx));
      tyy.emplace_back(r, c, -2.0 / (hy * hy));
      if (int cc = interior_index(i, j + 1); cc >= 0)
        tyy.emplace_back(r, cc, 1.0 / (hy * hy));
      if (int cc = interior_index(i, j - 1); cc >= 0)
        tyy.emplace_back(r, cc, 1.0 / (hy * hy));
      // 5-point Laplacian (Dirichlet), SPD as -lap
      tl.emplace_back(c, c, 2.0 / (hx * hx) + 2.0 / (hy * hy));
      if (int cc = interior_index(i + 1, j); cc >= 0)
        tl.emplace_back(c, cc, -1.0 / (hx * hx));
      if (int cc = interior_index(i - 1, j); cc >= 0)
        tl.emplace_back(c, cc, -1.0 / (hx * hx));
      if (int cc = interior_index(i, j + 1); cc >= 0)
        tl.emplace_back(c, cc, -1.0 / (hy * hy));
      if (int cc = interior_index(i, j - 1); cc >= 0)
        tl.emplace_back(c, cc, -1.0 / (hy * hy));
    }
  }
  // reflection ghost rows of the second differences on the boundary:
  // w_ghost = w_first_interior, w_boundary = 0  =>  2 w_1 / h^2
  for (int j = 1; j < ny - 1; ++j) {
    txx.emplace_back(node(0, j), interior_index(1, j), 2.0 / (hx * hx));
    txx.emplace_back(node(nx - 1, j), interior_index(nx - 2, j),
                     2.0 / (hx * hx));
  }
  for (int i = 1; i < nx - 1; ++i) {
    tyy.emplace_back(node(i, 0), interior_index(i, 1), 2.0 / (hy * hy));
    tyy.emplace_back(node(i, ny - 1), interior_index(i, ny - 2),
                     2.0 / (hy * hy));
  }
  // compact cross derivative on cell centers
  for (int cj = 0; cj < ny - 1; ++cj) {
    for (int ci = 0; ci < nx - 1; ++ci) {
      const int r = cj * (nx - 1) + ci;
      const double s = 1.0 / (hx * hy);
      if (int cc = interior_index(ci, cj); cc >= 0) txy.emplace_back(r, cc, s);
      if (int cc = interior_index(ci + 1, cj + 1); cc >= 0)
        txy.emplace_back(r, cc, s);
      if (int cc = interior_index(ci + 1, cj); cc >= 0)
        txy.emplace_back(r, cc, -s);
      if (int cc = interior_index(ci, cj + 1); cc >= 0)
        txy.emplace_back(r, cc, -s);
    }
  }

  gx_.resize(n, m);
  gx_.setFromTriplets(tx.begin(), tx.end());
  gy_.resize(n, m);
  gy_.setFromTriplets(ty.begin(), ty.end());
  dxx_.resize(n, m);
  dxx_.setFromTriplets(txx.begin(), txx.end());
  dyy_.resize(n, m);
  dyy_.setFromTriplets(tyy.begin(), tyy.end());
  dxy_.resize(cells(), m);
  dxy_.setFromTriplets(txy.begin(), txy.end());

  SpMat lap(m, m);
  lap.setFromTriplets(tl.begin(), tl.end());
  lap5_ = LinearOperator(lap);

  // G^T W G; boundary rows of G are zero, so W reduces to hx*hy there.
  lg_ = hx * hy * SpMat(gx_.transpose() * gx_ + gy_.transpose() * gy_);

  // centered differences skip every other node, so on odd x odd grids the
  // field that is 1 on (i odd, j odd) interior nodes and 0 elsewhere is
  // invisible to both Gx and Gy
  if (nx % 2 == 1 && ny % 2 == 1) {
    gker_.setZero(m);
    for (int j = 1; j < ny - 1; j += 2)
      for (int i = 1; i < nx - 1; i += 2) gker_[interior_index(i, j)] = 1.0;
    gker_ /= gker_.norm();
  }
}

Vec Grid::solve_gram(const Vec& weak_rhs) const {
  Vec rhs = weak_rhs;
  if (gker_.size() > 0) rhs -= gker_.dot(rhs) * gker_;
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg(lg_);
  cg.setTolerance(1e-14);
  cg.setMaxIterations(50 * interior());
  Vec x = cg.solve(rhs);
  if (gker_.size() > 0) x -= gker_.dot(x) * gker_;
  return x;
}

Mat Grid::grad_adjoint_sqrtw() const {
  const int n = nodes();
  const Vec ws = wnode_.cwiseSqrt();
  Mat a = Mat::Zero(interior(), 2 * n);
  auto fill = [&](const SpMat& op, int col0) {
    for (int c = 0; c < op.outerSize(); ++c)
      for (SpMat::InnerIterator it(op, c); it; ++it)
        a(it.col(), col0 + it.row()) += it.value() * ws[it.row()];
  };
  fill(gx_, 0);
  fill(gy_, n);
  return a;
}

VectorField2 Grid::gradient(const ScalarField& w) const {
  VectorField2 g(nodes());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int k = node(i, j);
      // reflection ghosts across the boundary make dw/dn vanish there
      const double wl = (i == 0) ? w.v[node(1, j)] : w.v[node(i - 1, j)];
      const double wr = (i == nx - 1) ? w.v[node(nx - 2, j)] : w.v[node(i + 1, j)];
      const double wd = (j == 0) ? w.v[node(i, 1)] : w.v[node(i, j - 1)];
      const double wu = (j == ny - 1) ? w.v[node(i, ny - 2)] : w.v[node(i, j + 1)];
      g.x[k] = (wr - wl) / (2.0 * hx);
      g.y[k] = (wu - wd) / (2.0 * hy);
    }
  }
  return g;
}

ScalarField Grid::divergence(const VectorField2& q) const {
  // negative weighted transpose of the gradient map: exact discrete
  // integration by parts against interior-supported fields
  Vec qx = wnode_.array() * q.x.array();
  Vec qy = wnode_.array() * q.y.array();
  Vec d = -(gx_.transpose() * qx + gy_.transpose() * qy) / (hx * hy);
  return prolong(d);
}

SymTensor2Field Grid::hessian(const ScalarField& w) const {
  SymTensor2Field h(nodes());
  auto val = [&](int i, int j) -> double {
    // reflect indices across the boundary (even extension)
    if (i < 0) i = -i;
    if (j < 0) j = -j;
    if (i > nx - 1) i = 2 * (nx - 1) - i;
    if (j > ny - 1) j = 2 * (ny - 1) - j;
    return w.v[node(i, j)];
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int k = node(i, j);
      h.t11[k] = (val(i - 1, j) - 2.0 * val(i, j) + val(i + 1, j)) / (hx * hx);
      h.t22[k] = (val(i, j - 1) - 2.0 * val(i, j) + val(i, j + 1)) / (hy * hy);
      h.t12[k] = (val(i + 1, j + 1) + val(i - 1, j - 1) - val(i + 1, j - 1) -
                  val(i - 1, j + 1)) /
                 (4.0 * hx * hy);
    }
  }
  return h;
}

Vec Grid::grad_adjoint(const VectorField2& q) const {
  Vec qx = wnode_.array() * q.x.array();
  Vec qy = wnode_.array() * q.y.array();
  return gx_.transpose() * qx + gy_.transpose() * qy;
}

LinearOperator Grid::assemble_biharmonic(const MaterialTensor& mat) const {
  const Eigen::Matrix3d& b = mat.bending;
  const double scale = b.cwiseAbs().maxCoeff();
  if (std::abs(b(0, 2)) + std::abs(b(1, 2)) > 1e-14 * scale)
    throw ConfigError("normal-shear bending coupling is not supported");

  // node weights relative to hx*hy (1 interior, 1/2 edge, 1/4 corner)
  Vec wn = wnode_ / (hx * hy);
  SpMat Wxx = wn.asDiagonal() * SpMat(dxx_);
  SpMat Wyy = wn.asDiagonal() * SpMat(dyy_);
  SpMat a = b(0, 0) * SpMat(dxx_.transpose() * Wxx) +
            b(1, 1) * SpMat(dyy_.transpose() * Wyy) +
            b(0, 1) * SpMat(dxx_.transpose() * Wyy + dyy_.transpose() * Wxx) +
            4.0 * b(2, 2) * SpMat(dxy_.transpose() * dxy_);
  return LinearOperator(std::move(a));
}

ScalarField Grid::solve_biharmonic(const Grid& g, const LinearOperator& op,
                                   const ScalarField& rhs) {
  return g.prolong(op.solve(g.restrict_interior(rhs)));
}

ScalarField Grid::solve_laplacian(const ScalarField& rhs) const {
  // lap5_ holds -lap (SPD); lap w = rhs  =>  (-lap) w = -rhs
  return prolong(lap5_.solve(Vec(-restrict_interior(rhs))));
}

Vec Grid::restrict_interior(const ScalarField& f) const {
  Vec out(interior());
  for (int j = 1; j < ny - 1; ++j)
    for (int i = 1; i < nx - 1; ++i)
      out[interior_index(i, j)] = f.v[node(i, j)];
  return out;
}

ScalarField Grid::prolong(const Vec& vi) const {
  ScalarField f(nodes());
  for (int j = 1; j < ny - 1; ++j)
    for (int i = 1; i < nx - 1; ++i)
      f.v[node(i, j)] = vi[interior_index(i, j)];
  return f;
}

void Grid::write_csv(const std::string& path, const ScalarField& f) const {
  std::ofstream out(path);
  out << "i,j,x1,x2,value\n";
  out.precision(17);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out << i << ',' << j << ',' << x(i) << ',' << y(j) << ','
          << f.v[node(i, j)] << '\n';
}

}  // namespace plate
