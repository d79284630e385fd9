#include "tgd/cohomology.hpp"

#include <algorithm>

#include "tgd/error.hpp"
#include "tgd/linalg.hpp"

namespace tgd {

namespace {

QMatrix operator_matrix(const ComplexIndexing& cx,
                        const std::function<TCElement(const TCElement&)>& op) {
  QMatrix d(cx.size, cx.size);
  for (int col = 0; col < cx.size; ++col) {
    std::vector<Scalar> v = cx.coords(op(cx.element(col)));
    for (int row = 0; row < cx.size; ++row) d.at(row, col) = v[std::size_t(row)];
  }
  return d;
}

QMatrix submatrix(const QMatrix& d, const std::vector<int>& rows, const std::vector<int>& cols) {
  QMatrix r(int(rows.size()), int(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) r.at(int(i), int(j)) = d.at(rows[i], cols[j]);
  return r;
}

// Appends to `rows` those candidates that grow the row span, in order.
// Returns the indices of the accepted candidates.
std::vector<int> grow_span(QMatrix& rows, int& current_rank,
                           const std::vector<std::vector<Scalar>>& candidates) {
  std::vector<int> accepted;
  for (std::size_t t = 0; t < candidates.size(); ++t) {
    QMatrix trial(rows.rows() + 1, rows.cols());
    for (int i = 0; i < rows.rows(); ++i)
      for (int j = 0; j < rows.cols(); ++j) trial.at(i, j) = rows.at(i, j);
    for (int j = 0; j < rows.cols(); ++j) trial.at(rows.rows(), j) = candidates[t][std::size_t(j)];
    int r = rank(trial);
    if (r > current_rank) {
      rows = std::move(trial);
      current_rank = r;
      accepted.push_back(int(t));
    }
  }
  return accepted;
}

// Rows spanning the image of the block of `d` with the given columns,
// restricted to the given rows of the complex.
QMatrix image_rows(const QMatrix& d, const std::vector<int>& target, const std::vector<int>& source) {
  QMatrix r(int(source.size()), int(target.size()));
  for (std::size_t j = 0; j < source.size(); ++j)
    for (std::size_t i = 0; i < target.size(); ++i) r.at(int(j), int(i)) = d.at(target[i], source[j]);
  return r;
}

// Kernel-modulo-image representatives for one block of the complex:
// `here` indexes the block, `d_out` maps it forward, `exact` spans the
// incoming image as row vectors over `here` coordinates.
std::vector<std::vector<Scalar>> block_representatives(const QMatrix& d_out, QMatrix exact,
                                                       int* out_dim) {
  std::vector<std::vector<Scalar>> ker = kernel_basis(d_out);
  int r = rank(exact);
  int ker_dim = int(ker.size());
  *out_dim = ker_dim - r;
  std::vector<int> chosen = grow_span(exact, r, ker);
  std::vector<std::vector<Scalar>> reps;
  for (int t : chosen) reps.push_back(ker[std::size_t(t)]);
  return reps;
}

}  // namespace

int GradedCohomology::total_dim() const {
  int t = 0;
  for (int d : dims) t += d;
  return t;
}

int GradedCohomology::euler_characteristic() const {
  int chi = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) chi += (k & 1) ? -dims[k] : dims[k];
  return chi;
}

GradedCohomology cohomology_dims(const ModelPtr& m) {
  if (!m) fail_input("cohomology of a null model");
  ComplexIndexing cx(m);
  QMatrix d = operator_matrix(cx, [](const TCElement& x) { return x.d(); });

  int max_deg = 0;
  for (int idx = 0; idx < cx.size; ++idx) max_deg = std::max(max_deg, cx.degree(idx));
  std::vector<std::vector<int>> by_degree(std::size_t(max_deg) + 2);
  for (int idx = 0; idx < cx.size; ++idx) by_degree[std::size_t(cx.degree(idx))].push_back(idx);

  GradedCohomology h;
  h.dims.assign(std::size_t(max_deg) + 1, 0);
  h.representatives.resize(std::size_t(max_deg) + 1);
  for (int k = 0; k <= max_deg; ++k) {
    const auto& here = by_degree[std::size_t(k)];
    if (here.empty()) continue;
    const auto& next = by_degree[std::size_t(k) + 1];
    QMatrix d_out = submatrix(d, next, here);
    QMatrix exact(0, int(here.size()));
    if (k > 0) exact = image_rows(d, here, by_degree[std::size_t(k) - 1]);
    int dim = 0;
    auto reps = block_representatives(d_out, std::move(exact), &dim);
    h.dims[std::size_t(k)] = dim;
    for (const auto& rep : reps) {
      std::vector<Scalar> full(std::size_t(cx.size), Scalar(0));
      for (std::size_t j = 0; j < here.size(); ++j) full[std::size_t(here[j])] = rep[j];
      h.representatives[std::size_t(k)].push_back(cx.from_coords(full));
    }
  }
  return h;
}

ParityCohomology twisted_cohomology_dims(const ModelPtr& m, const TCElement& flux) {
  if (!m) fail_input("cohomology of a null model");
  if (!flux.is_zero()) {
    if (!same_model(flux.model(), m)) fail_input("flux lives over a different model");
    if (!flux.even_part().is_zero()) fail_input("flux must be odd");
    if (!flux.d().is_zero()) fail_input("flux must be closed");
  }
  ComplexIndexing cx(m);
  TCElement h = flux.is_zero() ? TCElement(m) : flux;
  QMatrix d = operator_matrix(cx, [&](const TCElement& x) { return twisted_d(h, x); });

  std::vector<int> even, odd;
  for (int idx = 0; idx < cx.size; ++idx)
    ((cx.degree(idx) & 1) ? odd : even).push_back(idx);

  ParityCohomology res;
  auto run = [&](const std::vector<int>& here, const std::vector<int>& other, int* dim,
                 std::vector<TCElement>* reps) {
    QMatrix d_out = submatrix(d, other, here);
    QMatrix exact = image_rows(d, here, other);
    auto raw = block_representatives(d_out, std::move(exact), dim);
    for (const auto& rep : raw) {
      std::vector<Scalar> full(std::size_t(cx.size), Scalar(0));
      for (std::size_t j = 0; j < here.size(); ++j) full[std::size_t(here[j])] = rep[j];
      reps->push_back(cx.from_coords(full));
    }
  };
  run(even, odd, &res.even_dim, &res.even_representatives);
  run(odd, even, &res.odd_dim, &res.odd_representatives);
  return res;
}

bool compare_duals(const ModelPtr& e, const TCElement& h, const ModelPtr& ehat,
                   const TCElement& hhat,
                   const std::function<TCElement(const TCElement&)>& tau) {
  ParityCohomology a = twisted_cohomology_dims(e, h);
  ParityCohomology b = twisted_cohomology_dims(ehat, hhat);
  if (a.even_dim != b.even_dim || a.odd_dim != b.odd_dim) return false;

  ComplexIndexing cx(ehat);
  TCElement hh = hhat.is_zero() ? TCElement(ehat) : hhat;
  QMatrix d = operator_matrix(cx, [&](const TCElement& x) { return twisted_d(hh, x); });
  QMatrix exact(cx.size, cx.size);
  for (int i = 0; i < cx.size; ++i)
    for (int j = 0; j < cx.size; ++j) exact.at(i, j) = d.at(j, i);
  int r = rank(exact);

  std::vector<std::vector<Scalar>> images;
  std::vector<TCElement> reps = a.even_representatives;
  reps.insert(reps.end(), a.odd_representatives.begin(), a.odd_representatives.end());
  for (const auto& rep : reps) {
    TCElement img = tau(rep);
    if (!twisted_d(hh, img).is_zero()) return false;
    images.push_back(cx.coords(img));
  }
  int grown = int(grow_span(exact, r, images).size());
  return grown == a.even_dim + a.odd_dim;
}

std::vector<BaseElement> pullback_kernel(const ModelPtr& m) {
  if (!m) fail_input("pullback kernel of a null model");
  const CDGAPtr& base = m->base;
  int nb = base->dim();

  QMatrix db(nb, nb);
  for (int col = 0; col < nb; ++col)
    for (const auto& [row, c] : base->differential[std::size_t(col)]) db.at(row, col) = c;

  ComplexIndexing cx(m);
  QMatrix dm = operator_matrix(cx, [](const TCElement& x) { return x.d(); });

  int max_deg = 0;
  for (int i = 0; i < nb; ++i) max_deg = std::max(max_deg, base->degree(i));
  std::vector<std::vector<int>> base_by_degree(std::size_t(max_deg) + 2);
  for (int i = 0; i < nb; ++i) base_by_degree[std::size_t(base->degree(i))].push_back(i);
  int model_max = 0;
  for (int idx = 0; idx < cx.size; ++idx) model_max = std::max(model_max, cx.degree(idx));
  std::vector<std::vector<int>> model_by_degree(std::size_t(model_max) + 2);
  for (int idx = 0; idx < cx.size; ++idx) model_by_degree[std::size_t(cx.degree(idx))].push_back(idx);

  std::vector<BaseElement> result;
  for (int k = 0; k <= max_deg; ++k) {
    const auto& bk = base_by_degree[std::size_t(k)];
    if (bk.empty()) continue;
    const auto& b_next = base_by_degree[std::size_t(k) + 1];

    std::vector<std::vector<Scalar>> closed = kernel_basis(submatrix(db, b_next, bk));
    if (closed.empty()) continue;

    // Exact elements of the model in this degree, as row vectors.
    const auto& mk = model_by_degree[std::size_t(k)];
    std::vector<int> m_prev = k > 0 ? model_by_degree[std::size_t(k) - 1] : std::vector<int>{};
    QMatrix w = image_rows(dm, mk, m_prev);

    // Position of the basic inclusion inside the model block.
    std::vector<int> pos(std::size_t(cx.size), -1);
    for (std::size_t j = 0; j < mk.size(); ++j) pos[std::size_t(mk[j])] = int(j);

    // A closed combination maps into the exact subspace iff the joint
    // system [inclusion | image] has a kernel vector with that c-part.
    int nc = int(closed.size());
    QMatrix joint(int(mk.size()), nc + w.rows());
    for (int t = 0; t < nc; ++t)
      for (std::size_t j = 0; j < bk.size(); ++j) {
        int p = pos[std::size_t(bk[j])];  // mask 0 keeps base indexing
        if (p >= 0) joint.at(p, t) = closed[std::size_t(t)][j];
      }
    for (int t = 0; t < w.rows(); ++t)
      for (std::size_t j = 0; j < mk.size(); ++j) joint.at(int(j), nc + t) = -w.at(t, int(j));

    std::vector<std::vector<Scalar>> in_kernel;
    for (const auto& v : kernel_basis(joint)) {
      std::vector<Scalar> coeffs(std::size_t(bk.size()), Scalar(0));
      bool nontrivial = false;
      for (int t = 0; t < nc; ++t)
        if (!is_zero(v[std::size_t(t)])) {
          nontrivial = true;
          for (std::size_t j = 0; j < bk.size(); ++j)
            coeffs[j] += v[std::size_t(t)] * closed[std::size_t(t)][j];
        }
      if (nontrivial) in_kernel.push_back(std::move(coeffs));
    }
    if (in_kernel.empty()) continue;

    // Quotient by the exact base elements of this degree.
    std::vector<int> b_prev = k > 0 ? base_by_degree[std::size_t(k) - 1] : std::vector<int>{};
    QMatrix exact = image_rows(db, bk, b_prev);
    int r = rank(exact);
    for (int t : grow_span(exact, r, in_kernel)) {
      BaseElement rep(base);
      for (std::size_t j = 0; j < bk.size(); ++j) rep.add_term(bk[j], in_kernel[std::size_t(t)][j]);
      result.push_back(std::move(rep));
    }
  }
  return result;
}

}  // namespace tgd
